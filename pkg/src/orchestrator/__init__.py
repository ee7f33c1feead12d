"""
Orchestrator module

CapacityOrchestrator lives in .orchestrator and is imported from there;
the analysts depend on RunConfig, so this package stays import-light.
"""

from .run_config import RunConfig

__all__ = ['RunConfig']
