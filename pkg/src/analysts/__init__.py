"""Analysts: one per command, turning library results into rows"""

from .base_analyst import AnalysisReport, BaseAnalyst
from .constant_analyst import ConstantRewardAnalyst
from .harq_analyst import HarqAnalyst
from .finite_analyst import FiniteTimeAnalyst
from .mc_analyst import MonteCarloAnalyst
from .rate_analyst import RateOptimizerAnalyst

__all__ = [
    'AnalysisReport',
    'BaseAnalyst',
    'ConstantRewardAnalyst',
    'HarqAnalyst',
    'FiniteTimeAnalyst',
    'MonteCarloAnalyst',
    'RateOptimizerAnalyst',
]
