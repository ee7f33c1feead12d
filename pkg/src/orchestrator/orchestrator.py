"""
Main Orchestrator - routes a command to its analyst and writes the rows
"""

import json
import math
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional

import pandas as pd
from tabulate import tabulate

from ..analysts.base_analyst import AnalysisReport
from ..analysts.constant_analyst import ConstantRewardAnalyst
from ..analysts.finite_analyst import FiniteTimeAnalyst
from ..analysts.harq_analyst import HarqAnalyst
from ..analysts.mc_analyst import MonteCarloAnalyst
from ..analysts.rate_analyst import RateOptimizerAnalyst
from ..capacity.errors import ConfigError, NonConvergence, VarianceWarning
from ..utils import setup_logger
from .run_config import RunConfig

COMMANDS = ("constant", "harq", "finite", "mc", "optimize")


class CapacityOrchestrator:
    """
    Coordinates one command per process

    Workflow:
    1. Pick the analyst for the command
    2. Run it against the validated RunConfig
    3. Write CSV/JSON rows to stdout or --output
    4. Log a short tabulated summary to stderr
    """

    def __init__(self, config: Dict[str, Any]):
        self.config = config
        self.logger = setup_logger("Orchestrator", config)
        # library modules log through the package logger
        setup_logger("src.capacity", config)

        self.analysts = {
            "constant": ConstantRewardAnalyst(config, setup_logger("ConstantReward", config)),
            "harq": HarqAnalyst(config, setup_logger("HarqCapacity", config)),
            "finite": FiniteTimeAnalyst(config, setup_logger("FiniteTime", config)),
            "mc": MonteCarloAnalyst(config, setup_logger("MonteCarlo", config)),
            "optimize": RateOptimizerAnalyst(config, setup_logger("RateOptimizer", config)),
        }

        self.logger.debug("Orchestrator initialized with all analysts")

    def run(self, command: str, run_config: RunConfig) -> AnalysisReport:
        """
        Execute one command

        Args:
            command: one of COMMANDS
            run_config: validated run parameters

        Returns:
            The analyst's report
        """
        if command not in self.analysts:
            raise ConfigError(f"unknown command {command!r}, expected one of {list(COMMANDS)}", key="command")

        self.logger.info(f"=== Running {command} ===")
        report = self.analysts[command].run(run_config)

        for warning in report.warnings:
            self.logger.warning(warning)
        self.write_output(report.rows, run_config)
        self._log_summary(report.rows)
        return report

    def write_output(self, rows: List[Dict[str, Any]], run_config: RunConfig):
        """CSV (17 significant digits) or a JSON array of row objects"""
        output_config = self.config.get('output', {}) or {}
        fmt = run_config.format or output_config.get('format', 'csv')
        frame = pd.DataFrame(rows)

        if fmt == "json":
            records = [
                {key: _json_value(value) for key, value in record.items()}
                for record in frame.to_dict(orient="records")
            ]
            text = json.dumps(records, indent=2) + "\n"
        else:
            text = frame.to_csv(index=False, float_format=output_config.get('float_format', '%.17g'))

        if run_config.output:
            path = Path(run_config.output)
            path.parent.mkdir(parents=True, exist_ok=True)
            with open(path, 'w', encoding='utf-8', newline='') as f:
                f.write(text)
            self.logger.info(f"Saved {len(rows)} rows to {path} ({path.stat().st_size} bytes)")
        else:
            sys.stdout.write(text)
            sys.stdout.flush()

    def _log_summary(self, rows: List[Dict[str, Any]]):
        limit = int((self.config.get('output', {}) or {}).get('summary_rows', 10))
        if not rows or limit <= 0:
            return
        frame = pd.DataFrame(rows[:limit])
        self.logger.info("Summary:\n" + tabulate(frame, headers="keys", tablefmt="github", showindex=False, floatfmt=".6g"))
        if len(rows) > limit:
            self.logger.info(f"... {len(rows) - limit} more rows")


def exit_code(report: AnalysisReport, strict: bool = False) -> int:
    """0 on success; failed cross-checks are numerical failures; strict escalates variance"""
    if not report.checks_passed:
        return NonConvergence.exit_code
    if strict and report.high_variance:
        return VarianceWarning.exit_code
    return 0


def _json_value(value: Any) -> Optional[Any]:
    if isinstance(value, float) and math.isnan(value):
        return None
    if hasattr(value, "item"):
        value = value.item()
        if isinstance(value, float) and math.isnan(value):
            return None
    return value
