"""
Finite-time analyst: phi(t) by recursion, cross-checked against enumeration
and the characteristic-root closed form
"""

import math
from typing import Any, Dict

from ..capacity.errors import CoincidentRoots, ConfigError, TooLarge
from ..capacity.finite_time import phi_determinant, phi_enumeration, phi_recursion
from ..capacity.reward_process import effective_capacity_variable
from ..orchestrator.run_config import RunConfig
from .base_analyst import AnalysisReport, BaseAnalyst, relative_error


class FiniteTimeAnalyst(BaseAnalyst):
    """Rows t = 0..t_max; checks_passed is False when the routes disagree"""

    required_fields = ["t", "phi_recursion", "capacity_finite", "capacity_limit"]

    def __init__(self, config: Dict[str, Any], logger: Any):
        super().__init__("FiniteTime", config, logger)

    def analyze(self, run_config: RunConfig) -> AnalysisReport:
        table = run_config.table
        if table is None:
            raise ConfigError("a reward table is required", key="table")
        if run_config.theta is None or run_config.theta <= 0.0:
            raise ConfigError("a single positive theta is required", key="theta")
        theta = run_config.theta
        t_max = run_config.t_max if run_config.t_max is not None else 12
        check = run_config.check or "all"
        settings = self.section('finite_time')
        enumeration_tol = float(settings.get('agreement_enumeration', 1e-12))
        determinant_tol = float(settings.get('agreement_determinant', 1e-8))

        series = phi_recursion(table, theta, t_max)
        limit = effective_capacity_variable(table, theta).capacity
        K = table.K

        report = AnalysisReport(rows=[])
        enumeration_stopped = False
        for t in range(t_max + 1):
            reference = series[t]
            row = {
                "t": t,
                "phi_recursion": reference,
                "capacity_finite": series.capacity(t) if t >= 1 else math.nan,
                "capacity_limit": limit,
            }

            if check in ("enumeration", "all"):
                value = math.nan
                if not enumeration_stopped:
                    try:
                        value = phi_enumeration(
                            table, theta, t, max_terms=int(settings.get('enumeration_limit', 10_000_000))
                        )
                    except TooLarge as exc:
                        enumeration_stopped = True
                        report.warnings.append(str(exc))
                        self.logger.warning(f"Enumeration stopped at t={t}: {exc}")
                error = relative_error(value, reference) if not math.isnan(value) else math.nan
                if error > enumeration_tol:
                    report.checks_passed = False
                row["phi_enumeration"] = value
                row["rel_err_enumeration"] = error

            if check in ("determinant", "all"):
                value = math.nan
                if t >= K:
                    try:
                        value = phi_determinant(
                            table, theta, t,
                            separation=float(settings.get('root_separation', 1e-8)),
                            imag_tolerance=float(settings.get('imag_tolerance', 1e-8)),
                        )
                    except CoincidentRoots as exc:
                        report.warnings.append(str(exc))
                        self.logger.warning(f"Closed form skipped at t={t}: {exc}")
                error = relative_error(value, reference) if not math.isnan(value) else math.nan
                if error > determinant_tol:
                    report.checks_passed = False
                row["phi_determinant"] = value
                row["rel_err_determinant"] = error

            report.rows.append(row)

        if not report.checks_passed:
            self.logger.error("Finite-time routes disagree beyond tolerance")
        return report
