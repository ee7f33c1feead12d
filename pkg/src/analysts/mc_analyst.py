"""
Monte Carlo analyst: simulated outage curves and phi(t) against their exact
counterparts, with z-scores
"""

import math
import warnings
from typing import Any, Dict

from ..capacity.channel_mc import (
    estimate_mgf_finite,
    estimate_outage_curve,
    finite_capacity_from_mgf,
)
from ..capacity.errors import ConfigError, NeedsMonteCarlo, VarianceWarning
from ..capacity.finite_time import phi_recursion
from ..capacity.harq_models import outage_curve_closed_form
from ..orchestrator.run_config import RunConfig
from .base_analyst import AnalysisReport, BaseAnalyst, z_score


class MonteCarloAnalyst(BaseAnalyst):

    required_fields = ["z_score"]

    def __init__(self, config: Dict[str, Any], logger: Any):
        super().__init__("MonteCarlo", config, logger)

    def analyze(self, run_config: RunConfig) -> AnalysisReport:
        if run_config.table is not None:
            return self._mgf(run_config)
        return self._outage(run_config)

    def _outage(self, run_config: RunConfig) -> AnalysisReport:
        config = run_config.harq_config(self.section('harq'))
        samples = self.samples(run_config)
        curve = estimate_outage_curve(
            config, samples, self.seed(run_config),
            block_size=int(self.section('monte_carlo').get('block_size', 8192)),
            workers=self.workers(run_config),
        )
        try:
            closed = outage_curve_closed_form(config)
        except NeedsMonteCarlo:
            closed = None
            self.logger.info(f"No closed form for {config.scheme.value}; reporting estimates only")

        rows = []
        for k in range(1, config.max_rounds + 1):
            exact = closed.probs[k] if closed is not None else math.nan
            rows.append({
                "k": k,
                "p_mc": curve.probs[k],
                "stderr": curve.stderr[k],
                "p_closed": exact,
                "z_score": z_score(curve.probs[k], exact, curve.stderr[k]) if closed is not None else math.nan,
            })

        report = AnalysisReport(rows=rows)
        ratio = float(self.section('monte_carlo').get('variance_ratio_warning', 0.1))
        noisy = [r["k"] for r in rows if r["p_mc"] > 0.0 and r["stderr"] > ratio * r["p_mc"]]
        if noisy:
            report.high_variance = True
            report.warnings.append(f"relative stderr above {ratio} for k in {noisy}")
            self.logger.warning(f"Outage estimates for k in {noisy} are noisy; raise --samples")
        return report

    def _mgf(self, run_config: RunConfig) -> AnalysisReport:
        if run_config.theta is None:
            raise ConfigError("theta is required for path simulation", key="theta")
        theta = run_config.theta
        t = run_config.t or run_config.t_max or 10
        mc = self.section('monte_carlo')

        with warnings.catch_warnings():
            warnings.simplefilter("ignore", VarianceWarning)
            estimate = estimate_mgf_finite(
                run_config.table, theta, t, self.samples(run_config), self.seed(run_config),
                block_size=int(mc.get('path_block_size', 4096)),
                workers=self.workers(run_config),
                variance_ratio=float(mc.get('variance_ratio_warning', 0.1)),
            )
        series = phi_recursion(run_config.table, theta, t)
        exact = series[t]

        report = AnalysisReport(rows=[], high_variance=estimate.high_variance)
        if estimate.high_variance:
            report.warnings.append(f"relative stderr of phi({t}) above threshold")

        row = {
            "t": t,
            "theta": theta,
            "phi_mc": estimate.mean,
            "stderr": estimate.stderr,
            "phi_exact": exact,
            "z_score": z_score(estimate.mean, exact, estimate.stderr),
            "capacity_mc": math.nan,
            "capacity_stderr": math.nan,
            "capacity_exact": math.nan,
        }
        if theta > 0.0 and estimate.mean > 0.0:
            row["capacity_mc"], row["capacity_stderr"] = finite_capacity_from_mgf(estimate, theta, t)
            row["capacity_exact"] = series.capacity(t)
        report.rows.append(row)
        return report
