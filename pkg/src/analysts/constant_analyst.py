"""
Constant-reward analyst: effective capacity over a theta sweep for one pmf
"""

from typing import Any, Dict, Tuple

from ..capacity.channel_mc import resolve_outage_curve
from ..capacity.errors import ConfigError
from ..capacity.harq_models import interarrival_pmf_from_outage
from ..capacity.renewal_core import InterarrivalPmf, effective_capacity_constant
from ..orchestrator.run_config import RunConfig
from .base_analyst import AnalysisReport, BaseAnalyst


class ConstantRewardAnalyst(BaseAnalyst):
    """Solves sum_k q_k zeta^k = exp(theta R) for every requested theta"""

    required_fields = ["theta", "zeta", "capacity", "lower", "upper", "approx", "ltat"]

    def __init__(self, config: Dict[str, Any], logger: Any):
        super().__init__("ConstantReward", config, logger)

    def analyze(self, run_config: RunConfig) -> AnalysisReport:
        pmf, reward = self._resolve_pmf(run_config)
        thetas = require_thetas(run_config)
        solver = self.section('solver')

        self.logger.info(f"Constant reward R={reward} over K={pmf.K}, {len(thetas)} theta value(s)")
        rows = []
        for theta in thetas:
            result = effective_capacity_constant(
                pmf, reward, theta,
                xtol=float(solver.get('xtol', 1e-12)),
                max_iter=int(solver.get('max_iter', 200)),
            )
            rows.append(result.to_row())
        return AnalysisReport(rows=rows)

    def _resolve_pmf(self, run_config: RunConfig) -> Tuple[InterarrivalPmf, float]:
        """Inline pmf, or the interarrival pmf of a fixed-rate HARQ scheme"""
        if run_config.pmf is not None:
            if run_config.reward is None:
                raise ConfigError("reward is required with an explicit pmf", key="reward")
            return run_config.pmf, run_config.reward

        if run_config.scheme is None:
            raise ConfigError("give a pmf or a fixed-rate HARQ scheme", key="pmf")
        harq = run_config.harq_config(self.section('harq'))
        if not harq.scheme.is_fixed_rate:
            raise ConfigError("interarrival pmf needs a fixed-rate scheme", key="scheme")
        curve = resolve_outage_curve(
            harq,
            self.samples(run_config),
            self.seed(run_config),
            block_size=int(self.section('monte_carlo').get('block_size', 8192)),
            workers=self.workers(run_config),
        )
        reward = run_config.reward if run_config.reward is not None else harq.rate
        return interarrival_pmf_from_outage(curve), reward


def require_thetas(run_config: RunConfig):
    if run_config.theta is None and run_config.theta_grid is None:
        raise ConfigError("theta or theta_grid is required", key="theta")
    return run_config.thetas(default=None)
