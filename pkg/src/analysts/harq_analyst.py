"""
HARQ analyst: maximum arrival rate or outage effective capacity of one scheme
over theta and SNR sweeps
"""

from typing import Any, Dict

from ..capacity.channel_mc import capacity_from_counts, simulate_counts
from ..capacity.errors import ConfigError, NeedsMonteCarlo
from ..capacity.harq_models import (
    ec_max_arrival,
    ec_outage,
    normalized_theta,
    outage_curve_closed_form,
)
from ..orchestrator.run_config import RunConfig
from .base_analyst import AnalysisReport, BaseAnalyst
from .constant_analyst import require_thetas


class HarqAnalyst(BaseAnalyst):
    """
    Capacity rows for a HARQ configuration.

    Closed-form outage curves are used where they exist; otherwise one
    Monte Carlo run per SNR feeds every theta, and the capacity stderr comes
    from the leave-one-batch-out jackknife.
    """

    required_fields = ["theta", "snr_db", "capacity", "capacity_stderr", "ltat", "lower", "upper"]

    def __init__(self, config: Dict[str, Any], logger: Any):
        super().__init__("HarqCapacity", config, logger)

    def analyze(self, run_config: RunConfig) -> AnalysisReport:
        harq_defaults = self.section('harq')
        mc = self.section('monte_carlo')
        base = run_config.harq_config(harq_defaults)
        mode = run_config.mode or "outage"
        if mode == "max-arrival" and not base.scheme.is_fixed_rate:
            raise ConfigError("max-arrival mode needs a fixed-rate scheme", key="mode")
        units = run_config.theta_units or harq_defaults.get('theta_units', 'normalized')
        thetas = require_thetas(run_config)
        capacity_of = ec_max_arrival if mode == "max-arrival" else ec_outage

        samples = self.samples(run_config)
        seed = self.seed(run_config)
        rows = []
        for snr_db in run_config.snrs(base.snr_db):
            config = base.with_snr(snr_db)
            try:
                curve = outage_curve_closed_form(config)
                counts = None
            except NeedsMonteCarlo:
                self.logger.info(f"{config.scheme.value} at {snr_db} dB: simulating {samples} episodes")
                counts = simulate_counts(
                    config, samples, seed,
                    batches=min(int(mc.get('jackknife_batches', 64)), samples),
                    block_size=int(mc.get('block_size', 8192)),
                    workers=self.workers(run_config),
                )

            for theta in thetas:
                scheme_theta = theta if units == "normalized" else normalized_theta(config, theta)
                if counts is None:
                    result, stderr = capacity_of(config, scheme_theta, curve), 0.0
                else:
                    result, stderr, curve = capacity_from_counts(config, scheme_theta, counts, mode=mode)
                row = {
                    "theta": theta,
                    "theta_normalized": scheme_theta,
                    "snr_db": snr_db,
                    "zeta": result.zeta,
                    "capacity": result.capacity,
                    "capacity_stderr": stderr,
                    "ltat": result.ltat,
                    "lower": result.lower_bound,
                    "upper": result.upper_bound,
                    "approx": result.approx_small_theta,
                }
                for k in range(1, curve.K + 1):
                    row[f"p{k}"] = curve.probs[k]
                for k in range(1, curve.K + 1):
                    row[f"p{k}_stderr"] = curve.stderr[k]
                rows.append(row)

        return AnalysisReport(rows=rows)
