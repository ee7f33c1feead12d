"""
Rate analyst: exhaustive rate-grid search for one scheme
"""

from dataclasses import replace
from typing import Any, Dict

from ..capacity.harq_models import HarqScheme
from ..capacity.rate_opt import RateGrid, default_grid, optimize_rates
from ..orchestrator.run_config import RunConfig
from .base_analyst import AnalysisReport, BaseAnalyst


class RateOptimizerAnalyst(BaseAnalyst):
    """Emits every grid point followed by one argmax row"""

    required_fields = ["row_type", "capacity", "stderr"]

    def __init__(self, config: Dict[str, Any], logger: Any):
        super().__init__("RateOptimizer", config, logger)

    def analyze(self, run_config: RunConfig) -> AnalysisReport:
        settings = self.section('optimize')
        mc = self.section('monte_carlo')
        harq_defaults = self.section('harq')

        scheme = HarqScheme.parse(run_config.scheme or harq_defaults.get('scheme', 'cc'))
        max_rounds = run_config.max_rounds or int(settings.get('max_rounds', 2))
        template = replace(
            run_config, scheme=scheme.value, max_rounds=max_rounds, rates=None
        ).harq_config(harq_defaults)

        grid = default_grid(scheme)
        if run_config.grid is not None:
            grid = RateGrid(
                run_config.grid.get('initial', grid.initial),
                run_config.grid.get('subsequent', grid.subsequent),
            )

        result = optimize_rates(
            scheme,
            grid,
            template,
            theta=run_config.theta if run_config.theta is not None else float(settings.get('theta', 1e-3)),
            samples=run_config.samples or int(settings.get('samples', 20000)),
            seed=self.seed(run_config),
            refine_factor=run_config.refine_factor or int(settings.get('refine_factor', 10)),
            top_fraction=float(settings.get('top_fraction', 0.1)),
            max_points=int(settings.get('max_grid_points', 1_000_000)),
            batches=int(settings.get('jackknife_batches', 16)),
            block_size=int(mc.get('block_size', 8192)),
            workers=self.workers(run_config),
        )

        rows = []
        for point in result.points:
            rows.append(self._row("grid", scheme, point.rates, point.capacity, point.stderr,
                                  point.samples, point.refined))
        rows.append(self._row("argmax", scheme, result.best_rates, result.best_capacity,
                              result.best_stderr, None, True))
        return AnalysisReport(rows=rows)

    @staticmethod
    def _row(row_type, scheme, rates, capacity, stderr, samples, refined) -> Dict[str, Any]:
        row = {"row_type": row_type, "scheme": scheme.value}
        for l, rate in enumerate(rates, start=1):
            row[f"r{l}"] = rate
        row.update({"capacity": capacity, "stderr": stderr, "samples": samples, "refined": refined})
        return row
