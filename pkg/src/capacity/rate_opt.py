"""
Exhaustive rate search maximizing the outage effective capacity per scheme.

All grid points share one set of channel draws (common random numbers).
A coarse pass ranks every point; the top fraction is re-evaluated on a
longer run that extends the same episode sequence.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from itertools import product
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .channel_mc import (
    DEFAULT_BLOCK_SIZE,
    DEFAULT_JACKKNIFE_BATCHES,
    capacity_from_counts,
    count_outcomes,
    draw_gains,
)
from .errors import GridTooLarge, InvalidDistribution
from .harq_models import HarqConfig, HarqScheme, ec_outage, outage_curve_closed_form

logger = logging.getLogger(__name__)

DEFAULT_THETA = 1e-3
DEFAULT_MAX_POINTS = 1_000_000
DEFAULT_REFINE_FACTOR = 10
DEFAULT_TOP_FRACTION = 0.1


def _rate_steps(start: float, stop: float, step: float = 0.25) -> Tuple[float, ...]:
    count = int(round((stop - start) / step)) + 1
    return tuple(start + step * i for i in range(count))


@dataclass(frozen=True)
class RateGrid:
    """Candidate first-round rates and candidate rates for rounds 2..K"""

    initial: Tuple[float, ...]
    subsequent: Tuple[float, ...] = field(default_factory=tuple)

    def __post_init__(self):
        initial = tuple(float(r) for r in self.initial)
        subsequent = tuple(float(r) for r in self.subsequent)
        if not initial:
            raise InvalidDistribution("rate grid needs at least one initial rate")
        for name, values in (("initial", initial), ("subsequent", subsequent)):
            if any(b <= a for a, b in zip(values, values[1:])):
                raise InvalidDistribution(f"{name} rates must be strictly increasing")
            if any(v < 0.0 for v in values):
                raise InvalidDistribution(f"{name} rates must be non-negative")
        if initial[0] <= 0.0:
            raise InvalidDistribution("initial rates must be positive")
        object.__setattr__(self, "initial", initial)
        object.__setattr__(self, "subsequent", subsequent)

    def size(self, scheme: HarqScheme, max_rounds: int) -> int:
        if scheme.is_fixed_rate:
            return len(self.initial)
        return len(self.initial) * len(self.subsequent) ** (max_rounds - 1)

    def points(self, scheme: HarqScheme, max_rounds: int) -> List[Tuple[float, ...]]:
        if scheme.is_fixed_rate:
            return [(r,) for r in self.initial]
        return list(product(self.initial, *([self.subsequent] * (max_rounds - 1))))


def default_grid(scheme) -> RateGrid:
    """{1.5, 1.75, ..., 3.75}; XP rounds 2..K also allow {0, 0.25, ..., 3.75}"""
    scheme = HarqScheme.parse(scheme)
    initial = _rate_steps(1.5, 3.75)
    if scheme == HarqScheme.XP:
        return RateGrid(initial, _rate_steps(0.0, 3.75))
    if scheme == HarqScheme.VR:
        return RateGrid(initial, initial)
    return RateGrid(initial)


def scheme_theta(scheme: HarqScheme, rates: Sequence[float], packet_theta: float) -> float:
    """
    Map b*theta onto the scheme's normalized exponent.

    FR and XP normalize by the round length L = b / R_1, VR by b.
    """
    if scheme == HarqScheme.VR:
        return packet_theta
    return packet_theta / rates[0]


@dataclass(frozen=True)
class GridPoint:
    rates: Tuple[float, ...]
    capacity: float
    stderr: float
    samples: int
    refined: bool = False


@dataclass(frozen=True)
class OptimizationResult:
    scheme: HarqScheme
    best_rates: Tuple[float, ...]
    best_capacity: float
    best_stderr: float
    points: Tuple[GridPoint, ...]
    theta: float
    seed: int


def _best(points: Sequence[GridPoint]) -> GridPoint:
    return min(points, key=lambda p: (-p.capacity, p.rates))


def optimize_rates(
    scheme,
    grid: RateGrid,
    template: HarqConfig,
    theta: float = DEFAULT_THETA,
    samples: int = 20_000,
    seed: int = 42,
    refine_factor: int = DEFAULT_REFINE_FACTOR,
    top_fraction: float = DEFAULT_TOP_FRACTION,
    max_points: int = DEFAULT_MAX_POINTS,
    batches: int = DEFAULT_JACKKNIFE_BATCHES,
    block_size: int = DEFAULT_BLOCK_SIZE,
    workers: int = 1,
) -> OptimizationResult:
    """
    Grid search for the rate vector with the largest outage effective capacity.

    Args:
        theta: packet-normalized exponent b*theta, shared by all schemes
        template: supplies max_rounds, SNR and fading; its rates are ignored
        refine_factor: episode multiplier for the second stage (1 disables it)

    Raises:
        GridTooLarge: the grid has more than max_points points
    """
    scheme = HarqScheme.parse(scheme)
    K = template.max_rounds
    size = grid.size(scheme, K)
    if size > max_points:
        raise GridTooLarge(f"{size} grid points exceed the limit of {max_points}")
    candidates = grid.points(scheme, K)
    base = replace(template, scheme=scheme, rates=candidates[0], symbols_per_round=None)

    closed_form = scheme in (HarqScheme.TYPE_I, HarqScheme.CC) and base.is_iid
    logger.info(f"Searching {size} {scheme.value} rate vectors (closed form: {closed_form})")

    def evaluate(rates: Tuple[float, ...], gains: Optional[np.ndarray]) -> GridPoint:
        config = base.with_rates(rates)
        point_theta = scheme_theta(scheme, rates, theta)
        if gains is None:
            result = ec_outage(config, point_theta, outage_curve_closed_form(config))
            return GridPoint(rates, result.capacity, 0.0, 0)
        counts = count_outcomes(config, gains, batches=min(batches, len(gains)))
        result, stderr, _ = capacity_from_counts(config, point_theta, counts)
        return GridPoint(rates, result.capacity, stderr, len(gains))

    def sweep(rate_vectors: Sequence[Tuple[float, ...]], gains: Optional[np.ndarray]) -> List[GridPoint]:
        if workers <= 1:
            return [evaluate(r, gains) for r in rate_vectors]
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(lambda r: evaluate(r, gains), rate_vectors))

    coarse_gains = None if closed_form else draw_gains(base, samples, seed, block_size, workers)
    points = sweep(candidates, coarse_gains)

    if not closed_form and refine_factor > 1:
        ranked = sorted(points, key=lambda p: (-p.capacity, p.rates))
        top = ranked[: max(1, math.ceil(top_fraction * len(ranked)))]
        fine_gains = draw_gains(base, samples * refine_factor, seed, block_size, workers)
        refined = {p.rates: replace(p, refined=True) for p in sweep([p.rates for p in top], fine_gains)}
        points = [refined.get(p.rates, p) for p in points]
        winner = _best(list(refined.values()))
    else:
        winner = _best(points)

    logger.info(f"Best {scheme.value} rates {winner.rates} -> {winner.capacity:.6f} bits/symbol")
    return OptimizationResult(
        scheme=scheme,
        best_rates=winner.rates,
        best_capacity=winner.capacity,
        best_stderr=winner.stderr,
        points=tuple(points),
        theta=theta,
        seed=seed,
    )
