"""
Effective capacity of renewal processes paying a constant reward per renewal.

The spectral root zeta solves sum_k q_k zeta^k = exp(theta R); the effective
capacity is ln(zeta) / theta. Roots are found on u = ln(zeta) so large
theta * R never overflows.
"""

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Dict, Mapping, Optional, Tuple

import numpy as np

from .errors import EvaluatorDiverged, InvalidDistribution
from .numerics import (
    DEFAULT_MAX_ITER,
    DEFAULT_XTOL,
    RootSolution,
    bisect_increasing,
    log_expectation,
)

PROB_TOLERANCE = 1e-9

CumulantEvaluator = Callable[[float], float]


@dataclass(frozen=True)
class InterarrivalPmf:
    """
    Pmf of the interarrival time on the integer lattice k = 0..K.

    Trailing zeros are trimmed so K is the true support maximum, and the
    probabilities are renormalized to sum to one exactly.
    """

    probs: Tuple[float, ...]

    def __post_init__(self):
        probs = np.asarray(self.probs, dtype=float).ravel()
        if probs.size == 0:
            raise InvalidDistribution("pmf must have at least one entry")
        if not np.all(np.isfinite(probs)) or np.any(probs < 0.0) or np.any(probs > 1.0):
            raise InvalidDistribution("pmf entries must lie in [0, 1]")
        total = math.fsum(probs)
        if abs(total - 1.0) > PROB_TOLERANCE:
            raise InvalidDistribution(f"pmf sums to {total!r}, expected 1")

        nonzero = np.flatnonzero(probs > 0.0)
        last = int(nonzero[-1])
        if last < 1:
            raise InvalidDistribution("pmf needs mass above k = 0 (E(X) > 0)")

        probs = probs[: last + 1] / total
        object.__setattr__(self, "probs", tuple(float(p) for p in probs))

    @classmethod
    def from_mapping(cls, mapping: Mapping[int, float]) -> "InterarrivalPmf":
        """Build from a sparse {k: probability} mapping"""
        if not mapping:
            raise InvalidDistribution("pmf mapping is empty")
        if any(int(k) != k or k < 0 for k in mapping):
            raise InvalidDistribution("interarrival values must be non-negative integers")
        probs = np.zeros(int(max(mapping)) + 1)
        for k, p in mapping.items():
            probs[int(k)] += p
        return cls(tuple(probs))

    @property
    def K(self) -> int:
        return len(self.probs) - 1

    def as_array(self) -> np.ndarray:
        return np.asarray(self.probs, dtype=float)

    def support(self) -> Tuple[np.ndarray, np.ndarray]:
        """Interarrival values and their probabilities where q_k > 0"""
        q = self.as_array()
        ks = np.flatnonzero(q > 0.0)
        return ks.astype(float), q[ks]

    def tail(self, tau: int) -> float:
        """Pr(X > tau)"""
        return math.fsum(self.probs[tau + 1:])

    def to_dict(self) -> Dict[int, float]:
        return {k: p for k, p in enumerate(self.probs) if p > 0.0}


@dataclass(frozen=True)
class EcResult:
    """Effective capacity together with its spectral root, bounds and limits"""

    theta: float
    zeta: float
    log_zeta: float
    capacity: float
    lower_bound: float
    upper_bound: float
    approx_small_theta: float
    ltat: float
    notes: Tuple[str, ...] = field(default_factory=tuple)

    def rescaled(self, factor: float) -> "EcResult":
        """
        Express the result in units that are `factor` lattice ticks long.

        Capacities, bounds and the approximation scale linearly, ln(zeta)
        picks up the same factor.
        """
        log_zeta = self.log_zeta * factor
        return replace(
            self,
            log_zeta=log_zeta,
            zeta=_safe_exp(log_zeta),
            capacity=self.capacity * factor,
            lower_bound=self.lower_bound * factor,
            upper_bound=self.upper_bound * factor,
            approx_small_theta=self.approx_small_theta * factor,
            ltat=self.ltat * factor,
        )

    def to_row(self) -> Dict[str, float]:
        return {
            "theta": self.theta,
            "zeta": self.zeta,
            "capacity": self.capacity,
            "lower": self.lower_bound,
            "upper": self.upper_bound,
            "approx": self.approx_small_theta,
            "ltat": self.ltat,
        }


def _safe_exp(x: float) -> float:
    return math.exp(x) if x < 709.0 else math.inf


def _check_theta(theta: float) -> float:
    theta = float(theta)
    if not math.isfinite(theta) or theta < 0.0:
        raise InvalidDistribution(f"theta must be finite and non-negative, got {theta!r}")
    return theta


def _check_reward(R: float) -> float:
    R = float(R)
    if not math.isfinite(R) or R < 0.0:
        raise InvalidDistribution(f"reward must be finite and non-negative, got {R!r}")
    return R


def pmf_moments(pmf: InterarrivalPmf) -> Tuple[float, float]:
    """Mean and variance of the interarrival time"""
    k = np.arange(len(pmf.probs), dtype=float)
    q = pmf.as_array()
    mean = math.fsum(k * q)
    variance = math.fsum(q * (k - mean) ** 2)
    return mean, variance


def _solve_log_zeta_constant(
    pmf: InterarrivalPmf,
    R: float,
    theta: float,
    xtol: float = DEFAULT_XTOL,
    max_iter: int = DEFAULT_MAX_ITER,
) -> RootSolution:
    if theta == 0.0 or R == 0.0:
        return RootSolution(root=0.0, iterations=0)

    ks, qs = pmf.support()
    mean, _ = pmf_moments(pmf)
    target = theta * R

    def excess(u: float) -> float:
        return log_expectation(qs, ks * u) - target

    # Jensen: ln E(e^{uX}) >= u E(X), so the root lies below theta R / E(X)
    return bisect_increasing(excess, 0.0, target / mean, xtol=xtol, max_iter=max_iter)


def solve_zeta_constant(
    pmf: InterarrivalPmf,
    R: float,
    theta: float,
    xtol: float = DEFAULT_XTOL,
    max_iter: int = DEFAULT_MAX_ITER,
) -> float:
    """
    Solve sum_k q_k zeta^k = exp(theta R) for zeta in [1, exp(theta R / E(X))].

    Raises:
        NonConvergence: bisection did not reach the tolerance in max_iter steps
    """
    theta = _check_theta(theta)
    R = _check_reward(R)
    solution = _solve_log_zeta_constant(pmf, R, theta, xtol=xtol, max_iter=max_iter)
    return _safe_exp(solution.root)


def approx_constant(pmf: InterarrivalPmf, R: float, theta: float) -> float:
    """Two-term small-theta expansion R/E(X) - theta R^2 Var(X) / (2 E(X)^3)"""
    mean, variance = pmf_moments(pmf)
    return R / mean - theta * R * R * variance / (2.0 * mean ** 3)


def bounds_constant(pmf: InterarrivalPmf, R: float, theta: float) -> Tuple[float, float]:
    """Lower bound R/K and upper bound min(R/K - ln q_K / (K theta), R/E(X))"""
    mean, _ = pmf_moments(pmf)
    K = pmf.K
    lower = R / K
    ltat = R / mean
    if theta <= 0.0:
        return lower, ltat
    q_K = pmf.probs[K]
    return lower, min(R / K - math.log(q_K) / (K * theta), ltat)


def effective_capacity_constant(
    pmf: InterarrivalPmf,
    R: float,
    theta: float,
    xtol: float = DEFAULT_XTOL,
    max_iter: int = DEFAULT_MAX_ITER,
) -> EcResult:
    """
    Effective capacity of a renewal process with constant reward R.

    theta = 0 returns the long-term average R / E(X) by continuity.
    """
    theta = _check_theta(theta)
    R = _check_reward(R)
    mean, _ = pmf_moments(pmf)
    ltat = R / mean
    lower, upper = bounds_constant(pmf, R, theta)
    approx = approx_constant(pmf, R, theta)

    if theta == 0.0:
        return EcResult(
            theta=0.0, zeta=1.0, log_zeta=0.0, capacity=ltat,
            lower_bound=lower, upper_bound=upper,
            approx_small_theta=approx, ltat=ltat,
        )

    solution = _solve_log_zeta_constant(pmf, R, theta, xtol=xtol, max_iter=max_iter)
    notes = ("bracket_expanded",) if solution.bracket_expanded else ()
    return EcResult(
        theta=theta,
        zeta=_safe_exp(solution.root),
        log_zeta=solution.root,
        capacity=solution.root / theta,
        lower_bound=lower,
        upper_bound=upper,
        approx_small_theta=approx,
        ltat=ltat,
        notes=notes,
    )


def _central_difference(func: CumulantEvaluator, step: float = 1e-6) -> float:
    return (func(step) - func(-step)) / (2.0 * step)


def solve_zeta_continuous(
    cumulant_evaluator: CumulantEvaluator,
    R: float,
    theta: float,
    mean: Optional[float] = None,
    xtol: float = DEFAULT_XTOL,
    max_iter: int = DEFAULT_MAX_ITER,
) -> float:
    """
    Solve E(zeta^X) = exp(theta R) for a continuous interarrival time.

    Args:
        cumulant_evaluator: u -> ln E(e^{uX}); return +inf beyond the
            abscissa of convergence
        mean: E(X); estimated from the evaluator by central difference if omitted

    Raises:
        EvaluatorDiverged: the evaluator is NaN on the bracket or infinite at the root
        NonConvergence: bisection budget exhausted
    """
    theta = _check_theta(theta)
    R = _check_reward(R)
    if theta == 0.0 or R == 0.0:
        return 1.0

    if mean is None:
        mean = _central_difference(cumulant_evaluator)
    if not math.isfinite(mean) or mean <= 0.0:
        raise EvaluatorDiverged(f"E(X) must be finite and positive, got {mean!r}")

    target = theta * R
    solution = bisect_increasing(
        lambda u: cumulant_evaluator(u) - target,
        0.0,
        target / mean,
        xtol=xtol,
        max_iter=max_iter,
    )
    if not math.isfinite(cumulant_evaluator(solution.root)):
        raise EvaluatorDiverged("moment generating function is infinite at the root")
    return _safe_exp(solution.root)


def effective_capacity_continuous(
    cumulant_evaluator: CumulantEvaluator,
    R: float,
    theta: float,
    mean: Optional[float] = None,
) -> float:
    """ln(zeta) / theta for a continuous interarrival time; R / E(X) at theta = 0"""
    if theta == 0.0:
        if mean is None:
            mean = _central_difference(cumulant_evaluator)
        return R / mean
    zeta = solve_zeta_continuous(cumulant_evaluator, R, theta, mean=mean)
    return math.log(zeta) / theta


def exponential_cumulant(lam: float) -> CumulantEvaluator:
    """Cumulant of Exp(lam): -ln(1 - u/lam), +inf for u >= lam"""
    if lam <= 0.0:
        raise InvalidDistribution("exponential rate must be positive")

    def evaluate(u: float) -> float:
        if u >= lam:
            return math.inf
        return -math.log1p(-u / lam)

    return evaluate


def point_mass_cumulant(c: float) -> CumulantEvaluator:
    if c <= 0.0:
        raise InvalidDistribution("point mass location must be positive")
    return lambda u: u * c


def pmf_cumulant(pmf: InterarrivalPmf) -> CumulantEvaluator:
    ks, qs = pmf.support()
    return lambda u: log_expectation(qs, ks * u)


def poisson_capacity(lam: float, R: float, theta: float) -> float:
    """Closed form lam (1 - exp(-theta R)) / theta for exponential interarrivals"""
    if theta == 0.0:
        return lam * R
    return -lam * math.expm1(-theta * R) / theta


def discretize_interarrival(dist, dx: float, tail_mass: float = 1e-12) -> InterarrivalPmf:
    """
    Discretize a continuous interarrival law onto ticks of width dx.

    Args:
        dist: frozen scipy.stats distribution with support on [0, inf)
        dx: tick width
        tail_mass: probability left beyond the last tick, folded into it

    Returns:
        Pmf of floor(X / dx)
    """
    if dx <= 0.0:
        raise InvalidDistribution("tick width must be positive")
    k_max = max(1, int(math.ceil(dist.isf(tail_mass) / dx)))
    edges = np.arange(k_max + 2, dtype=float) * dx
    probs = np.diff(dist.cdf(edges))
    probs[-1] += dist.sf(edges[-1])
    probs = np.clip(probs, 0.0, None)
    return InterarrivalPmf(tuple(probs / probs.sum()))

