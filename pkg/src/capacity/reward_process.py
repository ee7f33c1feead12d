"""
Effective capacity of renewal reward processes with state-dependent rewards.

Each renewal draws an interarrival k and a state s jointly with probability
q_{k,s} and pays reward R_{k,s}. The spectral root solves
sum_k a_k zeta^k = 1 with a_k = sum_s q_{k,s} exp(-theta R_{k,s}).
"""

import math
from dataclasses import dataclass
from typing import Callable, Iterable, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from .errors import EvaluatorDiverged, InvalidDistribution
from .numerics import (
    DEFAULT_MAX_EXPANSIONS,
    DEFAULT_MAX_ITER,
    DEFAULT_XTOL,
    RootSolution,
    bisect_increasing,
    log_expectation,
)
from .renewal_core import (
    PROB_TOLERANCE,
    EcResult,
    InterarrivalPmf,
    _check_theta,
    _safe_exp,
)

JointEvaluator = Callable[[float, float], float]


class RewardEntry(NamedTuple):
    k: int
    state: str
    prob: float
    reward: float


@dataclass(frozen=True)
class RewardTable:
    """
    Joint pmf of (interarrival, state) with a reward per entry.

    ticks_per_unit records how many lattice ticks make one natural time
    unit; capacities computed on the table are per tick.
    """

    entries: Tuple[RewardEntry, ...]
    ticks_per_unit: int = 1

    def __post_init__(self):
        entries = tuple(RewardEntry(int(e[0]), str(e[1]), float(e[2]), float(e[3])) for e in self.entries)
        if not entries:
            raise InvalidDistribution("reward table is empty")

        seen = set()
        for entry in entries:
            if entry.k < 1:
                raise InvalidDistribution(f"interarrival must be >= 1 tick, got {entry.k}")
            if not (0.0 <= entry.prob <= 1.0):
                raise InvalidDistribution(f"probability out of range for ({entry.k}, {entry.state})")
            if not math.isfinite(entry.reward) or entry.reward < 0.0:
                raise InvalidDistribution(f"reward must be finite and non-negative for ({entry.k}, {entry.state})")
            key = (entry.k, entry.state)
            if key in seen:
                raise InvalidDistribution(f"duplicate entry {key}")
            seen.add(key)

        total = math.fsum(e.prob for e in entries)
        if abs(total - 1.0) > PROB_TOLERANCE:
            raise InvalidDistribution(f"reward table probabilities sum to {total!r}, expected 1")
        if int(self.ticks_per_unit) < 1:
            raise InvalidDistribution("ticks_per_unit must be a positive integer")

        entries = tuple(e._replace(prob=e.prob / total) for e in entries)
        object.__setattr__(self, "entries", entries)
        object.__setattr__(self, "ticks_per_unit", int(self.ticks_per_unit))

    @classmethod
    def from_rows(cls, rows: Iterable[Sequence], ticks_per_unit: int = 1) -> "RewardTable":
        return cls(tuple(RewardEntry(*row) for row in rows), ticks_per_unit)

    @classmethod
    def from_pmf(cls, pmf: InterarrivalPmf, reward: float, state: str = "S") -> "RewardTable":
        """Constant-reward table with one state per interarrival value"""
        if pmf.probs[0] > 0.0:
            raise InvalidDistribution("reward tables need interarrival >= 1 (q_0 = 0)")
        return cls(tuple(
            RewardEntry(k, state, p, reward) for k, p in enumerate(pmf.probs) if p > 0.0
        ))

    @property
    def K(self) -> int:
        return max(e.k for e in self.entries if e.prob > 0.0)

    def positive_entries(self) -> List[RewardEntry]:
        return [e for e in self.entries if e.prob > 0.0]

    def support(self) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Interarrivals, probabilities and rewards of entries with q > 0"""
        active = self.positive_entries()
        ks = np.array([e.k for e in active], dtype=float)
        qs = np.array([e.prob for e in active], dtype=float)
        rs = np.array([e.reward for e in active], dtype=float)
        return ks, qs, rs

    def mean_interarrival(self) -> float:
        return math.fsum(e.k * e.prob for e in self.entries)

    def mean_reward(self) -> float:
        return math.fsum(e.reward * e.prob for e in self.entries)

    def interarrival_pmf(self) -> InterarrivalPmf:
        probs = np.zeros(self.K + 1)
        for e in self.positive_entries():
            probs[e.k] += e.prob
        return InterarrivalPmf(tuple(probs))

    def tail(self, tau: int) -> float:
        """Pr(X > tau)"""
        return math.fsum(e.prob for e in self.entries if e.k > tau)

    def to_rows(self) -> List[Tuple[int, str, float, float]]:
        return [tuple(e) for e in self.entries]


def coefficients_a(table: RewardTable, theta: float) -> np.ndarray:
    """a[kappa - 1] = sum_s q_{kappa,s} exp(-theta R_{kappa,s}) for kappa = 1..K"""
    theta = _check_theta(theta)
    ks, qs, rs = table.support()
    a = np.zeros(table.K)
    np.add.at(a, ks.astype(int) - 1, qs * np.exp(-theta * rs))
    return a


def _solve_log_zeta_variable(
    table: RewardTable,
    theta: float,
    xtol: float = DEFAULT_XTOL,
    max_iter: int = DEFAULT_MAX_ITER,
    max_expansions: int = DEFAULT_MAX_EXPANSIONS,
) -> RootSolution:
    ks, qs, rs = table.support()
    mean_reward = table.mean_reward()
    if theta == 0.0 or mean_reward == 0.0:
        return RootSolution(root=0.0, iterations=0)

    def log_g(u: float) -> float:
        return log_expectation(qs, ks * u - theta * rs)

    upper = theta * mean_reward / table.mean_interarrival()
    return bisect_increasing(
        log_g, 0.0, upper, xtol=xtol, max_iter=max_iter, max_expansions=max_expansions
    )


def solve_zeta_variable(
    table: RewardTable,
    theta: float,
    xtol: float = DEFAULT_XTOL,
    max_iter: int = DEFAULT_MAX_ITER,
) -> float:
    """
    Root zeta >= 1 of sum_k a_k zeta^k = 1.

    Returns exactly 1 when every reward is zero.

    Raises:
        NonConvergence: bisection or bracket expansion budget exhausted
    """
    theta = _check_theta(theta)
    return _safe_exp(_solve_log_zeta_variable(table, theta, xtol=xtol, max_iter=max_iter).root)


def ltat(table: RewardTable) -> float:
    """Long-term average throughput E(R) / E(X)"""
    return table.mean_reward() / table.mean_interarrival()


def approx_variable(table: RewardTable, theta: float) -> float:
    """E(R)/E(X) - theta E{(R E(X) - E(R) X)^2} / (2 E(X)^3)"""
    mean_x = table.mean_interarrival()
    mean_r = table.mean_reward()
    cross = math.fsum(
        e.prob * (e.reward * mean_x - mean_r * e.k) ** 2 for e in table.entries
    )
    return mean_r / mean_x - theta * cross / (2.0 * mean_x ** 3)


def minimum_reward_entry(table: RewardTable) -> RewardEntry:
    """Entry with the smallest reward among q > 0; ties go to smallest k, then insertion order"""
    active = table.positive_entries()
    order = sorted(range(len(active)), key=lambda i: (active[i].reward, active[i].k, i))
    return active[order[0]]


def bounds_variable(table: RewardTable, theta: float) -> Tuple[float, float]:
    """
    Bounds R_min / K <= C_e <= min(R_min / k_min - ln q_min / (k_min theta), LTAT).

    (k_min, s_min) is the entry carrying the smallest reward.
    """
    worst = minimum_reward_entry(table)
    lower = worst.reward / table.K
    average = ltat(table)
    if theta <= 0.0:
        return lower, average
    upper = worst.reward / worst.k - math.log(worst.prob) / (worst.k * theta)
    return lower, min(upper, average)


def effective_capacity_variable(
    table: RewardTable,
    theta: float,
    xtol: float = DEFAULT_XTOL,
    max_iter: int = DEFAULT_MAX_ITER,
) -> EcResult:
    """Effective capacity per lattice tick; LTAT at theta = 0"""
    theta = _check_theta(theta)
    average = ltat(table)
    lower, upper = bounds_variable(table, theta)
    approx = approx_variable(table, theta)

    if theta == 0.0:
        return EcResult(
            theta=0.0, zeta=1.0, log_zeta=0.0, capacity=average,
            lower_bound=lower, upper_bound=upper,
            approx_small_theta=approx, ltat=average,
        )

    solution = _solve_log_zeta_variable(table, theta, xtol=xtol, max_iter=max_iter)
    notes = ("bracket_expanded",) if solution.bracket_expanded else ()
    return EcResult(
        theta=theta,
        zeta=_safe_exp(solution.root),
        log_zeta=solution.root,
        capacity=solution.root / theta,
        lower_bound=lower,
        upper_bound=upper,
        approx_small_theta=approx,
        ltat=average,
        notes=notes,
    )


def solve_zeta_variable_continuous(
    joint_evaluator: JointEvaluator,
    theta: float,
    mean_interarrival: Optional[float] = None,
    mean_reward: Optional[float] = None,
    step: float = 1e-6,
) -> float:
    """
    Solve E(exp(-theta R) zeta^X) = 1 for a continuous renewal reward process.

    Args:
        joint_evaluator: (theta, u) -> ln E(exp(-theta R + u X))
        mean_interarrival, mean_reward: taken from central differences of the
            evaluator at the origin when omitted

    Raises:
        EvaluatorDiverged: NaN on the bracket, or infinite at the root
        NonConvergence: budget exhausted
    """
    theta = _check_theta(theta)
    if theta == 0.0:
        return 1.0

    if mean_interarrival is None:
        mean_interarrival = (joint_evaluator(0.0, step) - joint_evaluator(0.0, -step)) / (2.0 * step)
    if mean_reward is None:
        mean_reward = -(joint_evaluator(step, 0.0) - joint_evaluator(-step, 0.0)) / (2.0 * step)
    if not math.isfinite(mean_interarrival) or mean_interarrival <= 0.0:
        raise EvaluatorDiverged(f"E(X) must be finite and positive, got {mean_interarrival!r}")
    if not math.isfinite(mean_reward):
        raise EvaluatorDiverged("E(R) is not finite")
    if mean_reward <= 0.0:
        return 1.0

    solution = bisect_increasing(
        lambda u: joint_evaluator(theta, u),
        0.0,
        theta * mean_reward / mean_interarrival,
    )
    if not math.isfinite(joint_evaluator(theta, solution.root)):
        raise EvaluatorDiverged("joint moment generating function is infinite at the root")
    return _safe_exp(solution.root)


def table_joint_evaluator(table: RewardTable) -> JointEvaluator:
    """ln E(exp(-theta R + u X)) of a discrete table"""
    ks, qs, rs = table.support()
    return lambda theta, u: log_expectation(qs, ks * u - theta * rs)
