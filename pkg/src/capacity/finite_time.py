"""
Finite-time moment generating function phi(t) = E[exp(-theta S_t)].

Three routes compute the same quantity and check each other:

- enumeration over renewal count vectors (multinomial weights, tail factor)
- the homogeneous linear recursion phi(t) = sum_k a_k phi(t - k), t >= K
- the closed form over the roots of z^K - sum_k a_k z^(K-k)
"""

import logging
import math
from dataclasses import dataclass
from typing import List

import numpy as np
from scipy.special import gammaln, logsumexp

from .errors import CoincidentRoots, InvalidDistribution, TooLarge
from .renewal_core import _check_theta
from .reward_process import RewardTable, coefficients_a

logger = logging.getLogger(__name__)

DEFAULT_ENUMERATION_LIMIT = 10_000_000
DEFAULT_ROOT_SEPARATION = 1e-8
DEFAULT_IMAG_TOLERANCE = 1e-8


@dataclass(frozen=True, eq=False)
class PhiSeries:
    """phi(0..T) held in the log domain so long horizons never underflow"""

    theta: float
    log_values: np.ndarray

    @property
    def values(self) -> np.ndarray:
        return np.exp(self.log_values)

    @property
    def T(self) -> int:
        return len(self.log_values) - 1

    def __getitem__(self, t: int) -> float:
        return float(math.exp(self.log_values[t]))

    def capacity(self, t: int) -> float:
        """-ln phi(t) / (theta t)"""
        return float(-self.log_values[t] / (self.theta * t))

    def is_valid(self, slack: float = 1e-12) -> bool:
        """phi(0) = 1, 0 < phi <= 1 and non-increasing"""
        logs = self.log_values
        return bool(
            abs(logs[0]) <= slack
            and np.all(np.isfinite(logs))
            and np.all(logs <= slack)
            and np.all(np.diff(logs) <= slack)
        )


def phi_enumeration(
    table: RewardTable,
    theta: float,
    t: int,
    max_terms: int = DEFAULT_ENUMERATION_LIMIT,
) -> float:
    """
    Exact phi(t) by enumerating renewal count vectors.

    A count vector n_{k,s} contributes when the renewals end at t - tau with
    tau in [0, K - 1]; its weight is the multinomial coefficient times
    prod q^n exp(-theta n R) times Pr(X > tau).

    Raises:
        TooLarge: more than max_terms count vectors would be visited
    """
    theta = _check_theta(theta)
    if t < 0:
        raise InvalidDistribution("t must be non-negative")

    active = table.positive_entries()
    ks = [e.k for e in active]
    log_weights = [math.log(e.prob) - theta * e.reward for e in active]
    K = table.K
    tails = [table.tail(tau) for tau in range(K)]
    # log_factorial[n] = ln(n!)
    log_factorial = gammaln(np.arange(t + 2, dtype=float) + 1.0)

    terms: List[float] = []
    visited = 0

    def visit(i: int, budget: int, log_weight: float, renewals: int, log_denominator: float):
        nonlocal visited
        if i == len(ks):
            visited += 1
            if visited > max_terms:
                raise TooLarge(f"enumeration of phi({t}) exceeds {max_terms} count vectors")
            if budget < K:
                log_term = log_factorial[renewals] - log_denominator + log_weight
                terms.append(math.exp(log_term) * tails[budget])
            return
        k = ks[i]
        for n in range(budget // k + 1):
            visit(
                i + 1,
                budget - n * k,
                log_weight + n * log_weights[i],
                renewals + n,
                log_denominator + log_factorial[n],
            )

    visit(0, t, 0.0, 0, 0.0)
    return math.fsum(terms)


def phi_recursion(table: RewardTable, theta: float, T: int) -> PhiSeries:
    """
    phi(0..T) from the first-renewal decomposition.

    phi(t) = Pr(X > t) + sum_{k <= min(t, K)} a_k phi(t - k); for t >= K the
    tail vanishes and this is the homogeneous recursion.
    """
    theta = _check_theta(theta)
    if T < 0:
        raise InvalidDistribution("T must be non-negative")

    K = table.K
    with np.errstate(divide="ignore"):
        log_a = np.log(coefficients_a(table, theta))
        log_tail = np.log(np.array([table.tail(tau) for tau in range(K)]))

    log_phi = np.empty(T + 1)
    log_phi[0] = 0.0
    for t in range(1, T + 1):
        depth = min(t, K)
        # log_phi[t-1], ..., log_phi[t-depth] paired with a_1, ..., a_depth
        window = log_phi[t - depth:t][::-1]
        terms = log_a[:depth] + window
        if t < K:
            terms = np.append(terms, log_tail[t])
        log_phi[t] = logsumexp(terms)
    return PhiSeries(theta=theta, log_values=log_phi)


def companion_roots(a: np.ndarray) -> np.ndarray:
    """Roots of z^K - a_1 z^(K-1) - ... - a_K as companion-matrix eigenvalues"""
    K = len(a)
    companion = np.zeros((K, K))
    companion[0, :] = a
    if K > 1:
        companion[1:, :-1] = np.eye(K - 1)
    return np.linalg.eigvals(companion)


def dominant_root(table: RewardTable, theta: float) -> complex:
    """Largest-modulus characteristic root; its reciprocal is the spectral root zeta"""
    roots = companion_roots(coefficients_a(table, theta))
    return complex(roots[np.argmax(np.abs(roots))])


def _check_separation(roots: np.ndarray, separation: float):
    if len(roots) < 2:
        return
    gaps = np.abs(roots[:, None] - roots[None, :])
    np.fill_diagonal(gaps, np.inf)
    closest = float(gaps.min())
    if closest < separation:
        raise CoincidentRoots(f"characteristic roots only {closest:.3e} apart")


def _last_column(a: np.ndarray, roots: np.ndarray, t: int, l: int) -> np.ndarray:
    """w_i = sum_{k=l..K} a_k z_i^(t + l - k - 1)"""
    K = len(a)
    kappas = np.arange(l, K + 1)
    powers = np.power(roots[:, None], (t + l - kappas - 1)[None, :])
    return powers @ a[l - 1:].astype(complex)


def phi_determinant(
    table: RewardTable,
    theta: float,
    t: int,
    method: str = "residue",
    separation: float = DEFAULT_ROOT_SEPARATION,
    imag_tolerance: float = DEFAULT_IMAG_TOLERANCE,
) -> float:
    """
    phi(t) for t >= K from the K characteristic roots.

    method="residue" sums w_i / prod_{j != i}(z_i - z_j) over roots;
    method="determinant" evaluates det(B_l) / det(A) with A the Vandermonde
    matrix of the roots and B_l its copy whose last column is w. Both are
    weighted by the initial values phi(K - l), l = 1..K.

    Raises:
        CoincidentRoots: two roots closer than `separation`
    """
    theta = _check_theta(theta)
    K = table.K
    if t < K:
        raise InvalidDistribution(f"closed form needs t >= K = {K}, got {t}")
    if method not in ("residue", "determinant"):
        raise InvalidDistribution(f"unknown method {method!r}")

    a = coefficients_a(table, theta)
    roots = companion_roots(a)
    _check_separation(roots, separation)
    initial = phi_recursion(table, theta, K - 1).values

    if method == "residue":
        differences = roots[:, None] - roots[None, :]
        np.fill_diagonal(differences, 1.0)
        denominators = np.prod(differences, axis=1)
        total = 0j
        for l in range(1, K + 1):
            total += initial[K - l] * np.sum(_last_column(a, roots, t, l) / denominators)
    else:
        vandermonde = np.vander(roots, K, increasing=True)
        base = np.linalg.det(vandermonde)
        total = 0j
        for l in range(1, K + 1):
            replaced = vandermonde.copy()
            replaced[:, -1] = _last_column(a, roots, t, l)
            total += initial[K - l] * np.linalg.det(replaced) / base

    if abs(total.imag) > imag_tolerance * max(1.0, abs(total.real)):
        logger.warning(f"phi({t}) closed form left imaginary residue {total.imag:.3e}")
    return float(total.real)


def effective_capacity_finite(table: RewardTable, theta: float, t: int) -> float:
    """C_{e,t} = -ln phi(t) / (theta t)"""
    theta = _check_theta(theta)
    if theta == 0.0:
        raise InvalidDistribution("finite-time capacity needs theta > 0")
    if t < 1:
        raise InvalidDistribution("t must be at least 1")
    return phi_recursion(table, theta, t).capacity(t)
