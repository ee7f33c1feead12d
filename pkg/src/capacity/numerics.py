"""
Shared numerical helpers: log-domain expectations and bracketed bisection.
"""

import logging
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.optimize import bisect
from scipy.special import logsumexp

from .errors import EvaluatorDiverged, NonConvergence

logger = logging.getLogger(__name__)

DEFAULT_XTOL = 1e-12
DEFAULT_MAX_ITER = 200
DEFAULT_MAX_EXPANSIONS = 60


@dataclass(frozen=True)
class RootSolution:
    """Root of an increasing scalar function with solver diagnostics"""

    root: float
    iterations: int
    expansions: int = 0

    @property
    def bracket_expanded(self) -> bool:
        return self.expansions > 0


def log_expectation(probs: np.ndarray, exponents: np.ndarray) -> float:
    """
    Compute ln sum(q * exp(x)) for probabilities summing to one.

    Small exponents go through log1p/expm1 so values close to zero keep
    their relative precision; large ones fall back to logsumexp.
    """
    probs = np.asarray(probs, dtype=float)
    exponents = np.asarray(exponents, dtype=float)
    if exponents.size == 0:
        return -math.inf
    if np.max(exponents) < 1.0 and np.min(exponents) > -1.0:
        return float(np.log1p(np.dot(probs, np.expm1(exponents))))
    return float(logsumexp(exponents, b=probs))


def bisect_increasing(
    func: Callable[[float], float],
    lower: float,
    upper: float,
    xtol: float = DEFAULT_XTOL,
    max_iter: int = DEFAULT_MAX_ITER,
    max_expansions: int = DEFAULT_MAX_EXPANSIONS,
) -> RootSolution:
    """
    Find the zero of a non-decreasing function on [lower, upper].

    The upper end is pushed outwards by doubling its distance from the lower
    end while the function is still negative there. The tolerance is capped
    relative to the bracket width so tiny brackets still resolve many digits.
    """

    def checked(x: float) -> float:
        value = func(x)
        if math.isnan(value):
            raise EvaluatorDiverged(f"evaluator returned NaN at {x!r}")
        return value

    f_lower = checked(lower)
    if f_lower >= 0.0:
        return RootSolution(root=lower, iterations=0)

    expansions = 0
    while checked(upper) < 0.0:
        if expansions >= max_expansions:
            raise NonConvergence(
                f"bracket [{lower}, {upper}] still below zero after {expansions} expansions"
            )
        upper = lower + 2.0 * (upper - lower)
        expansions += 1
    if expansions:
        logger.debug(f"Bracket expanded {expansions} times to upper={upper!r}")

    tol = max(xtol * min(1.0, upper - lower), 1e-300)
    try:
        root, info = bisect(checked, lower, upper, xtol=tol, maxiter=max_iter, full_output=True)
    except RuntimeError as exc:
        raise NonConvergence(str(exc)) from exc
    return RootSolution(root=float(root), iterations=int(info.iterations), expansions=expansions)
