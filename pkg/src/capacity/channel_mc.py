"""
Seeded Monte Carlo engine for HARQ episodes and renewal reward paths.

Episodes are generated in fixed-size blocks. Block b draws from a Philox
stream keyed by SeedSequence(seed, spawn_key=(b,)), so the channel gains of
episode i depend only on (seed, i) and never on how blocks are spread over
workers. Block partial sums are combined in block order with math.fsum.
"""

import logging
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Dict, List, NamedTuple, Optional, Tuple

import numpy as np

from .errors import InvalidDistribution, NeedsMonteCarlo, VarianceWarning
from .harq_models import (
    HarqConfig,
    HarqScheme,
    OutageCurve,
    ec_max_arrival,
    ec_outage,
    outage_curve_closed_form,
    reward_table_outage,
)
from .renewal_core import EcResult
from .reward_process import RewardTable

logger = logging.getLogger(__name__)

DEFAULT_BLOCK_SIZE = 8192
DEFAULT_PATH_BLOCK_SIZE = 4096
DEFAULT_JACKKNIFE_BATCHES = 64
DEFAULT_VARIANCE_RATIO = 0.1

LN2 = math.log(2.0)


class EpisodeOutcome(NamedTuple):
    rounds_used: int
    success: bool
    accumulated_information: Tuple[float, ...]


@dataclass(frozen=True)
class McEstimate:
    """Sample mean with its standard error"""

    mean: float
    stderr: float
    n: int
    seed: int
    high_variance: bool = False


@dataclass(frozen=True)
class CapacityEstimate:
    """Capacity from an estimated table; stderr from a leave-one-batch-out jackknife"""

    result: EcResult
    stderr: float
    curve: OutageCurve
    samples: int
    seed: int


def block_generator(seed: int, block: int) -> np.random.Generator:
    """Counter-style stream for one block of episodes"""
    if seed < 0:
        raise InvalidDistribution("seed must be non-negative")
    return np.random.Generator(
        np.random.Philox(np.random.SeedSequence(entropy=seed, spawn_key=(block,)))
    )


def _draw_gains(config: HarqConfig, rng: np.random.Generator, size: int) -> np.ndarray:
    """Received SNR per round, shape (size, K); one column of draws per round"""
    gains = np.empty((size, config.max_rounds))
    for l, fading in enumerate(config.fading):
        if fading.m == 1.0:
            gains[:, l] = -np.log1p(-rng.random(size)) * fading.omega
        else:
            gains[:, l] = rng.gamma(fading.m, fading.omega / fading.m, size)
    return gains * config.snr_linear


def _decoding_metric(config: HarqConfig, gains: np.ndarray) -> np.ndarray:
    """Accumulated information after each round, in the scheme's decoding units"""
    information = np.log1p(gains) / LN2
    scheme = config.scheme
    if scheme == HarqScheme.TYPE_I:
        return np.maximum.accumulate(information, axis=1)
    if scheme == HarqScheme.CC:
        return np.log1p(np.cumsum(gains, axis=1)) / LN2
    if scheme == HarqScheme.VR:
        return np.cumsum(information / np.asarray(config.rates), axis=1)
    return np.cumsum(information, axis=1)


def _decoded(config: HarqConfig, metric: np.ndarray) -> np.ndarray:
    scheme = config.scheme
    if scheme.is_fixed_rate:
        return metric > config.rate
    if scheme == HarqScheme.VR:
        return metric >= 1.0
    return metric >= np.cumsum(config.rates)


def decode(config: HarqConfig, gains: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """
    First decoding round of each episode.

    Returns:
        (rounds_used, success); failed episodes use all K rounds
    """
    decoded = _decoded(config, _decoding_metric(config, gains))
    success = decoded.any(axis=1)
    first = np.argmax(decoded, axis=1) + 1
    return np.where(success, first, config.max_rounds), success


def sample_episode(config: HarqConfig, stream: np.random.Generator) -> EpisodeOutcome:
    """Simulate one episode; always consumes K channel draws"""
    gains = _draw_gains(config, stream, 1)
    metric = _decoding_metric(config, gains)
    rounds, success = decode(config, gains)
    return EpisodeOutcome(
        rounds_used=int(rounds[0]),
        success=bool(success[0]),
        accumulated_information=tuple(float(x) for x in metric[0]),
    )


def _run_blocks(func: Callable[[int], object], blocks: int, workers: int) -> List:
    if workers <= 1 or blocks <= 1:
        return [func(b) for b in range(blocks)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, range(blocks)))


def _block_bounds(block: int, n: int, block_size: int) -> Tuple[int, int]:
    return block * block_size, min((block + 1) * block_size, n)


def draw_gains(
    config: HarqConfig,
    n: int,
    seed: int,
    block_size: int = DEFAULT_BLOCK_SIZE,
    workers: int = 1,
) -> np.ndarray:
    """Channel gains of episodes 0..n-1; identical for any config sharing fading and SNR"""
    blocks = -(-n // block_size)

    def one(block: int) -> np.ndarray:
        start, stop = _block_bounds(block, n, block_size)
        return _draw_gains(config, block_generator(seed, block), block_size)[: stop - start]

    return np.concatenate(_run_blocks(one, blocks, workers), axis=0)


def count_outcomes(
    config: HarqConfig, gains: np.ndarray, batches: int = 1, offset: int = 0, n: Optional[int] = None
) -> np.ndarray:
    """
    Outcome counts, shape (batches, K + 1).

    Column k - 1 counts first successes at round k and column K counts
    failures. Episode i (global index offset + row) falls in batch
    i * batches // n.
    """
    K = config.max_rounds
    n = len(gains) if n is None else n
    rounds, success = decode(config, gains)
    category = np.where(success, rounds - 1, K)
    batch = (np.arange(offset, offset + len(gains)) * batches) // n
    counts = np.zeros((batches, K + 1), dtype=np.int64)
    np.add.at(counts, (batch, category), 1)
    return counts


def simulate_counts(
    config: HarqConfig,
    n: int,
    seed: int,
    batches: int = 1,
    block_size: int = DEFAULT_BLOCK_SIZE,
    workers: int = 1,
) -> np.ndarray:
    """Outcome counts of n episodes, generated block by block"""
    if n < 1:
        raise InvalidDistribution("need at least one episode")
    blocks = -(-n // block_size)

    def one(block: int) -> np.ndarray:
        start, stop = _block_bounds(block, n, block_size)
        gains = _draw_gains(config, block_generator(seed, block), block_size)[: stop - start]
        return count_outcomes(config, gains, batches=batches, offset=start, n=n)

    return np.sum(_run_blocks(one, blocks, workers), axis=0)


def curve_from_counts(counts: np.ndarray, n: int) -> OutageCurve:
    """Outage curve implied by outcome counts of n episodes"""
    K = len(counts) - 1
    still_failing = n - np.concatenate(([0], np.cumsum(counts[:K])))
    probs = still_failing / n
    stderr = np.sqrt(probs * (1.0 - probs) / n)
    return OutageCurve(tuple(probs), tuple(stderr))


def estimate_outage_curve(
    config: HarqConfig,
    n: int,
    seed: int,
    block_size: int = DEFAULT_BLOCK_SIZE,
    workers: int = 1,
) -> OutageCurve:
    counts = simulate_counts(config, n, seed, block_size=block_size, workers=workers)
    return curve_from_counts(counts[0], n)


def estimate_reward_table(
    config: HarqConfig,
    n: int,
    seed: int,
    block_size: int = DEFAULT_BLOCK_SIZE,
    workers: int = 1,
) -> Tuple[RewardTable, Dict[Tuple[int, str], float]]:
    """
    Reward table from episode frequencies, with a binomial stderr per entry.

    The implied outage curve is monotone because every episode has a single
    first-success round.
    """
    curve = estimate_outage_curve(config, n, seed, block_size=block_size, workers=workers)
    table = reward_table_outage(curve, config.rates, config.scheme)
    stderr = {
        (e.k, e.state): math.sqrt(e.prob * (1.0 - e.prob) / n) for e in table.entries
    }
    return table, stderr


def resolve_outage_curve(
    config: HarqConfig,
    samples: int,
    seed: int,
    block_size: int = DEFAULT_BLOCK_SIZE,
    workers: int = 1,
) -> OutageCurve:
    """Closed-form curve where one exists, Monte Carlo otherwise"""
    try:
        return outage_curve_closed_form(config)
    except NeedsMonteCarlo:
        logger.debug(f"Estimating {config.scheme.value} outage from {samples} episodes")
        return estimate_outage_curve(config, samples, seed, block_size=block_size, workers=workers)


def capacity_from_counts(
    config: HarqConfig, theta: float, counts: np.ndarray, mode: str = "outage"
) -> Tuple[EcResult, float, OutageCurve]:
    """
    Capacity of the pooled counts plus its jackknife standard error.

    counts has one row per batch; each batch is left out once.
    """
    capacity_of = ec_max_arrival if mode == "max-arrival" else ec_outage
    total = counts.sum(axis=0)
    n = int(total.sum())
    curve = curve_from_counts(total, n)
    result = capacity_of(config, theta, curve)

    leave_one_out = []
    for row in counts:
        remaining = n - int(row.sum())
        if remaining > 0 and row.sum() > 0:
            loo_curve = curve_from_counts(total - row, remaining)
            leave_one_out.append(capacity_of(config, theta, loo_curve).capacity)
    groups = len(leave_one_out)
    if groups < 2:
        return result, 0.0, curve
    values = np.asarray(leave_one_out)
    stderr = math.sqrt((groups - 1) / groups * math.fsum((values - values.mean()) ** 2))
    return result, stderr, curve


def estimate_capacity(
    config: HarqConfig,
    theta: float,
    samples: int,
    seed: int,
    mode: str = "outage",
    batches: int = DEFAULT_JACKKNIFE_BATCHES,
    block_size: int = DEFAULT_BLOCK_SIZE,
    workers: int = 1,
) -> CapacityEstimate:
    """Capacity from a Monte Carlo outage curve with a jackknife stderr"""
    counts = simulate_counts(
        config, samples, seed, batches=min(batches, samples), block_size=block_size, workers=workers
    )
    result, stderr, curve = capacity_from_counts(config, theta, counts, mode=mode)
    return CapacityEstimate(result=result, stderr=stderr, curve=curve, samples=samples, seed=seed)


def _path_block_moments(
    table: RewardTable, theta: float, t: int, seed: int, block: int, size: int, block_size: int
) -> Tuple[int, float, float]:
    ks, qs, rs = table.support()
    cdf = np.cumsum(qs)
    rng = block_generator(seed, block)
    elapsed = np.zeros(block_size)
    rewards = np.zeros(block_size)

    # every renewal lasts at least one tick, so t draws always cover [0, t]
    for _ in range(t):
        picks = np.minimum(np.searchsorted(cdf, rng.random(block_size), side="right"), len(qs) - 1)
        elapsed += ks[picks]
        rewards += np.where(elapsed <= t, rs[picks], 0.0)
        if elapsed.min() > t:
            break

    values = np.exp(-theta * rewards[:size])
    block_sum = float(np.sum(values))
    block_mean = block_sum / size
    return size, block_sum, float(np.sum((values - block_mean) ** 2))


def estimate_mgf_finite(
    table: RewardTable,
    theta: float,
    t: int,
    n: int,
    seed: int,
    block_size: int = DEFAULT_PATH_BLOCK_SIZE,
    workers: int = 1,
    variance_ratio: float = DEFAULT_VARIANCE_RATIO,
) -> McEstimate:
    """
    Estimate phi(t) = E[exp(-theta S_t)] by simulating renewal paths.

    Only renewals completed by time t pay their reward. The estimate is
    flagged (and a VarianceWarning issued) when stderr / mean exceeds
    variance_ratio.
    """
    if t < 1:
        raise InvalidDistribution("t must be at least 1")
    if n < 1:
        raise InvalidDistribution("need at least one path")
    blocks = -(-n // block_size)

    def one(block: int) -> Tuple[int, float, float]:
        start, stop = _block_bounds(block, n, block_size)
        return _path_block_moments(table, theta, t, seed, block, stop - start, block_size)

    parts = _run_blocks(one, blocks, workers)
    mean = math.fsum(p[1] for p in parts) / n
    squares = math.fsum(m2 + size * (total / size - mean) ** 2 for size, total, m2 in parts)
    stderr = math.sqrt(squares / (n - 1) / n) if n > 1 else 0.0

    high_variance = mean <= 0.0 or stderr / mean > variance_ratio
    if high_variance:
        message = f"phi({t}) estimate has relative stderr {stderr / mean if mean > 0 else math.inf:.3g}"
        logger.warning(message)
        warnings.warn(message, VarianceWarning, stacklevel=2)
    return McEstimate(mean=mean, stderr=stderr, n=n, seed=seed, high_variance=high_variance)


def finite_capacity_from_mgf(estimate: McEstimate, theta: float, t: int) -> Tuple[float, float]:
    """-ln(phi) / (theta t) with its delta-method standard error"""
    scale = theta * t
    return -math.log(estimate.mean) / scale, estimate.stderr / (estimate.mean * scale)
