"""
HARQ schemes mapped onto renewal reward processes.

Fixed-rate schemes (Type I, CC, IR) run on a lattice of one HARQ round and
pay rate R per delivered packet. VR places the cumulative subcodeword
lengths sum_l 1/R_l on a rational lattice and pays one packet. XP runs on
rounds and pays the bits added up to the decoding round.

Capacities are in bits/symbol. The theta accepted here is the scheme's
normalized exponent: L*theta for FR and XP, b*theta for VR. Use
normalized_theta() to convert a per-bit exponent.
"""

import logging
import math
from dataclasses import dataclass, field, replace
from enum import Enum
from fractions import Fraction
from itertools import accumulate
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.special import gammainc, logsumexp

from .errors import InvalidDistribution, LatticeError, NeedsMonteCarlo
from .renewal_core import EcResult, InterarrivalPmf, effective_capacity_constant
from .reward_process import RewardEntry, RewardTable, effective_capacity_variable

logger = logging.getLogger(__name__)

MONOTONE_SLACK = 1e-12


class HarqScheme(str, Enum):
    TYPE_I = "typei"
    CC = "cc"
    IR = "ir"
    VR = "vr"
    XP = "xp"

    @classmethod
    def parse(cls, value) -> "HarqScheme":
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower().replace("-", "").replace("_", "")
        for scheme in cls:
            if scheme.value == key:
                return scheme
        raise InvalidDistribution(f"unknown HARQ scheme {value!r}", key="scheme")

    @property
    def is_fixed_rate(self) -> bool:
        return self in (HarqScheme.TYPE_I, HarqScheme.CC, HarqScheme.IR)


@dataclass(frozen=True)
class FadingRound:
    """Nakagami-m fading of one round with spread omega"""

    m: float = 1.0
    omega: float = 1.0


@dataclass(frozen=True)
class HarqConfig:
    """
    One truncated HARQ configuration.

    rates holds a single rate for fixed-rate schemes and one rate per round
    for VR and XP. An empty fading tuple means i.i.d. Rayleigh; a single
    entry is repeated for every round.
    """

    scheme: HarqScheme
    max_rounds: int
    rates: Tuple[float, ...]
    snr_db: float = 20.0
    fading: Tuple[FadingRound, ...] = field(default_factory=tuple)
    packet_bits: Optional[int] = None
    symbols_per_round: Optional[int] = None

    def __post_init__(self):
        scheme = HarqScheme.parse(self.scheme)
        K = int(self.max_rounds)
        if K < 1:
            raise InvalidDistribution("max_rounds must be at least 1", key="max_rounds")
        rates = tuple(float(r) for r in np.atleast_1d(self.rates))

        expected = 1 if scheme.is_fixed_rate else K
        if len(rates) != expected:
            raise InvalidDistribution(
                f"{scheme.value} needs {expected} rate(s), got {len(rates)}", key="rates"
            )
        if not all(math.isfinite(r) for r in rates):
            raise InvalidDistribution("rates must be finite", key="rates")
        if scheme == HarqScheme.XP:
            if rates[0] <= 0.0 or any(r < 0.0 for r in rates[1:]):
                raise InvalidDistribution("XP needs a positive first rate and non-negative later rates", key="rates")
        elif any(r <= 0.0 for r in rates):
            raise InvalidDistribution("rates must be positive", key="rates")

        fading = tuple(
            f if isinstance(f, FadingRound) else FadingRound(*f) for f in self.fading
        ) or (FadingRound(),)
        if len(fading) == 1:
            fading = fading * K
        if len(fading) != K:
            raise InvalidDistribution(f"fading needs {K} rounds, got {len(fading)}", key="fading")
        for f in fading:
            if f.m < 0.5 or f.omega <= 0.0:
                raise InvalidDistribution("Nakagami m must be >= 0.5 and omega positive", key="fading")
        if not math.isfinite(float(self.snr_db)):
            raise InvalidDistribution("snr_db must be finite", key="snr_db")

        if (
            scheme.is_fixed_rate
            and self.packet_bits is not None
            and self.symbols_per_round is not None
            and abs(self.packet_bits - rates[0] * self.symbols_per_round) > 1e-9
        ):
            raise InvalidDistribution("packet_bits must equal rate * symbols_per_round", key="packet_bits")

        object.__setattr__(self, "scheme", scheme)
        object.__setattr__(self, "max_rounds", K)
        object.__setattr__(self, "rates", rates)
        object.__setattr__(self, "snr_db", float(self.snr_db))
        object.__setattr__(self, "fading", fading)

    @property
    def snr_linear(self) -> float:
        return 10.0 ** (self.snr_db / 10.0)

    @property
    def rate(self) -> float:
        """First-round rate; the only rate of fixed-rate schemes"""
        return self.rates[0]

    @property
    def is_iid(self) -> bool:
        return len(set(self.fading)) == 1

    def with_rates(self, rates: Sequence[float]) -> "HarqConfig":
        return replace(self, rates=tuple(rates))

    def with_snr(self, snr_db: float) -> "HarqConfig":
        return replace(self, snr_db=snr_db)


def default_config(
    scheme="cc",
    max_rounds: int = 5,
    snr_db: float = 20.0,
    rate: float = 4.0,
    packet_bits: int = 1080,
) -> HarqConfig:
    """Rayleigh defaults: 20 dB, R = 4, five rounds, 1080-bit packets"""
    scheme = HarqScheme.parse(scheme)
    if scheme.is_fixed_rate:
        rates = (rate,)
    elif scheme == HarqScheme.VR:
        rates = (4.0, 3.0, 3.0, 2.0, 2.0) if max_rounds == 5 else (rate,) * max_rounds
    else:
        rates = (rate,) + (0.0,) * (max_rounds - 1)
    return HarqConfig(
        scheme=scheme,
        max_rounds=max_rounds,
        rates=rates,
        snr_db=snr_db,
        packet_bits=packet_bits,
    )


@dataclass(frozen=True)
class OutageCurve:
    """Outage probabilities p_0 = 1 >= p_1 >= ... >= p_K after each round"""

    probs: Tuple[float, ...]
    stderr: Tuple[float, ...] = field(default_factory=tuple)

    def __post_init__(self):
        probs = np.asarray(self.probs, dtype=float).ravel()
        if probs.size < 2:
            raise InvalidDistribution("outage curve needs p_0 and at least one round")
        if abs(probs[0] - 1.0) > MONOTONE_SLACK:
            raise InvalidDistribution("outage curve must start at p_0 = 1")
        if np.any(probs < -MONOTONE_SLACK) or np.any(np.diff(probs) > MONOTONE_SLACK):
            raise InvalidDistribution("outage curve must be non-increasing in [0, 1]")
        probs[0] = 1.0
        probs = np.minimum.accumulate(np.clip(probs, 0.0, 1.0))

        stderr = tuple(float(s) for s in self.stderr) or (0.0,) * probs.size
        if len(stderr) != probs.size:
            raise InvalidDistribution("stderr must have one entry per outage probability")
        object.__setattr__(self, "probs", tuple(float(p) for p in probs))
        object.__setattr__(self, "stderr", stderr)

    @property
    def K(self) -> int:
        return len(self.probs) - 1

    def success_probs(self) -> List[float]:
        """Pr(first success at round k), k = 1..K"""
        p = self.probs
        return [p[k - 1] - p[k] for k in range(1, self.K + 1)]


def outage_closed_form(config: HarqConfig, k: int) -> float:
    """
    Exact outage after k rounds over Nakagami fading.

    Type I: prod_l P(m_l, m_l th / (snr omega_l)); CC with i.i.d. rounds:
    P(k m, m th / (snr omega)), where th = 2^R - 1 and P is the regularized
    lower incomplete gamma function.

    Raises:
        NeedsMonteCarlo: IR, VR, XP, or CC over non-identical rounds
    """
    if not 0 <= k <= config.max_rounds:
        raise InvalidDistribution(f"round index {k} outside 0..{config.max_rounds}")
    if config.scheme not in (HarqScheme.TYPE_I, HarqScheme.CC):
        raise NeedsMonteCarlo(f"no closed-form outage for {config.scheme.value}")
    if config.scheme == HarqScheme.CC and not config.is_iid:
        raise NeedsMonteCarlo("closed-form CC outage needs i.i.d. rounds")
    if k == 0:
        return 1.0

    threshold = 2.0 ** config.rate - 1.0
    snr = config.snr_linear
    if config.scheme == HarqScheme.TYPE_I:
        rounds = config.fading[:k]
        return float(np.prod([gammainc(f.m, f.m * threshold / (snr * f.omega)) for f in rounds]))
    f = config.fading[0]
    return float(gammainc(k * f.m, f.m * threshold / (snr * f.omega)))


def outage_curve_closed_form(config: HarqConfig) -> OutageCurve:
    return OutageCurve(tuple(outage_closed_form(config, k) for k in range(config.max_rounds + 1)))


def interarrival_pmf_from_outage(curve: OutageCurve) -> InterarrivalPmf:
    """q_k = p_{k-1} - p_k for k < K, q_K = p_{K-1}; failures still end the cycle"""
    p = curve.probs
    K = curve.K
    probs = [0.0] + [p[k - 1] - p[k] for k in range(1, K)] + [p[K - 1]]
    return InterarrivalPmf(tuple(probs))


def vr_lattice(
    rates: Sequence[float],
    max_denominator: int = 1024,
    tolerance: float = 1e-9,
    max_factor: int = 1 << 20,
    fallback_ticks: int = 1024,
) -> Tuple[Tuple[int, ...], int]:
    """
    Place the cumulative lengths x_k = sum_{l<=k} 1/R_l on an integer lattice.

    Rates that are rationals with small denominators give an exact lattice
    whose factor is the lcm of the denominators of the x_k. Otherwise ticks
    of 1/fallback_ticks with round-to-nearest are used.

    Returns:
        (ticks per round, ticks per unit length)

    Raises:
        LatticeError: rounding made two cumulative lengths coincide
    """
    inverses = []
    for r in rates:
        frac = Fraction(r).limit_denominator(max_denominator)
        if frac == 0 or abs(float(frac) - r) > tolerance:
            break
        inverses.append(1 / frac)
    else:
        cumulative = list(accumulate(inverses))
        factor = math.lcm(*(c.denominator for c in cumulative))
        if factor <= max_factor:
            return tuple(int(c * factor) for c in cumulative), factor

    lengths = np.cumsum(1.0 / np.asarray(rates, dtype=float))
    ticks = np.rint(lengths * fallback_ticks).astype(int)
    placement = float(np.max(np.abs(ticks - lengths * fallback_ticks))) / fallback_ticks
    logger.warning(
        f"VR rates {list(rates)} are off the rational lattice; "
        f"using 1/{fallback_ticks} ticks (max placement error {placement:.2e})"
    )
    if ticks[0] < 1 or np.any(np.diff(ticks) < 1):
        raise LatticeError("VR subcodeword lengths collapse on the fallback lattice")
    return tuple(int(t) for t in ticks), fallback_ticks


def _check_rates(rates: Sequence[float], scheme: HarqScheme, K: int) -> Tuple[float, ...]:
    rates = tuple(float(r) for r in np.atleast_1d(rates))
    expected = 1 if scheme.is_fixed_rate else K
    if len(rates) != expected:
        raise InvalidDistribution(f"{scheme.value} needs {expected} rate(s) for {K} rounds")
    return rates


def reward_table_outage(curve: OutageCurve, rates: Sequence[float], scheme) -> RewardTable:
    """
    Renewal reward table crediting only decoded packets.

    Success at round k is state (k, "S"); the failure after K rounds is
    (K, "F") with reward 0. Zero-probability states are left out.

    FR: lattice of rounds, reward R. VR: lattice of the cumulative
    subcodeword lengths, reward 1 packet. XP: lattice of rounds, reward
    sum_{l<=k} R_l.
    """
    scheme = HarqScheme.parse(scheme)
    K = curve.K
    rates = _check_rates(rates, scheme, K)
    success = curve.success_probs()
    failure = curve.probs[K]

    ticks_per_unit = 1
    if scheme.is_fixed_rate:
        arrivals = list(range(1, K + 1))
        rewards = [rates[0]] * K
    elif scheme == HarqScheme.VR:
        lattice, ticks_per_unit = vr_lattice(rates)
        arrivals = list(lattice)
        rewards = [1.0] * K
    else:
        arrivals = list(range(1, K + 1))
        rewards = list(accumulate(rates))

    entries = [
        RewardEntry(arrivals[k - 1], "S", success[k - 1], rewards[k - 1])
        for k in range(1, K + 1)
        if success[k - 1] > 0.0
    ]
    if failure > 0.0:
        entries.append(RewardEntry(arrivals[K - 1], "F", failure, 0.0))
    return RewardTable(tuple(entries), ticks_per_unit=ticks_per_unit)


def ltat_harq(curve: OutageCurve, rates: Sequence[float], scheme) -> float:
    """Scheme-specific long-term average throughput in bits/symbol"""
    scheme = HarqScheme.parse(scheme)
    p = curve.probs
    K = curve.K
    rates = _check_rates(rates, scheme, K)
    if scheme.is_fixed_rate:
        return rates[0] * (1.0 - p[K]) / math.fsum(p[:K])
    if scheme == HarqScheme.VR:
        return (1.0 - p[K]) / math.fsum(p[k] / rates[k] for k in range(K))
    delivered = math.fsum(rates[k - 1] * (p[k - 1] - p[K]) for k in range(1, K + 1))
    return delivered / math.fsum(p[:K])


def _resolve_curve(config: HarqConfig, curve: Optional[OutageCurve]) -> OutageCurve:
    if curve is None:
        return outage_curve_closed_form(config)
    if curve.K != config.max_rounds:
        raise InvalidDistribution(f"outage curve has {curve.K} rounds, config has {config.max_rounds}")
    return curve


def ec_max_arrival(
    config: HarqConfig, theta: float, curve: Optional[OutageCurve] = None
) -> EcResult:
    """
    Maximum arrival rate of a fixed-rate scheme: every HARQ cycle pays R.

    Args:
        theta: L * theta in per-bit units
        curve: outage curve; the closed form is used when omitted

    Raises:
        NeedsMonteCarlo: no curve given and no closed form exists
    """
    if not config.scheme.is_fixed_rate:
        raise InvalidDistribution("maximum arrival rate is defined for fixed-rate schemes")
    curve = _resolve_curve(config, curve)
    return effective_capacity_constant(interarrival_pmf_from_outage(curve), config.rate, theta)


def ec_outage(
    config: HarqConfig, theta: float, curve: Optional[OutageCurve] = None
) -> EcResult:
    """
    Outage effective capacity in bits/symbol: failed packets pay nothing.

    Args:
        theta: the scheme's normalized exponent
        curve: outage curve; the closed form is used when omitted
    """
    curve = _resolve_curve(config, curve)
    table = reward_table_outage(curve, config.rates, config.scheme)
    result = effective_capacity_variable(table, theta)
    if table.ticks_per_unit != 1:
        result = result.rescaled(table.ticks_per_unit)
    return result


def _symbols_per_round(config: HarqConfig) -> float:
    if config.symbols_per_round is not None:
        return float(config.symbols_per_round)
    if config.packet_bits is None:
        raise InvalidDistribution("packet_bits or symbols_per_round is needed for raw units")
    return config.packet_bits / config.rate


def normalized_theta(config: HarqConfig, raw_theta: float) -> float:
    """Convert a per-bit exponent into the scheme's normalized exponent"""
    if config.scheme == HarqScheme.VR:
        if config.packet_bits is None:
            raise InvalidDistribution("VR needs packet_bits for raw units")
        return config.packet_bits * raw_theta
    return _symbols_per_round(config) * raw_theta


def _as_integer(value: float, what: str) -> int:
    rounded = int(round(value))
    if abs(value - rounded) > 1e-9 or rounded < 1:
        raise LatticeError(f"{what} is not a positive whole number of symbols: {value!r}")
    return rounded


def raw_reward_table(
    config: HarqConfig, curve: Optional[OutageCurve] = None, credit_failures: bool = False
) -> RewardTable:
    """
    Reward table with one lattice tick per channel symbol and rewards in bits.

    credit_failures=True pays every cycle (maximum arrival rate).
    """
    curve = _resolve_curve(config, curve)
    K = curve.K
    success = curve.success_probs()
    failure = curve.probs[K]

    if config.scheme == HarqScheme.VR:
        if config.packet_bits is None:
            raise InvalidDistribution("VR needs packet_bits for raw units")
        lengths = [_as_integer(config.packet_bits / r, "subcodeword length") for r in config.rates]
        arrivals = list(accumulate(lengths))
        rewards = [float(config.packet_bits)] * K
    else:
        L = _as_integer(_symbols_per_round(config), "symbols per round")
        arrivals = [k * L for k in range(1, K + 1)]
        if config.scheme == HarqScheme.XP:
            rewards = [L * r for r in accumulate(config.rates)]
        else:
            rewards = [L * config.rate] * K

    entries = [
        RewardEntry(arrivals[k - 1], "S", success[k - 1], rewards[k - 1])
        for k in range(1, K + 1)
        if success[k - 1] > 0.0
    ]
    if failure > 0.0:
        entries.append(RewardEntry(arrivals[K - 1], "F", failure, rewards[K - 1] if credit_failures else 0.0))
    return RewardTable(tuple(entries))


def ec_outage_raw(
    config: HarqConfig, raw_theta: float, curve: Optional[OutageCurve] = None
) -> EcResult:
    """Outage effective capacity computed on the symbol lattice with a per-bit exponent"""
    return effective_capacity_variable(raw_reward_table(config, curve), raw_theta)


def ec_max_arrival_raw(
    config: HarqConfig, raw_theta: float, curve: Optional[OutageCurve] = None
) -> EcResult:
    if not config.scheme.is_fixed_rate:
        raise InvalidDistribution("maximum arrival rate is defined for fixed-rate schemes")
    return effective_capacity_variable(raw_reward_table(config, curve, credit_failures=True), raw_theta)


def root_equation_residual(
    config: HarqConfig,
    curve: OutageCurve,
    theta: float,
    result: EcResult,
    mode: str = "outage",
) -> float:
    """
    |ln(lhs)| of the scheme's normalized root equation at the solved zeta.

    Outage: sum_k q_{k,S} exp(-theta w_k) zeta^{x_k} + p_K zeta^{x_K} = 1,
    with x_k rounds (FR, XP) or sum_{l<=k} 1/R_l (VR) and w_k the reward.
    Maximum arrival: sum_k q_k zeta^k = exp(theta R).
    """
    K = curve.K
    log_zeta = result.log_zeta
    if mode == "max-arrival":
        q = interarrival_pmf_from_outage(curve).as_array()
        ks = np.flatnonzero(q > 0.0)
        return abs(float(logsumexp(np.log(q[ks]) + ks * log_zeta)) - theta * config.rate)

    success = np.array(curve.success_probs())
    if config.scheme == HarqScheme.VR:
        lengths = np.cumsum(1.0 / np.array(config.rates))
        rewards = np.ones(K)
    else:
        lengths = np.arange(1, K + 1, dtype=float)
        rewards = np.full(K, config.rate) if config.scheme.is_fixed_rate else np.cumsum(config.rates)

    exponents = [lengths[k] * log_zeta - theta * rewards[k] for k in range(K) if success[k] > 0.0]
    weights = [success[k] for k in range(K) if success[k] > 0.0]
    if curve.probs[K] > 0.0:
        exponents.append(lengths[K - 1] * log_zeta)
        weights.append(curve.probs[K])
    return abs(float(logsumexp(exponents, b=weights)))
