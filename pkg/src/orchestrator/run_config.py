"""
Run configuration: JSON schema validation and inline micro-syntax parsing.

Inline forms:
    pmf    "k:prob,k:prob,..."            e.g. "1:0.5,2:0.5"
    table  "k,state,prob,reward;..."      e.g. "1,S,0.6,1;2,S,0.4,2"
    grid   "min,max,points[,log]"         e.g. "1e-4,10,50,log"
"""

import json
import math
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from ..capacity.errors import ConfigError, InvalidDistribution
from ..capacity.harq_models import FadingRound, HarqConfig, HarqScheme
from ..capacity.renewal_core import InterarrivalPmf
from ..capacity.reward_process import RewardTable

MODES = ("max-arrival", "outage")
CHECKS = ("none", "enumeration", "determinant", "all")
FORMATS = ("csv", "json")
THETA_UNITS = ("normalized", "raw")


def parse_pmf(raw) -> InterarrivalPmf:
    """Parse "k:prob,..." or a {k: prob} mapping"""
    try:
        if isinstance(raw, dict):
            mapping = {int(k): float(p) for k, p in raw.items()}
        else:
            mapping = {}
            for item in str(raw).split(","):
                k, p = item.split(":")
                mapping[int(k)] = mapping.get(int(k), 0.0) + float(p)
        return InterarrivalPmf.from_mapping(mapping)
    except InvalidDistribution as exc:
        raise ConfigError(str(exc), key="pmf") from exc
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"cannot parse {raw!r}, expected k:prob[,k:prob...]", key="pmf") from exc


def parse_table(raw) -> RewardTable:
    """Parse "k,state,prob,reward;..." or a list of [k, state, prob, reward] rows"""
    try:
        if isinstance(raw, (list, tuple)):
            rows = [tuple(row) for row in raw]
        else:
            rows = [tuple(item.split(",")) for item in str(raw).split(";") if item.strip()]
        parsed = []
        for row in rows:
            k, state, prob, reward = row
            parsed.append((int(k), str(state).strip(), float(prob), float(reward)))
        return RewardTable.from_rows(parsed)
    except InvalidDistribution as exc:
        raise ConfigError(str(exc), key="table") from exc
    except (TypeError, ValueError) as exc:
        raise ConfigError(
            f"cannot parse {raw!r}, expected k,state,prob,reward[;...]", key="table"
        ) from exc


def parse_grid(raw, key: str) -> Dict[str, Any]:
    """Normalize a grid given as "min,max,points[,log]" or a mapping"""
    if isinstance(raw, str):
        parts = [p.strip() for p in raw.split(",")]
        if len(parts) not in (3, 4):
            raise ConfigError("expected min,max,points[,log]", key=key)
        raw = {"min": parts[0], "max": parts[1], "points": parts[2], "log": len(parts) == 4 and parts[3] == "log"}
    if not isinstance(raw, dict):
        raise ConfigError("expected an object with min, max, points", key=key)
    unknown = set(raw) - {"min", "max", "points", "log"}
    if unknown:
        raise ConfigError("unknown grid field", key=f"{key}.{sorted(unknown)[0]}")
    try:
        grid = {
            "min": float(raw["min"]),
            "max": float(raw["max"]),
            "points": int(raw["points"]),
            "log": bool(raw.get("log", False)),
        }
    except KeyError as exc:
        raise ConfigError("missing grid field", key=f"{key}.{exc.args[0]}") from exc
    except (TypeError, ValueError) as exc:
        raise ConfigError("grid values must be numeric", key=key) from exc
    if grid["points"] < 1 or grid["max"] < grid["min"]:
        raise ConfigError("need points >= 1 and max >= min", key=key)
    if grid["log"] and grid["min"] <= 0.0:
        raise ConfigError("log grids need a positive minimum", key=key)
    return grid


def grid_values(grid: Dict[str, Any]) -> List[float]:
    if grid["points"] == 1:
        return [grid["min"]]
    if grid["log"]:
        values = np.logspace(math.log10(grid["min"]), math.log10(grid["max"]), grid["points"])
    else:
        values = np.linspace(grid["min"], grid["max"], grid["points"])
    return [float(v) for v in values]


def _number(value, key: str, minimum: Optional[float] = None) -> float:
    try:
        number = float(value)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"expected a number, got {value!r}", key=key) from exc
    if not math.isfinite(number) or (minimum is not None and number < minimum):
        raise ConfigError(f"value {value!r} out of range", key=key)
    return number


def _integer(value, key: str, minimum: int = 0) -> int:
    if isinstance(value, bool) or (isinstance(value, float) and not value.is_integer()):
        raise ConfigError(f"expected an integer, got {value!r}", key=key)
    try:
        number = int(value)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"expected an integer, got {value!r}", key=key) from exc
    if number < minimum:
        raise ConfigError(f"must be >= {minimum}", key=key)
    return number


def _choice(value, key: str, options: Sequence[str]) -> str:
    if value not in options:
        raise ConfigError(f"expected one of {list(options)}, got {value!r}", key=key)
    return value


def _rates(value, key: str = "rates") -> List[float]:
    if isinstance(value, str):
        value = [v for v in value.split(",") if v.strip()]
    if not isinstance(value, (list, tuple)):
        value = [value]
    return [_number(v, key) for v in value]


def _fading(value) -> List[FadingRound]:
    if not isinstance(value, list) or not value:
        raise ConfigError("expected a non-empty list of {m, omega}", key="fading")
    rounds = []
    for i, item in enumerate(value):
        if not isinstance(item, dict) or set(item) - {"m", "omega"}:
            raise ConfigError("entries must be objects with keys m and omega", key=f"fading[{i}]")
        rounds.append(FadingRound(
            m=_number(item.get("m", 1.0), f"fading[{i}].m", 0.5),
            omega=_number(item.get("omega", 1.0), f"fading[{i}].omega"),
        ))
    return rounds


@dataclass
class RunConfig:
    """Parameters of one command run; None means "use the configured default" """

    scheme: Optional[str] = None
    max_rounds: Optional[int] = None
    rates: Optional[List[float]] = None
    snr_db: Optional[float] = None
    snr_grid: Optional[Dict[str, Any]] = None
    fading: Optional[List[FadingRound]] = None
    packet_bits: Optional[int] = None
    symbols_per_round: Optional[int] = None
    theta: Optional[float] = None
    theta_grid: Optional[Dict[str, Any]] = None
    theta_units: Optional[str] = None
    mode: Optional[str] = None
    pmf: Optional[InterarrivalPmf] = None
    reward: Optional[float] = None
    table: Optional[RewardTable] = None
    t: Optional[int] = None
    t_max: Optional[int] = None
    check: Optional[str] = None
    grid: Optional[Dict[str, List[float]]] = None
    refine_factor: Optional[int] = None
    samples: Optional[int] = None
    seed: Optional[int] = None
    workers: Optional[int] = None
    output: Optional[str] = None
    format: Optional[str] = None

    @classmethod
    def allowed_keys(cls) -> List[str]:
        return [f.name for f in fields(cls)]

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "RunConfig":
        """
        Validate a run description.

        Raises:
            ConfigError: naming the first offending key
        """
        if not isinstance(data, dict):
            raise ConfigError("run configuration must be a JSON object")
        allowed = set(cls.allowed_keys())
        for key in data:
            if key not in allowed:
                raise ConfigError("unknown key", key=key)
        if "theta" in data and "theta_grid" in data:
            raise ConfigError("give either theta or theta_grid", key="theta_grid")

        values = {k: v for k, v in data.items() if v is not None}
        parsed: Dict[str, Any] = {}
        if "scheme" in values:
            try:
                parsed["scheme"] = HarqScheme.parse(values["scheme"]).value
            except InvalidDistribution as exc:
                raise ConfigError(str(exc), key="scheme") from exc
        for key in ("max_rounds", "packet_bits", "symbols_per_round", "t", "samples", "refine_factor", "workers"):
            if key in values:
                parsed[key] = _integer(values[key], key, minimum=1)
        for key in ("t_max", "seed"):
            if key in values:
                parsed[key] = _integer(values[key], key, minimum=0)
        if "rates" in values:
            parsed["rates"] = _rates(values["rates"])
        if "snr_db" in values:
            parsed["snr_db"] = _number(values["snr_db"], "snr_db")
        if "theta" in values:
            parsed["theta"] = _number(values["theta"], "theta", 0.0)
        if "reward" in values:
            parsed["reward"] = _number(values["reward"], "reward", 0.0)
        for key in ("theta_grid", "snr_grid"):
            if key in values:
                parsed[key] = parse_grid(values[key], key)
        if "fading" in values:
            parsed["fading"] = _fading(values["fading"])
        if "pmf" in values:
            parsed["pmf"] = parse_pmf(values["pmf"])
        if "table" in values:
            parsed["table"] = parse_table(values["table"])
        if "mode" in values:
            parsed["mode"] = _choice(values["mode"], "mode", MODES)
        if "check" in values:
            parsed["check"] = _choice(values["check"], "check", CHECKS)
        if "format" in values:
            parsed["format"] = _choice(values["format"], "format", FORMATS)
        if "theta_units" in values:
            parsed["theta_units"] = _choice(values["theta_units"], "theta_units", THETA_UNITS)
        if "output" in values:
            parsed["output"] = str(values["output"])
        if "grid" in values:
            grid = values["grid"]
            if not isinstance(grid, dict) or set(grid) - {"initial", "subsequent"}:
                raise ConfigError("expected {initial: [...], subsequent: [...]}", key="grid")
            parsed["grid"] = {k: _rates(v, f"grid.{k}") for k, v in grid.items()}
        return cls(**parsed)

    @classmethod
    def from_file(cls, path: str, overrides: Optional[Dict[str, Any]] = None) -> "RunConfig":
        """Load a JSON run description; non-None overrides win"""
        data: Dict[str, Any] = {}
        if path is not None:
            try:
                with open(Path(path), "r", encoding="utf-8") as f:
                    data = json.load(f)
            except OSError as exc:
                raise ConfigError(f"cannot read run configuration: {exc}") from exc
            except json.JSONDecodeError as exc:
                raise ConfigError(f"invalid JSON: {exc}") from exc
            if not isinstance(data, dict):
                raise ConfigError("run configuration must be a JSON object")
        merged = dict(data)
        for key, value in (overrides or {}).items():
            if value is not None:
                merged[key] = value
        if "theta" in (overrides or {}) and overrides["theta"] is not None:
            merged.pop("theta_grid", None)
        elif "theta_grid" in (overrides or {}) and overrides["theta_grid"] is not None:
            merged.pop("theta", None)
        return cls.from_dict(merged)

    def thetas(self, default: float) -> List[float]:
        if self.theta_grid is not None:
            return grid_values(self.theta_grid)
        return [self.theta if self.theta is not None else default]

    def snrs(self, default: float) -> List[float]:
        if self.snr_grid is not None:
            return grid_values(self.snr_grid)
        return [self.snr_db if self.snr_db is not None else default]

    def harq_config(self, defaults: Dict[str, Any]) -> HarqConfig:
        """HarqConfig from this run, filling gaps from the `harq` config section"""
        scheme = HarqScheme.parse(self.scheme or defaults.get("scheme", "cc"))
        max_rounds = self.max_rounds or int(defaults.get("max_rounds", 5))
        rates = self.rates
        if rates is None:
            rate = float(defaults.get("rate", 4.0))
            if scheme.is_fixed_rate:
                rates = [rate]
            elif scheme == HarqScheme.VR and max_rounds == 5:
                rates = [4.0, 3.0, 3.0, 2.0, 2.0]
            elif scheme == HarqScheme.VR:
                rates = [rate] * max_rounds
            else:
                rates = [rate] + [0.0] * (max_rounds - 1)
        fading = self.fading or [FadingRound(
            m=float(defaults.get("nakagami_m", 1.0)), omega=float(defaults.get("omega", 1.0))
        )]
        try:
            return HarqConfig(
                scheme=scheme,
                max_rounds=max_rounds,
                rates=tuple(rates),
                snr_db=self.snr_db if self.snr_db is not None else float(defaults.get("snr_db", 20.0)),
                fading=tuple(fading),
                packet_bits=self.packet_bits if self.packet_bits is not None else defaults.get("packet_bits"),
                symbols_per_round=self.symbols_per_round,
            )
        except InvalidDistribution as exc:
            raise ConfigError(str(exc), key=exc.key or "harq") from exc
