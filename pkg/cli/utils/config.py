#!/usr/bin/env python3
"""
Run configuration for the fdpower CLI
Loads key = value or YAML files, converts units at the boundary and validates
"""

import hashlib
import json
import re
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional

import yaml
from pydantic import BaseModel, ConfigDict, ValidationError as PydanticValidationError

from cli.utils.constants import ENGINE_ALIASES, KNOWN_KEYS, NETWORK_KEYS, SIMULATION_KEYS
from cli.utils.error_handler import ConfigurationError
from models.network import NetworkConfig
from models.power import PowerControlScheme, SchemeFamily
from models.report import EngineKind
from models.simulation import SimulationSpec
from services.network import db_to_linear, dbm_to_watts
from services.power_control import build_scheme

_QUANTITY = re.compile(r"^\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)\s*(.*?)\s*$")

# unit suffix -> (dimension, converter to SI)
UNITS = {
    "w": ("power", lambda v: v),
    "mw": ("power", lambda v: v * 1e-3),
    "dbm": ("power", dbm_to_watts),
    "dbw": ("power", db_to_linear),
    "db": ("ratio", db_to_linear),
    "hz": ("bandwidth", lambda v: v),
    "khz": ("bandwidth", lambda v: v * 1e3),
    "mhz": ("bandwidth", lambda v: v * 1e6),
    "ghz": ("bandwidth", lambda v: v * 1e9),
    "bps": ("rate", lambda v: v),
    "kbps": ("rate", lambda v: v * 1e3),
    "mbps": ("rate", lambda v: v * 1e6),
    "gbps": ("rate", lambda v: v * 1e9),
    "m": ("distance", lambda v: v),
    "km": ("distance", lambda v: v * 1e3),
    "per-m2": ("density", lambda v: v),
    "per-km2": ("density", lambda v: v * 1e-6),
}

_UNIT_SPELLINGS = {
    "/m2": "per-m2",
    "/m^2": "per-m2",
    "per m2": "per-m2",
    "/km2": "per-km2",
    "/km^2": "per-km2",
    "per km2": "per-km2",
}

_TRUE = ("true", "yes", "on", "1")
_FALSE = ("false", "no", "off", "0")


def parse_value(key: str, raw: Any) -> Any:
    """Convert one raw config value to its SI/linear form.

    Raises:
        ConfigurationError: unknown key, unparsable number or unit of the wrong dimension
    """
    if key not in KNOWN_KEYS:
        raise ConfigurationError(f"Unknown configuration key: {key}", hint=f"Known keys: {', '.join(sorted(KNOWN_KEYS))}")
    return parse_quantity(key, raw, KNOWN_KEYS[key])


def parse_quantity(key: str, raw: Any, dimension: str) -> Any:
    if dimension == "flag":
        if isinstance(raw, bool):
            return raw
        text = str(raw).strip().lower()
        if text in _TRUE:
            return True
        if text in _FALSE:
            return False
        raise ConfigurationError(f"{key} must be true or false, got {raw!r}")
    if dimension == "text":
        return str(raw).strip().lower()
    if isinstance(raw, bool):
        raise ConfigurationError(f"{key} must be a number, got {raw!r}")
    if isinstance(raw, (int, float)):
        return int(raw) if dimension == "integer" else float(raw)

    match = _QUANTITY.match(str(raw))
    if not match:
        raise ConfigurationError(f"{key}: cannot parse {raw!r} as a number with optional unit")
    number = float(match.group(1))
    unit = match.group(2).lower()
    if not unit:
        if dimension == "integer":
            if not number.is_integer():
                raise ConfigurationError(f"{key} must be an integer, got {raw!r}")
            return int(number)
        return number
    unit = _UNIT_SPELLINGS.get(unit, unit)
    if unit not in UNITS:
        raise ConfigurationError(f"{key}: unknown unit {match.group(2)!r}")
    unit_dimension, convert = UNITS[unit]
    if unit_dimension != dimension:
        raise ConfigurationError(f"{key}: unit {match.group(2)!r} is a {unit_dimension}, expected a {dimension}")
    return convert(number)


def read_config_file(path: str) -> Dict[str, Any]:
    """Raw key/value pairs of a config file; YAML for .yaml/.yml, key = value lines otherwise."""
    file_path = Path(path).expanduser()
    if not file_path.exists():
        raise ConfigurationError(f"Configuration file not found: {path}")
    text = file_path.read_text(encoding="utf-8")

    if file_path.suffix.lower() in (".yaml", ".yml"):
        try:
            data = yaml.safe_load(text) or {}
        except yaml.YAMLError as e:
            raise ConfigurationError(f"Invalid YAML in {path}: {e}")
        if not isinstance(data, dict):
            raise ConfigurationError(f"{path} must hold a mapping of keys to values")
        return {str(k): v for k, v in data.items()}

    data = {}
    for number, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigurationError(f"{path}:{number}: expected 'key = value', got {line!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        data[key] = value
    return data


class RunConfig(BaseModel):
    """Everything one CLI run needs, in SI/linear units."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    network: NetworkConfig = NetworkConfig()
    scheme: SchemeFamily = SchemeFamily.CPC
    p_bar: Optional[float] = None
    epsilon: Optional[float] = None
    xi: Optional[float] = None
    simulation: SimulationSpec = SimulationSpec()

    @classmethod
    def from_flat(cls, values: Mapping[str, Any]) -> "RunConfig":
        network = {k: v for k, v in values.items() if k in NETWORK_KEYS}
        simulation = {k: v for k, v in values.items() if k in SIMULATION_KEYS}
        scheme = {k: v for k, v in values.items() if k not in NETWORK_KEYS and k not in SIMULATION_KEYS}
        return cls(network=NetworkConfig(**network), simulation=SimulationSpec(**simulation), **scheme)

    def flat(self) -> Dict[str, Any]:
        values = {**self.network.model_dump(), "scheme": self.scheme.value}
        values.update(p_bar=self.p_bar, epsilon=self.epsilon, xi=self.xi)
        simulation = self.simulation.model_dump(mode="json")
        values.update({k: simulation[k] for k in SIMULATION_KEYS})
        return values

    def config_hash(self) -> str:
        payload = json.dumps(self.flat(), sort_keys=True, default=str)
        return hashlib.sha256(payload.encode("utf-8")).hexdigest()

    def build_scheme(self, family: Optional[SchemeFamily] = None) -> PowerControlScheme:
        return build_scheme(family or self.scheme, self.network, p_bar=self.p_bar, epsilon=self.epsilon, xi=self.xi)

    def with_updates(self, **changes) -> "RunConfig":
        return RunConfig.from_flat({**self.flat(), **changes})


def _describe(error: PydanticValidationError) -> str:
    parts = []
    for item in error.errors():
        field = ".".join(str(p) for p in item["loc"][-1:]) or "config"
        parts.append(f"{field}: {item['msg']}")
    return "; ".join(parts)


def load_run_config(path: Optional[str] = None, overrides: Optional[Mapping[str, Any]] = None) -> RunConfig:
    """File values first, then command-line overrides; every key is checked and unit-converted."""
    raw = read_config_file(path) if path else {}
    raw.update(overrides or {})
    parsed = {key: parse_value(key, value) for key, value in raw.items()}
    try:
        return RunConfig.from_flat(parsed)
    except PydanticValidationError as e:
        raise ConfigurationError(f"Invalid configuration: {_describe(e)}", hint="Run 'fdpower config show' to inspect values")


def parse_overrides(pairs) -> Dict[str, str]:
    """`key=value` strings from repeated --set options."""
    overrides = {}
    for pair in pairs or ():
        if "=" not in pair:
            raise ConfigurationError(f"Expected key=value, got {pair!r}")
        key, value = pair.split("=", 1)
        overrides[key.strip()] = value.strip()
    return overrides


def parse_engines(names) -> List[EngineKind]:
    engines = []
    for name in names or ("lower",):
        alias = ENGINE_ALIASES.get(name.lower())
        if alias is None:
            raise ConfigurationError(f"Unknown engine: {name}", hint=f"Choose from: {', '.join(sorted(ENGINE_ALIASES))}")
        engine = EngineKind(alias)
        if engine not in engines:
            engines.append(engine)
    return engines


def parse_families(names, default: SchemeFamily) -> List[SchemeFamily]:
    if not names:
        return [default]
    if any(name.lower() == "all" for name in names):
        return list(SchemeFamily)
    families = []
    for name in names:
        try:
            family = SchemeFamily(name.lower())
        except ValueError:
            raise ConfigurationError(f"Unknown scheme: {name}", hint="Choose from: cpc, upc, fpc, apc, all")
        if family not in families:
            families.append(family)
    return families
