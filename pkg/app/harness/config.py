"""
Sweep configuration files.

Plain `key=value` lines, `#` starts a comment. Grids are either
`start:stop:step` (stop included) or comma-separated values; `methods` is
comma-separated. Parsed values are validated by SweepSpec.
"""

import logging
import math
from pathlib import Path
from typing import Dict, List, Union

from pydantic import ValidationError

from app.core.exceptions import ConfigError
from app.harness.schemas import PRIMARY_GRID, SweepSpec

logger = logging.getLogger(__name__)

GRID_KEYS = set(PRIMARY_GRID.values())
INT_KEYS = {"m", "n", "k", "trials_per_point", "base_seed", "workers"}
FLOAT_KEYS = {"amplitude", "eta", "epsilon", "p", "lambda_multiple"}
TEXT_KEYS = {"experiment", "lambda_policy"}
ALIASES = {"trials": "trials_per_point", "seed": "base_seed", "method": "methods"}

# Grid values are rounded so that start + i·step prints identically everywhere.
_GRID_DECIMALS = 12


def parse_grid(text: str) -> List[float]:
    text = text.strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ConfigError(f"grid {text!r} must be start:stop:step")
        start, stop, step = (float(part) for part in parts)
        if not step > 0.0 or stop < start:
            raise ConfigError(f"grid {text!r} needs step > 0 and stop >= start")
        count = int(math.floor((stop - start) / step + 1e-9)) + 1
        return [round(start + i * step, _GRID_DECIMALS) for i in range(count)]
    return [float(part) for part in text.split(",") if part.strip()]


def parse_config_text(text: str, source: str = "<config>") -> Dict[str, object]:
    values: Dict[str, object] = {}
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{number}: expected key=value, got {line!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        key = ALIASES.get(key, key)
        try:
            if key in GRID_KEYS:
                values[key] = parse_grid(value)
            elif key == "methods":
                values[key] = [name.strip() for name in value.split(",") if name.strip()]
            elif key in INT_KEYS:
                values[key] = int(value)
            elif key in FLOAT_KEYS:
                values[key] = float(value)
            elif key in TEXT_KEYS:
                values[key] = value
            else:
                raise ConfigError(f"{source}:{number}: unknown key {key!r}")
        except ValueError as e:
            raise ConfigError(f"{source}:{number}: bad value for {key}: {e}") from e
    return values


def spec_from_values(values: Dict[str, object], source: str = "<config>") -> SweepSpec:
    try:
        return SweepSpec(**values)
    except ValidationError as e:
        first = e.errors()[0]
        location = ".".join(str(part) for part in first.get("loc", ())) or "config"
        raise ConfigError(f"{source}: {location}: {first.get('msg')}") from e


def load_sweep_config(path: Union[str, Path]) -> SweepSpec:
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    spec = spec_from_values(parse_config_text(path.read_text(encoding="utf-8"), str(path)), str(path))
    logger.info(f"Loaded {spec.experiment.value} sweep from {path} ({len(spec.grid)} grid points)")
    return spec
