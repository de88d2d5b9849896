"""Run configuration shared by the CLI and the verification drivers."""

from __future__ import annotations

import os
from dataclasses import dataclass, replace

CONFIG_ENV_VAR = "SPORADIC_CONFIG"

_FORMATS = ("json", "tsv", "human")


@dataclass(frozen=True)
class RunConfig:
    precision_bits: int = 192
    qseries_order: int = 200
    prime_max: int = 500
    tolerance_exponent: int = 30
    output_format: str = "human"
    include_timings: bool = False

    def __post_init__(self):
        if self.precision_bits < 64:
            raise ValueError("precision_bits must be >= 64")
        if self.qseries_order < 10:
            raise ValueError("qseries_order must be >= 10")
        if self.output_format not in _FORMATS:
            raise ValueError(f"output_format must be one of {_FORMATS}")

    @property
    def tolerance(self) -> float:
        return 10.0 ** (-self.tolerance_exponent)


_INT_FIELDS = ("precision_bits", "qseries_order", "prime_max", "tolerance_exponent")


def parse_config_file(path: str) -> dict:
    """Parse a key=value config file (blank lines and # comments ignored)."""
    out: dict = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key=value, got {raw!r}")
            key, value = (part.strip() for part in line.split("=", 1))
            if key in _INT_FIELDS:
                out[key] = int(value)
            elif key == "include_timings":
                out[key] = value.lower() in ("1", "true", "yes")
            elif key == "output_format":
                out[key] = value
            else:
                raise ValueError(f"{path}:{lineno}: unknown config key {key!r}")
    return out


def load_config(path: str | None = None, **overrides) -> RunConfig:
    """Build a RunConfig from defaults, optional file, then overrides.

    The file comes from `path` or the SPORADIC_CONFIG environment variable.
    Overrides with value None are ignored so CLI flags can pass through.
    """
    values: dict = {}
    cfg_path = path or os.environ.get(CONFIG_ENV_VAR)
    if cfg_path:
        values.update(parse_config_file(cfg_path))
    values.update({k: v for k, v in overrides.items() if v is not None})
    return RunConfig(**values)
