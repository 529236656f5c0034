"""Flat-torus heat kernels, propagators, PV and graph integrals."""

import json as _json

from ._core import (
    SCHEMA_VERSION,
    ConfigError,
    HeatKernel,
    Lattice,
    Propagator,
    config_hash,
    zero_by_type,
)
from ._core import run_config as _run_config


def run(config, **overrides):
    """Run a config (dict or JSON text); returns (parsed JSON, raw output dict)."""
    text = config if isinstance(config, str) else _json.dumps(config)
    out = _run_config(text, **overrides)
    return _json.loads(out["json"]), out


__all__ = [
    "SCHEMA_VERSION",
    "ConfigError",
    "HeatKernel",
    "Lattice",
    "Propagator",
    "config_hash",
    "run",
    "zero_by_type",
]
