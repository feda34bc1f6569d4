"""Fractional heat equation and stable operator toolkit."""

import json as _json

from ._fracheat import (
    NumericalError,
    ValidationError,
    bootstrap,
    command_names,
    fractional_symbol,
    heat_kernel,
    interval_eigenvalues,
    operator_normalization,
    riesz_constant,
)
from . import _fracheat

__all__ = [
    "NumericalError",
    "ValidationError",
    "bootstrap",
    "command_names",
    "config_hash",
    "default_config",
    "fractional_symbol",
    "heat_kernel",
    "interval_eigenvalues",
    "operator_normalization",
    "riesz_constant",
    "run",
]


def _dump(config):
    return "" if config is None else _json.dumps(config)


def default_config():
    return _json.loads(_fracheat.default_config_json())


def config_hash(config=None):
    return _fracheat.config_hash(_dump(config))


def run(command, config=None, write=False):
    """Run a CLI command in-process and return its JSON report as a dict.

    With write=True the CSV/JSON artifacts go to config["out"].
    """
    return _json.loads(_fracheat.run(command, _dump(config), write))
