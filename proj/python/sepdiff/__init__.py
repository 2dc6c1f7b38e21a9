"""Python bindings for the sepdiff C++ core.

Reports are returned as plain dicts with the same layout as the payloads
printed by the ``sepdiff`` command-line tool (infinities as ``"inf"``,
the cemetery point as ``"none"``).
"""

from __future__ import annotations

import json
import os
from typing import Optional, Union

from . import _core
from ._core import (
    DomainMismatch,
    Error,
    ExpressionError,
    Inconclusive,
    NotLowerBounded,
    NotRecurrent,
    SpecError,
    UnboundedDomainWithoutTruncation,
)

__all__ = [
    "Diffusion",
    "load",
    "parse",
    "classify",
    "validate_spec",
    "separate",
    "separating_set",
    "identical",
    "nflvr",
    "simulate",
    "validate",
    "sample_path",
    "chain_exit_time",
    "expected_exit_time",
    "Error",
    "SpecError",
    "ExpressionError",
    "Inconclusive",
    "DomainMismatch",
    "NotLowerBounded",
    "UnboundedDomainWithoutTruncation",
    "NotRecurrent",
]

Diffusion = _core.Diffusion
SpecLike = Union[Diffusion, str, os.PathLike]


def parse(text: str, origin: str = "<string>") -> Diffusion:
    """Diffusion from TOML text."""
    return Diffusion.from_toml(text, origin)


def load(path: Union[str, os.PathLike]) -> Diffusion:
    """Diffusion from a TOML file."""
    return Diffusion.load(os.fspath(path))


def _spec(x: SpecLike) -> Diffusion:
    if isinstance(x, Diffusion):
        return x
    s = os.fspath(x)
    if "\n" in s or "[space]" in s:
        return parse(s)
    return load(s)


def _split(truncate):
    if truncate is None:
        return None, None
    lo, hi = truncate
    return lo, hi


def validate_spec(spec: SpecLike) -> list:
    """Rule violations of a specification; empty when it is usable."""
    return json.loads(_spec(spec).violations_json())


def classify(spec: SpecLike) -> dict:
    return json.loads(_core.classify_json(_spec(spec)))


def separate(p: SpecLike, q: SpecLike, x0: Optional[float] = None) -> dict:
    return json.loads(_core.separate_json(_spec(p), _spec(q), x0))


def separating_set(p: SpecLike, q: SpecLike) -> list:
    return json.loads(_core.separating_points_json(_spec(p), _spec(q)))


def identical(p: SpecLike, q: SpecLike) -> bool:
    return _core.identical(_spec(p), _spec(q))


def nflvr(spec: SpecLike, horizon: str = "finite") -> dict:
    return json.loads(_core.nflvr_json(_spec(spec), horizon))


def simulate(spec: SpecLike, cells: int = 200, paths: int = 1000, seed: int = 1, horizon: float = 1.0,
             truncate=None, x0: Optional[float] = None, refinement: str = "uniform-x", threads: int = 0) -> dict:
    lo, hi = _split(truncate)
    return json.loads(_core.simulate_json(_spec(spec), cells, paths, seed, horizon, lo, hi, x0, refinement, threads))


def validate(spec: SpecLike, cells: int = 200, paths: int = 100000, seed: int = 7, window=None,
             x0: Optional[float] = None, p_up_bias: float = 0.0, ergodic_horizon: float = 1.0,
             threads: int = 0) -> dict:
    lo, hi = _split(window)
    return json.loads(_core.validate_json(_spec(spec), cells, paths, seed, lo, hi, x0, p_up_bias, ergodic_horizon,
                                          threads))


def sample_path(spec: SpecLike, x0: float, horizon: float = 1.0, seed: int = 1, stream: int = 0, cells: int = 200,
                truncate=None) -> list:
    """List of (state, holding_duration) pairs."""
    lo, hi = _split(truncate)
    return _core.sample_path(_spec(spec), x0, horizon, seed, stream, cells, lo, hi)


def chain_exit_time(spec: SpecLike, a: float, x: float, b: float, cells: int = 200, truncate=None) -> float:
    lo, hi = _split(truncate)
    return _core.chain_exit_time(_spec(spec), a, x, b, cells, lo, hi)


def expected_exit_time(spec: SpecLike, a: float, x: float, b: float) -> float:
    return _core.expected_exit_time(_spec(spec), a, x, b)
