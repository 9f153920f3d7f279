"""Named benchmark states and the ``name:params`` mini-language used by the CLI.

Examples::

    noon:3                      N00N with N = 3
    twin_fock:2                 |2, 2>
    tmsv:r=0.5,max_n=60         two-mode squeezed vacuum
    pair_coherent:zeta=1.0      pair-coherent state
    csv:alpha=1.4142,zeta=1.1462,max_n=200
                                coherent (mode a) times squeezed vacuum (mode b)
    vacuum

Complex parameters accept Python literals such as ``0.5+0.2j``.
"""

from __future__ import annotations

import math
from typing import Callable

from . import states
from .states import TwoModeState

__all__ = ["UnknownStateError", "catalog", "equal_split_csv", "parse_state_spec"]


class UnknownStateError(ValueError):
    pass


def _int(v: str) -> int:
    return int(v)


def _float(v: str) -> float:
    return float(v)


def _complex(v: str) -> complex:
    return complex(v.replace(" ", ""))


# name -> (factory, positional parameter, {param: (factory kwarg, parser)})
_FACTORIES: dict[str, tuple[Callable[..., TwoModeState], str | None, dict]] = {
    "noon": (states.noon, "n", {"n": ("total_n", _int)}),
    "twin_fock": (states.twin_fock, "n", {"n": ("n", _int)}),
    "tmsv": (
        states.two_mode_squeezed_vacuum,
        "r",
        {"r": ("r", _float), "max_n": ("max_total_n", _int), "tail": ("tail_bound", _float)},
    ),
    "pair_coherent": (
        states.pair_coherent,
        "zeta",
        {"zeta": ("zeta", _complex), "max_n": ("max_total_n", _int), "tail": ("tail_bound", _float)},
    ),
    "csv": (
        states.coherent_times_squeezed_vacuum,
        None,
        {
            "alpha": ("alpha", _complex),
            "zeta": ("zeta", _complex),
            "max_n": ("max_total_n", _int),
            "tail": ("tail_bound", _float),
        },
    ),
    "vacuum": (states.vacuum, None, {}),
}
_ALIASES = {"n00n": "noon", "twinfock": "twin_fock", "pc": "pair_coherent"}


def parse_state_spec(spec: str) -> TwoModeState:
    """Build a state from ``name`` or ``name:value`` or ``name:key=value,...``."""
    name, _, params = spec.strip().partition(":")
    name = _ALIASES.get(name.lower(), name.lower())
    if name not in _FACTORIES:
        raise UnknownStateError(
            f"unknown state {name!r}; choose from {', '.join(sorted(_FACTORIES))}"
        )
    factory, positional, schema = _FACTORIES[name]
    kwargs = {}
    for item in filter(None, (p.strip() for p in params.split(","))):
        key, eq, value = item.partition("=")
        if not eq:
            if positional is None or positional in kwargs:
                raise ValueError(f"{name}: cannot interpret parameter {item!r}")
            key, value = positional, item
        if key not in schema:
            raise ValueError(f"{name}: unknown parameter {key!r} (expected {', '.join(schema)})")
        kwarg, parse = schema[key]
        try:
            kwargs[kwarg] = parse(value)
        except ValueError as exc:
            raise ValueError(f"{name}: bad value for {key}: {value!r}") from exc
    return factory(**kwargs)


def equal_split_csv(mean_photons: float = 4.0, max_total_n: int = 200) -> TwoModeState:
    """Coherent plus squeezed vacuum with the mean photon number split evenly."""
    alpha = math.sqrt(mean_photons / 2)
    r = math.asinh(math.sqrt(mean_photons / 2))
    return states.coherent_times_squeezed_vacuum(alpha, r, max_total_n=max_total_n)


def catalog(max_n: int = 10) -> dict[str, TwoModeState]:
    """Path-symmetric benchmark states, as built (input stage where one exists)."""
    out: dict[str, TwoModeState] = {}
    for n in range(1, max_n + 1):
        out[f"noon:{n}"] = states.noon(n)
    for n in range(1, max(1, max_n // 2) + 1):
        out[f"twin_fock:{n}"] = states.twin_fock(n)
    for r in (0.3, 0.5):
        out[f"tmsv:r={r}"] = states.two_mode_squeezed_vacuum(r)
    for z in (0.5, 1.0):
        out[f"pair_coherent:zeta={z}"] = states.pair_coherent(z)
    out["csv:nbar=4"] = equal_split_csv(4.0)
    return out
