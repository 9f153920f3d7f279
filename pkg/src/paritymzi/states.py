"""Benchmark two-mode states, as interferometer inputs or as internal states.

An *input* state is what enters the first beam splitter; an *internal*
state is what sits between the beam splitters, before the phase shift.  All
metrology routines work on internal states; :func:`to_internal` converts.

Infinite-dimensional states (squeezed, coherent, pair-coherent) are cut at a
maximum total photon number.  The discarded probability is recorded on the
state and must stay below ``tail_bound``.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

import numpy as np
from scipy.special import i0e

from .su2 import MziKind, SectorState, apply, beam_splitter

__all__ = [
    "DEFAULT_TAIL_BOUND",
    "Stage",
    "StageError",
    "Truncation",
    "TruncationError",
    "TwoModeState",
    "coherent_times_squeezed_vacuum",
    "from_fock_amplitudes",
    "load_state",
    "noon",
    "pair_coherent",
    "save_state",
    "state_from_json",
    "state_to_json",
    "to_internal",
    "twin_fock",
    "two_mode_squeezed_vacuum",
    "vacuum",
]

DEFAULT_TAIL_BOUND = 1e-12
NORM_TOL = 1e-10


class Stage(enum.Enum):
    INPUT = "input"
    INTERNAL = "internal"


class StageError(ValueError):
    """Operation called on a state at the wrong interferometer stage."""


class TruncationError(ValueError):
    """Photon-number cutoff discards more probability than allowed."""


@dataclass(frozen=True)
class Truncation:
    max_total_n: int
    tail_mass: float
    bound: float = DEFAULT_TAIL_BOUND

    def __post_init__(self):
        if not self.tail_mass < self.bound:
            raise TruncationError(
                f"cutoff max_total_n={self.max_total_n} discards probability "
                f"{self.tail_mass:.3e} >= {self.bound:.1e}; increase max_total_n"
            )


@dataclass(frozen=True)
class TwoModeState:
    """Normalized superposition of photon-number sectors.

    ``sectors`` is sorted by photon number with no repeats.  ``kind`` records
    which beam splitter produced an internal state.
    """

    sectors: tuple[SectorState, ...]
    stage: Stage
    kind: MziKind = MziKind.TYPE_I
    truncation: Truncation | None = field(default=None, compare=False)

    def __post_init__(self):
        sectors = tuple(sorted(self.sectors, key=lambda s: s.two_j))
        if not sectors:
            raise ValueError("a state needs at least one photon-number sector")
        ns = [s.two_j for s in sectors]
        if len(set(ns)) != len(ns):
            raise ValueError(f"duplicate photon-number sectors in {ns}")
        object.__setattr__(self, "sectors", sectors)
        norm_sq = self.norm_sq
        if abs(norm_sq - 1.0) > NORM_TOL:
            raise ValueError(f"state is not normalized (norm^2 = {norm_sq:.15g})")

    @classmethod
    def build(
        cls,
        sectors: Iterable[SectorState],
        stage: Stage,
        kind: MziKind = MziKind.TYPE_I,
        truncation: Truncation | None = None,
    ) -> "TwoModeState":
        """Drop empty sectors and renormalize before constructing."""
        kept = [s for s in sectors if np.any(s.coeffs != 0)]
        total = math.fsum(s.norm_sq for s in kept)
        if total == 0.0:
            raise ValueError("state has zero norm")
        scale = 1.0 / math.sqrt(total)
        kept = [SectorState(s.two_j, s.coeffs * scale) for s in kept]
        return cls(tuple(kept), stage, kind, truncation)

    @property
    def norm_sq(self) -> float:
        return math.fsum(s.norm_sq for s in self.sectors)

    @property
    def photon_numbers(self) -> list[int]:
        return [s.two_j for s in self.sectors]

    @property
    def max_photons(self) -> int:
        return self.sectors[-1].two_j

    def sector(self, total_n: int) -> SectorState:
        for s in self.sectors:
            if s.two_j == total_n:
                return s
        raise KeyError(f"no sector with {total_n} photons")

    def weights(self) -> dict[int, float]:
        return {s.two_j: s.norm_sq for s in self.sectors}

    def map_sectors(self, fn) -> "TwoModeState":
        return TwoModeState(tuple(fn(s) for s in self.sectors), self.stage, self.kind, self.truncation)

    def mean_photon_number(self) -> float:
        return math.fsum(s.two_j * s.norm_sq for s in self.sectors)


def _single(sector: SectorState, stage: Stage) -> TwoModeState:
    return TwoModeState.build([sector], stage)


def vacuum(stage: Stage = Stage.INPUT) -> TwoModeState:
    return _single(SectorState(0, [1.0]), stage)


def noon(total_n: int) -> TwoModeState:
    """``(|N,0> + |0,N>)/sqrt(2)`` inside the interferometer."""
    if total_n < 1:
        raise ValueError("a N00N state needs at least one photon")
    c = np.zeros(total_n + 1, dtype=complex)
    c[0] = c[-1] = 1 / math.sqrt(2)
    return _single(SectorState(total_n, c), Stage.INTERNAL)


def twin_fock(n: int) -> TwoModeState:
    """``|n, n>`` at the interferometer input."""
    if n < 1:
        raise ValueError("twin-Fock state needs n >= 1")
    c = np.zeros(2 * n + 1, dtype=complex)
    c[n] = 1.0
    return _single(SectorState(2 * n, c), Stage.INPUT)


def from_fock_amplitudes(
    amps: np.ndarray,
    stage: Stage = Stage.INPUT,
    truncation: Truncation | None = None,
) -> TwoModeState:
    """Build a state from a 2-D array ``amps[n_a, n_b]``, grouped by ``n_a + n_b``.

    Only entries with ``n_a + n_b <= max`` are kept, where ``max`` is the
    smaller array dimension minus one, so every kept sector is complete.
    """
    amps = np.asarray(amps, dtype=complex)
    n_max = min(amps.shape) - 1
    sectors = []
    for n in range(n_max + 1):
        n_b = np.arange(n + 1)  # Schwinger index k == n_b
        coeffs = amps[n - n_b, n_b]
        sectors.append(SectorState(n, coeffs))
    return TwoModeState.build(sectors, stage, truncation=truncation)


def _truncate(kept_mass: float, max_total_n: int, tail_bound: float) -> Truncation:
    tail = max(0.0, 1.0 - kept_mass)
    return Truncation(max_total_n, tail, tail_bound)


def two_mode_squeezed_vacuum(
    r: float, max_total_n: int = 120, tail_bound: float = DEFAULT_TAIL_BOUND
) -> TwoModeState:
    """``sum_n (-tanh r)^n / cosh r |n, n>``, cut at ``2n <= max_total_n``."""
    if not r > 0:
        raise ValueError("squeezing r must be positive")
    t = -math.tanh(r)
    amp = 1.0 / math.cosh(r)
    sectors = []
    for n in range(max_total_n // 2 + 1):
        c = np.zeros(2 * n + 1, dtype=complex)
        c[n] = amp
        sectors.append(SectorState(2 * n, c))
        amp *= t
    kept = math.fsum(s.norm_sq for s in sectors)
    trunc = _truncate(kept, max_total_n, tail_bound)
    return TwoModeState.build(sectors, Stage.INPUT, truncation=trunc)


def _coherent_amplitudes(alpha: complex, n_max: int) -> np.ndarray:
    out = np.zeros(n_max + 1, dtype=complex)
    out[0] = math.exp(-abs(alpha) ** 2 / 2)
    for n in range(n_max):
        out[n + 1] = out[n] * alpha / math.sqrt(n + 1)
    return out


def _squeezed_vacuum_amplitudes(zeta: complex, n_max: int) -> np.ndarray:
    """``S(zeta)|0>`` with ``zeta = r e^{i theta}``: weight on even photon numbers only."""
    r = abs(zeta)
    phase = np.exp(1j * np.angle(zeta)) if r > 0 else 1.0
    t = -phase * math.tanh(r)
    out = np.zeros(n_max + 1, dtype=complex)
    out[0] = 1.0 / math.sqrt(math.cosh(r))
    for n in range(0, n_max - 1, 2):
        # ratio of sqrt((2k)!)/(2^k k!) between k and k+1
        out[n + 2] = out[n] * t * math.sqrt((n + 1) * (n + 2)) / (n + 2)
    return out


def coherent_times_squeezed_vacuum(
    alpha: complex,
    zeta: complex,
    max_total_n: int = 200,
    tail_bound: float = DEFAULT_TAIL_BOUND,
) -> TwoModeState:
    """Coherent state ``|alpha>`` in mode a, squeezed vacuum ``S(zeta)|0>`` in mode b."""
    if not abs(alpha) ** 2 + math.sinh(abs(zeta)) ** 2 > 0:
        raise ValueError("input carries no photons")
    coh = _coherent_amplitudes(alpha, max_total_n)
    sqz = _squeezed_vacuum_amplitudes(zeta, max_total_n)
    amps = np.outer(coh, sqz)
    n_a, n_b = np.indices(amps.shape)
    kept = math.fsum(np.abs(amps[n_a + n_b <= max_total_n]).ravel() ** 2)
    trunc = _truncate(kept, max_total_n, tail_bound)
    return from_fock_amplitudes(amps, Stage.INPUT, trunc)


def pair_coherent(
    zeta: complex, max_total_n: int = 80, tail_bound: float = DEFAULT_TAIL_BOUND
) -> TwoModeState:
    """``sum_n zeta^n / n! |n, n> / sqrt(I_0(2|zeta|))``."""
    if zeta == 0:
        raise ValueError("pair-coherent amplitude zeta must be nonzero")
    x = 2 * abs(zeta)
    # I_0(x) = i0e(x) e^x, folded into the starting amplitude to avoid overflow
    amp = complex(math.exp(-x / 2) / math.sqrt(i0e(x)))
    sectors = []
    for n in range(max_total_n // 2 + 1):
        c = np.zeros(2 * n + 1, dtype=complex)
        c[n] = amp
        sectors.append(SectorState(2 * n, c))
        amp *= zeta / (n + 1)
    kept = math.fsum(s.norm_sq for s in sectors)
    trunc = _truncate(kept, max_total_n, tail_bound)
    return TwoModeState.build(sectors, Stage.INPUT, truncation=trunc)


def to_internal(state: TwoModeState, kind: MziKind = MziKind.TYPE_I) -> TwoModeState:
    """Apply the first 50:50 beam splitter to every sector."""
    if state.stage is not Stage.INPUT:
        raise StageError("state is already inside the interferometer")
    axis = kind.splitter_axis
    sectors = tuple(apply(beam_splitter(s.two_j, axis, math.pi / 2), s) for s in state.sectors)
    return TwoModeState(sectors, Stage.INTERNAL, kind, state.truncation)


# -- JSON interchange ---------------------------------------------------------


def state_to_json(state: TwoModeState) -> dict:
    """Serializable form; coefficients listed in descending-m order as ``[re, im]``."""
    if state.stage is Stage.INTERNAL and state.kind is not MziKind.TYPE_I:
        raise ValueError("only type-I internal states have a JSON form")
    return {
        "sectors": [
            {
                "total_n": s.two_j,
                "coeffs": [[float(c.real), float(c.imag)] for c in s.coeffs],
            }
            for s in state.sectors
        ],
        "stage": state.stage.value,
    }


def state_from_json(doc: dict) -> TwoModeState:
    try:
        stage = Stage(doc["stage"])
        sectors = []
        for entry in doc["sectors"]:
            n = int(entry["total_n"])
            coeffs = np.array([complex(re, im) for re, im in entry["coeffs"]], dtype=complex)
            sectors.append(SectorState(n, coeffs))
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"malformed state document: {exc}") from exc
    return TwoModeState(tuple(sectors), stage)


def save_state(state: TwoModeState, path: str | Path) -> None:
    Path(path).write_text(json.dumps(state_to_json(state), indent=1) + "\n")


def load_state(path: str | Path) -> TwoModeState:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ValueError(f"{path}: not valid JSON ({exc})") from exc
    return state_from_json(doc)


