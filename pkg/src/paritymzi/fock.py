"""Brute-force two-mode Fock-basis simulation, used as ground truth.

Nothing here touches :mod:`paritymzi.su2`'s matrices or its basis ordering:
generators are assembled from bosonic ladder elements in the photon-number
basis ``|n_a, N - n_a>`` (ordered by ascending ``n_a``) and exponentiated
with :func:`scipy.linalg.expm` (scaling and squaring).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np
from scipy.linalg import expm

from .su2 import MziKind, OperatorMatrix, SectorState

__all__ = [
    "FockSectorState",
    "beam_splitter_fock",
    "bs_generator_fock",
    "fock_to_schwinger",
    "from_sector",
    "jz_fock",
    "jz_moments_fock",
    "parity_expectation_fock",
    "parity_signal_fock",
    "propagate_fock",
    "to_sector",
]


@dataclass(frozen=True)
class FockSectorState:
    """N-photon two-mode state, ``amps[n_a]`` is the amplitude of ``|n_a, N - n_a>``."""

    total_n: int
    amps: np.ndarray

    def __post_init__(self):
        amps = np.array(self.amps, dtype=complex).reshape(-1)
        if self.total_n < 0 or amps.shape[0] != self.total_n + 1:
            raise ValueError(f"total_n={self.total_n} needs {self.total_n + 1} amplitudes")
        amps.setflags(write=False)
        object.__setattr__(self, "amps", amps)

    @property
    def norm_sq(self) -> float:
        return float(np.sum(np.abs(self.amps) ** 2))


def fock_to_schwinger(n_a: int, n_b: int) -> tuple[int, int]:
    """Map ``|n_a, n_b>`` to ``(two_j, index)`` in the descending-m Schwinger basis.

    ``two_j = n_a + n_b`` and ``m = (n_a - n_b)/2``, which lands at index
    ``j - m = n_b``.
    """
    if n_a < 0 or n_b < 0:
        raise ValueError("photon numbers must be non-negative")
    two_j = n_a + n_b
    # index = j - m, written without half-integers
    index = (two_j - (n_a - n_b)) // 2
    return two_j, index


def from_sector(sector: SectorState) -> FockSectorState:
    """Re-express a Schwinger sector in the Fock basis (explicit index map)."""
    n = sector.two_j
    amps = np.zeros(n + 1, dtype=complex)
    for n_a in range(n + 1):
        _, k = fock_to_schwinger(n_a, n - n_a)
        amps[n_a] = sector.coeffs[k]
    return FockSectorState(n, amps)


def to_sector(state: FockSectorState) -> SectorState:
    n = state.total_n
    coeffs = np.zeros(n + 1, dtype=complex)
    for n_a in range(n + 1):
        _, k = fock_to_schwinger(n_a, n - n_a)
        coeffs[k] = state.amps[n_a]
    return SectorState(n, coeffs)


def _a_dag_b(total_n: int) -> np.ndarray:
    # a^dag b |n_a, n_b> = sqrt((n_a + 1) n_b) |n_a + 1, n_b - 1>
    out = np.zeros((total_n + 1, total_n + 1), dtype=complex)
    for n_a in range(total_n):
        n_b = total_n - n_a
        out[n_a + 1, n_a] = np.sqrt((n_a + 1) * n_b)
    return out


def bs_generator_fock(total_n: int, axis: str) -> OperatorMatrix:
    """``J_x = (a^dag b + a b^dag)/2`` or ``J_y = (a^dag b - a b^dag)/(2i)``, Fock ordering."""
    if total_n < 0:
        raise ValueError("total_n must be non-negative")
    up = _a_dag_b(total_n)
    down = up.conj().T
    if axis == "x":
        gen = (up + down) / 2
    elif axis == "y":
        gen = (up - down) / 2j
    else:
        raise ValueError(f"axis must be 'x' or 'y', got {axis!r}")
    return OperatorMatrix(total_n, gen)


def jz_fock(total_n: int) -> np.ndarray:
    n_a = np.arange(total_n + 1)
    return np.diag((n_a - (total_n - n_a)) / 2.0).astype(complex)


def beam_splitter_fock(total_n: int, kind: MziKind = MziKind.TYPE_I) -> np.ndarray:
    gen = bs_generator_fock(total_n, kind.splitter_axis).entries
    return expm(-1j * (np.pi / 2) * gen)


def propagate_fock(
    state: FockSectorState,
    phi: float,
    kind: MziKind = MziKind.TYPE_I,
    internal: bool = False,
) -> FockSectorState:
    """Run ``U_BS``, ``U_phi``, ``U_BS^dag`` on the state; skip ``U_BS`` if ``internal``."""
    n = state.total_n
    bs = beam_splitter_fock(n, kind)
    shifter = expm(-1j * phi * jz_fock(n))
    psi = np.asarray(state.amps)
    if not internal:
        psi = bs @ psi
    psi = bs.conj().T @ (shifter @ psi)
    return FockSectorState(n, psi)


def _parity_b(total_n: int) -> np.ndarray:
    n_b = total_n - np.arange(total_n + 1)
    parity = (-1.0) ** n_b
    # the same operator written as (-1)^(j - J_z); asserted rather than assumed
    jz = np.diag(jz_fock(total_n)).real
    alt = np.real(np.exp(1j * np.pi * (total_n / 2.0 - jz)))
    if np.max(np.abs(parity - alt), initial=0.0) > 1e-12:
        raise RuntimeError("(-1)^n_b and (-1)^(j - J_z) disagree")
    return parity


def parity_expectation_fock(
    state: FockSectorState,
    phi: float,
    kind: MziKind = MziKind.TYPE_I,
    internal: bool = False,
) -> float:
    """``<(-1)^n_b>`` at the interferometer output, weighted by the state's norm."""
    out = propagate_fock(state, phi, kind, internal)
    return float(np.sum(_parity_b(out.total_n) * np.abs(out.amps) ** 2))


def parity_signal_fock(
    sectors: Iterable[FockSectorState],
    phis: Iterable[float],
    kind: MziKind = MziKind.TYPE_I,
    internal: bool = False,
) -> np.ndarray:
    """Parity expectation summed over photon-number sectors, one value per phase."""
    sectors = list(sectors)
    return np.array(
        [sum(parity_expectation_fock(s, phi, kind, internal) for s in sectors) for phi in phis]
    )


def jz_moments_fock(sectors: Iterable[FockSectorState]) -> tuple[float, float]:
    """``(<J_z>, <J_z^2>)`` from photon-number probabilities."""
    first = second = 0.0
    for s in sectors:
        n_a = np.arange(s.total_n + 1)
        jz = (2 * n_a - s.total_n) / 2.0
        p = np.abs(s.amps) ** 2
        first += float(np.sum(p * jz))
        second += float(np.sum(p * jz**2))
    return first, second
