"""Schwinger (SU(2)) representation of two-mode interferometry.

An N-photon two-mode state lives in the spin ``j = N/2`` block.  Throughout
the package the basis is ordered by descending ``m``::

    index k = 0, 1, ..., 2j   <->   m = +j, +j-1, ..., -j

so that ``k`` equals the photon number in the second mode ``b`` and
``m = (n_a - n_b) / 2``.  Half-integer spins are carried as the integer
``two_j`` (the total photon number).

Conventions (Condon-Shortley):

* ``J_+ = a^dag b`` has real, non-negative matrix elements
  ``<m+1|J_+|m> = sqrt(j(j+1) - m(m+1))``;
* ``J_x = (J_+ + J_-)/2``, ``J_y = (J_+ - J_-)/(2i)``, ``J_z = diag(m)``.

With these, the type-I interferometer ``U_BS^dag U_phi U_BS`` built from
``U_BS = exp(-i pi/2 J_x)`` equals ``exp(-i phi J_y)``, and the type-II one
built from ``U_BS = exp(-i pi/2 J_y)`` equals ``exp(+i phi J_x)``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

__all__ = [
    "IncompatibleSectorError",
    "MziKind",
    "OperatorMatrix",
    "SectorState",
    "angular_momentum_matrix",
    "apply",
    "beam_splitter",
    "m_values",
    "mzi_generator_axis",
    "mzi_transform",
    "overlap_up_to_phase",
    "phase_shifter",
]

NORM_TOL = 1e-12
_POSTCONDITION_TOL = 1e-9


class IncompatibleSectorError(ValueError):
    """Operator and state live in different photon-number sectors."""


class MziKind(enum.Enum):
    TYPE_I = "type-I"  # beam splitter generated by J_x
    TYPE_II = "type-II"  # beam splitter generated by J_y

    @property
    def splitter_axis(self) -> str:
        return "x" if self is MziKind.TYPE_I else "y"


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, dtype=complex)
    arr.setflags(write=False)
    return arr


def m_values(two_j: int) -> np.ndarray:
    """Magnetic quantum numbers ``+j, ..., -j`` (descending) as floats."""
    return (two_j - 2.0 * np.arange(two_j + 1)) / 2.0


@dataclass(frozen=True, eq=False)
class SectorState:
    """Fixed-photon-number pure state, coefficients ``c_m`` with ``m`` descending."""

    two_j: int
    coeffs: np.ndarray

    def __post_init__(self):
        if self.two_j < 0:
            raise ValueError(f"two_j must be non-negative, got {self.two_j}")
        coeffs = np.asarray(self.coeffs, dtype=complex).reshape(-1)
        if coeffs.shape[0] != self.two_j + 1:
            raise ValueError(
                f"sector two_j={self.two_j} needs {self.two_j + 1} coefficients, "
                f"got {coeffs.shape[0]}"
            )
        object.__setattr__(self, "coeffs", _frozen(coeffs))

    def __eq__(self, other):
        if not isinstance(other, SectorState):
            return NotImplemented
        return self.two_j == other.two_j and np.array_equal(self.coeffs, other.coeffs)

    __hash__ = None

    @property
    def j(self) -> float:
        return self.two_j / 2.0

    @property
    def m(self) -> np.ndarray:
        return m_values(self.two_j)

    @property
    def norm_sq(self) -> float:
        return float(np.vdot(self.coeffs, self.coeffs).real)

    def is_normalized(self, tol: float = NORM_TOL) -> bool:
        return abs(self.norm_sq - 1.0) <= tol

    def normalized(self) -> "SectorState":
        norm = np.sqrt(self.norm_sq)
        if norm == 0.0:
            raise ValueError("cannot normalize a zero vector")
        return SectorState(self.two_j, self.coeffs / norm)

    def coeff(self, m: float) -> complex:
        """Coefficient ``c_m`` looked up by its (half-)integer ``m``."""
        k = round(self.j - m)
        if not (0 <= k <= self.two_j) or abs((self.j - m) - k) > 1e-9:
            raise KeyError(f"m={m} not in sector j={self.j}")
        return complex(self.coeffs[k])


@dataclass(frozen=True, eq=False)
class OperatorMatrix:
    """Dense operator on a single spin-j block, basis ordered by descending m."""

    two_j: int
    entries: np.ndarray

    def __post_init__(self):
        entries = np.asarray(self.entries, dtype=complex)
        dim = self.two_j + 1
        if entries.shape != (dim, dim):
            raise ValueError(f"expected a {dim}x{dim} matrix, got shape {entries.shape}")
        object.__setattr__(self, "entries", _frozen(entries))

    @property
    def dagger(self) -> "OperatorMatrix":
        return OperatorMatrix(self.two_j, self.entries.conj().T)

    def __matmul__(self, other: "OperatorMatrix") -> "OperatorMatrix":
        if other.two_j != self.two_j:
            raise IncompatibleSectorError(
                f"cannot compose operators on sectors {self.two_j} and {other.two_j}"
            )
        return OperatorMatrix(self.two_j, self.entries @ other.entries)

    def is_hermitian(self, tol: float = NORM_TOL) -> bool:
        return bool(np.max(np.abs(self.entries - self.entries.conj().T), initial=0.0) <= tol)

    def is_unitary(self, tol: float = NORM_TOL) -> bool:
        eye = np.eye(self.two_j + 1)
        return bool(np.max(np.abs(self.entries.conj().T @ self.entries - eye)) <= tol)


@lru_cache(maxsize=None)
def _jmat(two_j: int, axis: str) -> np.ndarray:
    m = m_values(two_j)
    j = two_j / 2.0
    if axis == "z":
        out = np.diag(m).astype(complex)
    else:
        # <m+1|J_+|m> sits one row above the diagonal in descending-m order
        ladder = np.sqrt(np.maximum(j * (j + 1) - m[1:] * (m[1:] + 1), 0.0))
        jp = np.diag(ladder, 1).astype(complex)
        if axis == "x":
            out = (jp + jp.T) / 2
        elif axis == "y":
            out = (jp - jp.T) / 2j
        else:
            raise ValueError(f"axis must be one of 'x', 'y', 'z', got {axis!r}")
    out.setflags(write=False)
    return out


def angular_momentum_matrix(two_j: int, axis: str) -> OperatorMatrix:
    """Spin-j matrix ``J_x``, ``J_y`` or ``J_z`` for ``j = two_j/2``."""
    if two_j < 0:
        raise ValueError(f"two_j must be non-negative, got {two_j}")
    return OperatorMatrix(two_j, _jmat(two_j, axis))


@lru_cache(maxsize=256)
def _eigh(two_j: int, axis: str) -> tuple[np.ndarray, np.ndarray]:
    vals, vecs = np.linalg.eigh(_jmat(two_j, axis))
    # the spectrum is exactly {-j, ..., j}; snap away eigen-solver round-off
    vals = np.round(2 * vals) / 2
    vals.setflags(write=False)
    vecs.setflags(write=False)
    return vals, vecs


def _rotation(two_j: int, axis: str, angle: float) -> np.ndarray:
    if axis == "z":
        return np.diag(np.exp(-1j * angle * m_values(two_j)))
    vals, vecs = _eigh(two_j, axis)
    return (vecs * np.exp(-1j * angle * vals)) @ vecs.conj().T


def beam_splitter(two_j: int, axis: str, angle: float) -> OperatorMatrix:
    """``exp(-i angle J_axis)`` via the eigendecomposition of the generator."""
    if two_j < 0:
        raise ValueError(f"two_j must be non-negative, got {two_j}")
    if axis not in ("x", "y"):
        raise ValueError(f"beam splitter axis must be 'x' or 'y', got {axis!r}")
    return OperatorMatrix(two_j, _rotation(two_j, axis, float(angle)))


def phase_shifter(two_j: int, phi: float) -> OperatorMatrix:
    """``exp(-i phi J_z)``: diagonal with entries ``exp(-i m phi)``."""
    if two_j < 0:
        raise ValueError(f"two_j must be non-negative, got {two_j}")
    return OperatorMatrix(two_j, _rotation(two_j, "z", float(phi)))


def apply(op: OperatorMatrix, state: SectorState) -> SectorState:
    if op.two_j != state.two_j:
        raise IncompatibleSectorError(
            f"operator acts on sector two_j={op.two_j}, state is in two_j={state.two_j}"
        )
    return SectorState(state.two_j, op.entries @ state.coeffs)


def mzi_generator_axis(kind: MziKind) -> tuple[str, float]:
    """Single-generator form of the full interferometer: ``exp(-i sign*phi*J_axis)``."""
    if kind is MziKind.TYPE_I:
        return "y", 1.0
    return "x", -1.0


def mzi_transform(state: SectorState, phi: float, kind: MziKind = MziKind.TYPE_I) -> SectorState:
    """Propagate through ``U_BS^dag U_phi U_BS`` and check the single-generator identity."""
    two_j = state.two_j
    bs = beam_splitter(two_j, kind.splitter_axis, np.pi / 2)
    out = apply(bs.dagger, apply(phase_shifter(two_j, phi), apply(bs, state)))

    axis, sign = mzi_generator_axis(kind)
    direct = _rotation(two_j, axis, sign * phi) @ state.coeffs
    err = np.max(np.abs(direct - out.coeffs), initial=0.0)
    if err > _POSTCONDITION_TOL * max(1.0, np.sqrt(state.norm_sq)):
        raise RuntimeError(f"{kind.value} interferometer identity violated by {err:.3e}")
    return out


def overlap_up_to_phase(a: np.ndarray, b: np.ndarray) -> float:
    """``|<a|b>|`` for normalized vectors; 1 means equal up to a global phase."""
    return float(abs(np.vdot(a, b)))
