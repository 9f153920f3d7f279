"""Path symmetry of two-mode pure states.

A sector is path-symmetric when its coefficients satisfy
``c_m = conj(c_{-m}) exp(-2i chi)`` for one real ``chi``.  Because a phase
shift multiplies ``c_m`` and ``c_{-m}`` by conjugate factors, the property
and the value of ``chi`` survive any phase shift.  Only ``exp(-2i chi)`` is
fixed, so ``chi`` is reported in ``[0, pi)``.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Sequence

import numpy as np

from .su2 import SectorState, m_values
from .states import Stage, StageError, TwoModeState, to_internal

__all__ = [
    "DEFAULT_TOL",
    "NotPathSymmetricError",
    "SectorChi",
    "SymmetryReport",
    "check",
    "chi_distance",
    "extract_chi",
    "mode_exchange_check",
    "phase_independence_check",
    "phase_shift",
]

DEFAULT_TOL = 1e-9


class NotPathSymmetricError(ValueError):
    def __init__(self, message: str, residual: float = math.inf):
        super().__init__(message)
        self.residual = residual


@dataclass(frozen=True)
class SectorChi:
    total_n: int
    chi: float  # nan when no (m, -m) pair is populated
    residual: float


@dataclass(frozen=True)
class SymmetryReport:
    is_path_symmetric: bool
    chi_per_sector: list[SectorChi]
    max_residual: float
    tolerance_used: float
    chi_shared: bool  # same chi in every sector (informational)

    def chi(self, total_n: int) -> float:
        for entry in self.chi_per_sector:
            if entry.total_n == total_n:
                return entry.chi
        raise KeyError(total_n)

    def to_dict(self) -> dict:
        out = asdict(self)
        out["chi_per_sector"] = [
            {"total_n": e.total_n, "chi": None if math.isnan(e.chi) else e.chi, "residual": e.residual}
            for e in self.chi_per_sector
        ]
        return out


def chi_distance(a: float, b: float) -> float:
    """Distance between two ``chi`` values on the circle of period pi."""
    d = (a - b) % math.pi
    return min(d, math.pi - d)


def _sector_chi(coeffs: np.ndarray) -> tuple[float, float]:
    mirrored = coeffs[::-1]  # c_{-m} at the position of c_m
    products = coeffs * mirrored
    k = int(np.argmax(np.abs(products)))
    if products[k] == 0:
        return math.nan, float(np.max(np.abs(coeffs)))
    # exp(-2i chi) = c_m / conj(c_{-m}) = c_m c_{-m} / |c_m c_{-m}|
    two_chi = -np.angle(products[k])
    phase = np.exp(-1j * two_chi)
    residual = float(np.max(np.abs(coeffs - mirrored.conj() * phase)))
    return float((two_chi / 2) % math.pi), residual


def extract_chi(sector: SectorState, tol: float = DEFAULT_TOL) -> float:
    """Return ``chi`` in ``[0, pi)``; raise :class:`NotPathSymmetricError` if none fits."""
    chi, residual = _sector_chi(np.asarray(sector.coeffs))
    if math.isnan(chi):
        raise NotPathSymmetricError(
            f"sector N={sector.two_j}: no m with both c_m and c_-m nonzero", residual
        )
    if not residual < tol:
        raise NotPathSymmetricError(
            f"sector N={sector.two_j}: chi inconsistent across m-pairs (residual {residual:.3e})",
            residual,
        )
    # float roundoff can land exactly on pi
    return 0.0 if chi >= math.pi else chi


def _require_internal(state: TwoModeState) -> None:
    if state.stage is not Stage.INTERNAL:
        raise StageError(
            "path symmetry is defined inside the interferometer; call to_internal() first"
        )


def check(state: TwoModeState, tol: float = DEFAULT_TOL) -> SymmetryReport:
    _require_internal(state)
    entries = []
    for s in state.sectors:
        chi, residual = _sector_chi(np.asarray(s.coeffs))
        if not math.isnan(chi) and chi >= math.pi:
            chi = 0.0
        entries.append(SectorChi(s.two_j, chi, residual))
    max_residual = max(e.residual for e in entries)
    chis = [e.chi for e in entries if not math.isnan(e.chi)]
    shared = bool(chis) and all(chi_distance(c, chis[0]) < math.sqrt(tol) for c in chis)
    return SymmetryReport(
        is_path_symmetric=bool(max_residual < tol),
        chi_per_sector=entries,
        max_residual=max_residual,
        tolerance_used=tol,
        chi_shared=shared,
    )


def phase_shift(state: TwoModeState, phi: float) -> TwoModeState:
    """``exp(-i phi J_z)`` applied sector-wise (the state after the phase shifter)."""
    return state.map_sectors(
        lambda s: SectorState(s.two_j, s.coeffs * np.exp(-1j * m_values(s.two_j) * phi))
    )


def phase_independence_check(
    state_input: TwoModeState, phi_samples: Sequence[float], tol: float = DEFAULT_TOL
) -> bool:
    """True iff the verdict and every sector's ``chi`` are unchanged by each phase shift."""
    internal = to_internal(state_input) if state_input.stage is Stage.INPUT else state_input
    reference = check(internal, tol)
    for phi in phi_samples:
        report = check(phase_shift(internal, phi), tol)
        if report.is_path_symmetric != reference.is_path_symmetric:
            return False
        if not reference.is_path_symmetric:
            # nothing to compare chi against; the verdict is what matters
            continue
        for a, b in zip(reference.chi_per_sector, report.chi_per_sector):
            if math.isnan(a.chi) != math.isnan(b.chi):
                return False
            if not math.isnan(a.chi) and chi_distance(a.chi, b.chi) > math.sqrt(tol):
                return False
    return True


def mode_exchange_check(state: TwoModeState, tol: float = DEFAULT_TOL) -> bool:
    """Swap the modes (m -> -m), conjugate, and compare with the original state.

    The swapped state must equal the original up to ``exp(i(g0 + g1 N))``: a
    global phase times a phase shift common to both arms, which no
    number-conserving interferometer can detect.  For a single sector this is
    just a global phase.
    """
    _require_internal(state)
    phases = []
    for s in state.sectors:
        c = np.asarray(s.coeffs)
        swapped = c[::-1].conj()
        ov = np.vdot(c, swapped)
        if abs(ov) == 0:
            return False
        phase = ov / abs(ov)
        if np.max(np.abs(swapped - phase * c)) >= tol:
            return False
        phases.append((s.two_j, phase, s.norm_sq))
    return _phases_affine_in_n(phases, tol)


def _phases_affine_in_n(phases: list[tuple[int, complex, float]], tol: float) -> bool:
    # sectors with negligible weight cannot pin down a phase reliably
    heavy = [(n, p) for n, p, w in phases if w > tol**2]
    if len(heavy) <= 2:
        # two points always lie on a line when gaps allow; a lone gap of d
        # fixes exp(i g1 d) and nothing else constrains g1
        return True
    n0, p0 = heavy[0]
    rel = [(n - n0, p / p0) for n, p in heavy[1:]]
    gap = math.gcd(*[d for d, _ in rel])
    # exp(i g1 gap) must satisfy w_d = step**(d / gap); try every branch
    d1, w1 = rel[0]
    k1 = d1 // gap
    base = np.angle(w1)
    for branch in range(k1):
        step = np.exp(1j * (base + 2 * math.pi * branch) / k1)
        if all(abs(w - step ** (d // gap)) < math.sqrt(tol) for d, w in rel):
            return True
    return False
