"""Parity-detection phase sensitivity and the quantum Cramer-Rao bound.

All functions take an internal (type-I) state ``|psi_2> = sum c_m |m>``; the
phase shifter turns it into ``|psi_3> = sum c_m exp(-i m phi) |m>``.  Parity
``(-1)^n_b`` measured after the second beam splitter is equivalent to
measuring, on ``|psi_3>``, the operator

    Q = i^N sum_m (-1)^(j-m) |m><-m|

(derived from ``U_BS = exp(-i pi/2 J_x)`` with Condon-Shortley matrices and
checked against the brute-force Fock simulation).  Hence

    <Q>(phi) = sum_m i^N (-1)^(j-m) c_{-m} conj(c_m) exp(2i m phi),

a trigonometric polynomial in ``phi``; photon-number sectors never mix.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np

from .su2 import MziKind, OperatorMatrix, SectorState, m_values
from .states import Stage, StageError, TwoModeState
from .symmetry import DEFAULT_TOL as SYMMETRY_TOL
from .symmetry import NotPathSymmetricError, check

__all__ = [
    "BiasReport",
    "ClaimOneReport",
    "CSV_HEADER",
    "ScanPoint",
    "SensitivityScan",
    "UnestimablePhaseError",
    "bias_phase",
    "beta_formula",
    "claim1_check",
    "minimize_sensitivity",
    "parity_derivative",
    "parity_expectation",
    "parity_operator",
    "parity_sensitivity",
    "qcrb",
    "s_prime",
    "sensitivity_scan",
    "sweet_spot_limit",
]

CSV_HEADER = ("phi", "parity", "delta_phi", "qcrb")
DERIVATIVE_FLOOR = 1e-14
IMAG_TOL = 1e-10
CLAIM_TOL = 1e-8
# coefficients this small relative to their sector's largest one are treated as absent
VACUOUS_REL = 1e-6
FALLBACK_GRID = 4096
GOLDEN_WIDTH = 1e-12
TWO_PI = 2 * math.pi


class UnestimablePhaseError(ValueError):
    """The state has zero J_z spread, so the phase leaves no trace on it."""


# -- flattened view -----------------------------------------------------------


@dataclass(frozen=True)
class _Flat:
    """All sectors concatenated: coefficients, m, Q-weights and mirror positions."""

    c: np.ndarray
    m: np.ndarray
    q: np.ndarray
    mirror: np.ndarray
    freq_amps: np.ndarray  # <Q>(phi) = sum_f freq_amps[f + fmax] exp(i f phi)
    fmax: int


def _require_internal(state: TwoModeState) -> None:
    if state.stage is not Stage.INTERNAL:
        raise StageError("metrology needs the internal state; call to_internal() first")
    if state.kind is not MziKind.TYPE_I:
        raise StageError("parity analysis is formulated for the type-I interferometer")


def _q_weights(two_j: int) -> np.ndarray:
    k = np.arange(two_j + 1)
    return (1j**two_j) * (-1.0) ** k


def _flatten(state: TwoModeState) -> _Flat:
    _require_internal(state)
    cs, ms, qs, mirrors = [], [], [], []
    offset = 0
    for s in state.sectors:
        n = s.two_j
        cs.append(np.asarray(s.coeffs))
        ms.append(m_values(n))
        qs.append(_q_weights(n))
        mirrors.append(offset + n - np.arange(n + 1))
        offset += n + 1
    c = np.concatenate(cs)
    c = c / np.sqrt(np.vdot(c, c).real)
    m = np.concatenate(ms)
    q = np.concatenate(qs)
    mirror = np.concatenate(mirrors)
    terms = q * c[mirror] * c.conj()
    fmax = state.max_photons
    freq = np.rint(2 * m).astype(int) + fmax
    amps = np.zeros(2 * fmax + 1, dtype=complex)
    np.add.at(amps, freq, terms)
    return _Flat(c, m, q, mirror, amps, fmax)


def _trig_eval(flat: _Flat, phis: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    f = np.arange(-flat.fmax, flat.fmax + 1)
    phase = np.exp(1j * np.outer(phis, f))
    val = phase @ flat.freq_amps
    der = phase @ (1j * f * flat.freq_amps)
    return val, der


# -- bound and signal ---------------------------------------------------------


def _jz_variance(state: TwoModeState) -> float:
    first = second = 0.0
    for s in state.sectors:
        p = np.abs(np.asarray(s.coeffs)) ** 2
        m = m_values(s.two_j)
        first += math.fsum(p * m)
        second += math.fsum(p * m * m)
    norm = state.norm_sq
    first /= norm
    second /= norm
    return max(second - first * first, 0.0)


def qcrb(state: TwoModeState) -> float:
    """``1 / (2 Delta J_z)``, the detection-independent bound on phase error."""
    _require_internal(state)
    var = _jz_variance(state)
    if var <= 1e-24:
        raise UnestimablePhaseError("Delta J_z = 0: the state is insensitive to the phase")
    return 1.0 / (2.0 * math.sqrt(var))


def parity_operator(two_j: int) -> OperatorMatrix:
    """The matrix of ``Q`` on one sector (descending-m basis)."""
    dim = two_j + 1
    out = np.zeros((dim, dim), dtype=complex)
    k = np.arange(dim)
    out[k, two_j - k] = _q_weights(two_j)
    return OperatorMatrix(two_j, out)


def parity_expectation(state: TwoModeState, phi: float) -> float:
    flat = _flatten(state)
    val, _ = _trig_eval(flat, np.array([phi]))
    if abs(val[0].imag) > IMAG_TOL:
        raise RuntimeError(f"parity expectation has imaginary part {val[0].imag:.3e}")
    return float(val[0].real)


def parity_derivative(state: TwoModeState, phi: float) -> float:
    """``d<Q>/dphi = sum 2i m i^N (-1)^(j-m) c_{-m} conj(c_m) exp(2i m phi)``."""
    flat = _flatten(state)
    _, der = _trig_eval(flat, np.array([phi]))
    return float(der[0].real)


# -- sensitivity ----------------------------------------------------------------


def _stable_terms(flat: _Flat, phi: float) -> tuple[float, float, float]:
    """``(1 - <Q>^2, d<Q>/dphi, 1 - |<Q>|)`` without cancellation near ``|<Q>| = 1``.

    With ``d = Q psi - s psi`` for ``s = sign<Q>``:  ``1 - s<Q> = |d|^2 / 2`` and
    ``d<Q>/dphi = -2 Im <J_z psi | d>`` (because ``<J_z psi|psi>`` is real).
    """
    psi = flat.c * np.exp(-1j * flat.m * phi)
    q_psi = flat.q * psi[flat.mirror]
    mean = np.vdot(psi, q_psi).real
    s = 1.0 if mean >= 0 else -1.0
    d = q_psi - s * psi
    a = 0.5 * np.vdot(d, d).real
    one_minus_sq = a * (2.0 - a)
    deriv = -2.0 * np.vdot(flat.m * psi, d).imag
    return max(one_minus_sq, 0.0), float(deriv), a


def _plain_sensitivity(flat: _Flat, phi: float) -> tuple[float | None, float]:
    var_q, deriv, gap = _stable_terms(flat, phi)
    if abs(deriv) < DERIVATIVE_FLOOR:
        return None, gap
    return math.sqrt(var_q) / abs(deriv), gap


def _richardson_limit(flat: _Flat, phi0: float, h0: float) -> float | None:
    def sym(h):
        lo, _ = _plain_sensitivity(flat, phi0 - h)
        hi, _ = _plain_sensitivity(flat, phi0 + h)
        if lo is None or hi is None:
            return None
        return 0.5 * (lo + hi)

    g = [sym(h0 / 2**i) for i in range(3)]
    if any(v is None for v in g):
        return None
    # even expansion in h: kill the h^2 then the h^4 term
    r1 = [(4 * g[i + 1] - g[i]) / 3 for i in range(2)]
    return (16 * r1[1] - r1[0]) / 15


def _bracket_width(state: TwoModeState) -> float:
    return 0.02 / (1.0 + math.sqrt(_jz_variance(state)))


def sweet_spot_limit(state: TwoModeState, phi0: float) -> float | None:
    """Limit of the parity sensitivity at ``phi0`` from a shrinking symmetric bracket."""
    flat = _flatten(state)
    return _richardson_limit(flat, phi0, _bracket_width(state))


def parity_sensitivity(state: TwoModeState, phi: float) -> float | None:
    """``sqrt(1 - <Q>^2) / |d<Q>/dphi|``, or ``None`` where the slope vanishes.

    At points where ``<Q> = +-1`` numerator and slope vanish together; there
    the value returned is the limit from either side.
    """
    flat = _flatten(state)
    value, gap = _plain_sensitivity(flat, phi)
    if value is not None:
        return value
    if gap < 1e-12:
        return _richardson_limit(flat, phi, _bracket_width(state))
    return None


# -- scans and minimization -------------------------------------------------------


@dataclass(frozen=True)
class ScanPoint:
    phi: float
    parity_expectation: float
    delta_phi_parity: float | None


@dataclass(frozen=True)
class SensitivityScan:
    points: list[ScanPoint]
    qcrb: float
    best_phi: float | None
    best_delta_phi: float | None

    def to_dict(self) -> dict:
        return asdict(self)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for p in self.points:
            dphi = "nan" if p.delta_phi_parity is None else f"{p.delta_phi_parity:.17g}"
            writer.writerow(
                [f"{p.phi:.17g}", f"{p.parity_expectation:.17g}", dphi, f"{self.qcrb:.17g}"]
            )
        return buf.getvalue()


def _grid_sensitivity(state: TwoModeState, flat: _Flat, phis: np.ndarray):
    val, der = _trig_eval(flat, phis)
    parity = np.clip(val.real, -1.0, 1.0)
    width = _bracket_width(state)
    out: list[float | None] = []
    for phi, pv, dv in zip(phis, parity, der.real):
        one_minus_sq = 1.0 - pv * pv
        if one_minus_sq > 1e-6 and abs(dv) >= DERIVATIVE_FLOOR:
            out.append(math.sqrt(one_minus_sq) / abs(dv))
            continue
        # close to |<Q>| = 1 the direct formula cancels; redo it carefully
        value, gap = _plain_sensitivity(flat, float(phi))
        if value is None and gap < 1e-12:
            value = _richardson_limit(flat, float(phi), width)
        out.append(value)
    return parity, out


def sensitivity_scan(state: TwoModeState, phi_grid: Sequence[float]) -> SensitivityScan:
    phis = np.asarray(list(phi_grid), dtype=float)
    if phis.size == 0:
        raise ValueError("phase grid is empty")
    bound = qcrb(state)
    flat = _flatten(state)
    parity, dphi = _grid_sensitivity(state, flat, phis)
    points = [ScanPoint(float(p), float(v), d) for p, v, d in zip(phis, parity, dphi)]
    defined = [(d, p.phi) for d, p in zip(dphi, points) if d is not None]
    if defined:
        best_d, best_p = min(defined)
    else:
        best_d = best_p = None
    return SensitivityScan(points, bound, best_p, best_d)


def _golden_min(fn, lo: float, hi: float, width: float) -> float:
    inv_phi = (math.sqrt(5) - 1) / 2
    a, b = lo, hi
    c = b - inv_phi * (b - a)
    d = a + inv_phi * (b - a)
    fc, fd = fn(c), fn(d)
    while b - a > width:
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - inv_phi * (b - a)
            fc = fn(c)
        else:
            a, c, fc = c, d, fd
            d = a + inv_phi * (b - a)
            fd = fn(d)
    return 0.5 * (a + b)


def minimize_sensitivity(
    state: TwoModeState, grid_points: int = FALLBACK_GRID, width: float = GOLDEN_WIDTH
) -> tuple[float, float]:
    """Global minimum of the parity sensitivity over ``[0, 2pi)``.

    A uniform grid locates the basin, golden-section search narrows it to
    ``width``; the value at the minimizer is taken as a limit if ``<Q>`` is
    (numerically) +-1 there.
    """
    flat = _flatten(state)
    phis = np.arange(grid_points) * (TWO_PI / grid_points)
    _, dphi = _grid_sensitivity(state, flat, phis)
    vals = np.array([math.inf if d is None else d for d in dphi])
    i = int(np.argmin(vals))
    if not math.isfinite(vals[i]):
        raise UnestimablePhaseError("parity signal carries no phase information")
    step = TWO_PI / grid_points

    def objective(phi: float) -> float:
        value, _ = _plain_sensitivity(flat, phi)
        return math.inf if value is None else value

    phi_star = _golden_min(objective, phis[i] - step, phis[i] + step, width)
    value, gap = _plain_sensitivity(flat, phi_star)
    if gap < 1e-6 or value is None:
        value = _richardson_limit(flat, phi_star, _bracket_width(state))
    if value is None or value > vals[i]:
        phi_star, value = float(phis[i]), float(vals[i])
    return float(phi_star % TWO_PI), float(value)


# -- the S' condition -------------------------------------------------------------


def _is_vacuous(coeffs: np.ndarray, k: int) -> bool:
    scale = float(np.max(np.abs(coeffs)))
    return scale == 0.0 or abs(coeffs[k]) <= VACUOUS_REL * scale


def s_prime(sector: SectorState, index: int, phi: float, chi: float | None = None) -> float:
    """Real part of ``S = i^N (-1)^(j-m) (c_{-m}/c_m) exp(2i m phi)``.

    ``index`` is the position of ``m`` in the descending-m coefficient list.
    When ``chi`` is given and the pair ``(m, -m)`` obeys the path-symmetry
    relation with it, the value is cross-checked against its trigonometric
    form with ``theta_m = arg c_m``.
    """
    n = sector.two_j
    c = np.asarray(sector.coeffs)
    if c[index] == 0:
        raise ZeroDivisionError(f"c_m is zero at index {index}; this m is vacuous")
    m = (n - 2 * index) / 2.0
    s_val = (1j**n) * (-1.0) ** index * c[n - index] / c[index] * np.exp(2j * m * phi)
    result = float(s_val.real)

    if chi is not None:
        theta = float(np.angle(c[index]))
        expected_partner = c[index].conjugate() * np.exp(-2j * chi)
        if abs(c[n - index] - expected_partner) <= 1e-9 * abs(c[index]):
            x = 2 * (m * phi - chi - theta)
            if n % 2 == 0:
                trig = (-1.0) ** round(m) * math.cos(x)
            else:
                trig = (-1.0) ** ((n - 1) // 2) * (-1.0) ** round(n / 2 + m) * math.sin(x)
            if abs(trig - result) > 1e-8:
                raise RuntimeError(f"S' = {result} disagrees with trigonometric form {trig}")
    return result


@dataclass(frozen=True)
class ClaimOneReport:
    satisfied: bool
    phi_star: float | None
    s_prime_values: list[tuple[int, float, float]]  # (total_n, m, S')
    lam: float | None
    sector_signs: dict[int, int] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "satisfied": self.satisfied,
            "phi_star": self.phi_star,
            "s_prime_values": [list(v) for v in self.s_prime_values],
            "lambda": self.lam,
            "sector_signs": {str(k): v for k, v in self.sector_signs.items()},
        }


def claim1_check(state: TwoModeState, phi: float, tol: float = CLAIM_TOL) -> ClaimOneReport:
    """Does parity reach the bound at ``phi``?  Requires ``|S'| = 1`` for every m.

    All populated ``m`` must share the sign of ``S'`` (so that ``<Q> = +-1``);
    with several photon-number sectors the sign must also agree between them.
    """
    _require_internal(state)
    report = check(state, SYMMETRY_TOL)
    if not report.is_path_symmetric:
        raise NotPathSymmetricError(
            f"claim1 needs a path-symmetric state (residual {report.max_residual:.3e})",
            report.max_residual,
        )
    values: list[tuple[int, float, float]] = []
    signs: dict[int, int] = {}
    ok = True
    for s in state.sectors:
        c = np.asarray(s.coeffs)
        chi = report.chi(s.two_j)
        sector_sign = 0
        for k in range(s.two_j + 1):
            if _is_vacuous(c, k):
                continue
            sp = s_prime(s, k, phi, None if math.isnan(chi) else chi)
            m = (s.two_j - 2 * k) / 2.0
            values.append((s.two_j, m, sp))
            if abs(abs(sp) - 1.0) > tol:
                ok = False
                continue
            sign = 1 if sp > 0 else -1
            if sector_sign == 0:
                sector_sign = sign
            elif sign != sector_sign:
                ok = False
        if sector_sign:
            signs[s.two_j] = sector_sign
    if len(set(signs.values())) > 1:
        ok = False

    lam = None
    if ok:
        flat = _flatten(state)
        psi = flat.c * np.exp(-1j * flat.m * phi)
        q_psi = flat.q * psi[flat.mirror]
        mean = np.vdot(psi, q_psi).real
        var_q, _, _ = _stable_terms(flat, phi)
        z = np.vdot(flat.m * psi, q_psi - mean * psi)
        # (Q - <Q>) psi = i lam J_z psi  =>  lam = +- Delta Q / Delta J_z
        lam = math.copysign(math.sqrt(var_q / _jz_variance(state)), z.imag)
    return ClaimOneReport(ok, phi if ok else None, values, lam, signs)


# -- bias phase ---------------------------------------------------------------------


def beta_formula(total_n: int, chi: float, theta_sum: float) -> float:
    """Closed-form bias for a fully populated sector, split by photon-number parity."""
    n = total_n
    if n % 2:
        return -8.0 / (n + 1) ** 2 * ((n + 1) / 2 * chi + theta_sum)
    return -8.0 / (n * (n + 2)) * (n / 2 * chi + theta_sum)


def _sector_beta(sector: SectorState, chi: float) -> float | None:
    """Bias that makes ``theta_m + m beta = -chi`` hold on average over ``m > 0``.

    ``theta_m + chi`` only matters modulo pi; each one is lifted to the branch
    nearest the line through the origin set by the smallest populated ``m``,
    which recovers the exact bias whenever ``theta_m`` is linear in ``m``.
    """
    n = sector.two_j
    c = np.asarray(sector.coeffs)
    ms, offsets = [], []
    slope = None
    for k in range((n + 1) // 2 - 1, -1, -1):  # m > 0 in ascending order
        m = (n - 2 * k) / 2.0
        if m <= 0 or _is_vacuous(c, k):
            continue
        raw = float(np.angle(c[k])) + chi
        if slope is None:
            lifted = (raw + math.pi / 2) % math.pi - math.pi / 2
            slope = lifted / m
        else:
            target = slope * m
            lifted = raw + math.pi * round((target - raw) / math.pi)
        ms.append(m)
        offsets.append(lifted)
    if not ms:
        return None
    full = len(ms) == n // 2 + (n % 2)
    if full:
        theta_sum = math.fsum(offsets) - chi * len(ms)
        return beta_formula(n, chi, theta_sum)
    return -math.fsum(offsets) / math.fsum(ms)


@dataclass(frozen=True)
class BiasReport:
    beta_closed_form: float | None
    claim1_at_sweet_spot: bool
    sweet_spot_phi: float
    numerical_fallback_used: bool
    delta_phi_at_sweet_spot: float | None
    qcrb: float
    beta_per_sector: dict[int, float | None] = field(default_factory=dict)

    def to_dict(self) -> dict:
        out = asdict(self)
        out["beta_per_sector"] = {str(k): v for k, v in self.beta_per_sector.items()}
        return out


def _offsets(state: TwoModeState) -> list[float]:
    if len(state.sectors) > 1:
        return [math.pi / 2, 3 * math.pi / 2]
    if state.sectors[0].two_j % 2:
        return [math.pi / 2, 3 * math.pi / 2]
    return [0.0, math.pi / 2, math.pi, 3 * math.pi / 2]


def bias_phase(state: TwoModeState, tol: float = CLAIM_TOL) -> BiasReport:
    """Predict the sweet spot ``offset - beta`` and confirm it with :func:`claim1_check`.

    Candidates come from each sector's closed-form bias (heaviest sector
    first, plus the copy shifted by pi, which a sector of even photon number
    cannot distinguish) and each allowed offset.  If none passes, fall back
    to :func:`minimize_sensitivity`.
    """
    _require_internal(state)
    report = check(state, SYMMETRY_TOL)
    if not report.is_path_symmetric:
        raise NotPathSymmetricError(
            f"bias phase needs a path-symmetric state (residual {report.max_residual:.3e})",
            report.max_residual,
        )
    bound = qcrb(state)
    betas: dict[int, float | None] = {}
    for s in state.sectors:
        chi = report.chi(s.two_j)
        betas[s.two_j] = None if math.isnan(chi) else _sector_beta(s, chi)

    by_weight = sorted(state.sectors, key=lambda s: -s.norm_sq)
    candidates: list[float] = []
    for s in by_weight:
        beta = betas[s.two_j]
        if beta is None:
            continue
        for b in (beta, beta + math.pi):
            if all(abs(math.remainder(b - x, TWO_PI)) > 1e-9 for x in candidates):
                candidates.append(b)

    for beta in candidates:
        for offset in _offsets(state):
            phi = (offset - beta) % TWO_PI
            if claim1_check(state, phi, tol).satisfied:
                return BiasReport(
                    beta_closed_form=beta,
                    claim1_at_sweet_spot=True,
                    sweet_spot_phi=phi,
                    numerical_fallback_used=False,
                    delta_phi_at_sweet_spot=parity_sensitivity(state, phi),
                    qcrb=bound,
                    beta_per_sector=betas,
                )

    phi, value = minimize_sensitivity(state)
    return BiasReport(
        beta_closed_form=candidates[0] if candidates else None,
        claim1_at_sweet_spot=claim1_check(state, phi, tol).satisfied,
        sweet_spot_phi=phi,
        numerical_fallback_used=True,
        delta_phi_at_sweet_spot=value,
        qcrb=bound,
        beta_per_sector=betas,
    )
