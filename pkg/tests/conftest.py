import numpy as np
import pytest

from paritymzi.states import Stage, TwoModeState
from paritymzi.su2 import SectorState, m_values


def random_sector(rng: np.random.Generator, two_j: int) -> SectorState:
    c = rng.normal(size=two_j + 1) + 1j * rng.normal(size=two_j + 1)
    return SectorState(two_j, c / np.linalg.norm(c))


def symmetric_sector(rng, two_j, chi=None, theta=None, radii=None) -> SectorState:
    """Path-symmetric coefficients c_m = r_m e^{i theta_m}, c_{-m} = conj(c_m) e^{-2i chi}."""
    chi = rng.uniform(0, np.pi) if chi is None else chi
    m = m_values(two_j)
    r = rng.uniform(0.5, 1.5, size=two_j + 1) if radii is None else np.asarray(radii, float)
    r = 0.5 * (r + r[::-1])
    th = rng.uniform(-np.pi, np.pi, size=two_j + 1) if theta is None else np.asarray(theta, float)
    c = np.zeros(two_j + 1, dtype=complex)
    for k, mk in enumerate(m):
        if mk > 0:
            c[k] = r[k] * np.exp(1j * th[k])
            c[two_j - k] = np.conj(c[k]) * np.exp(-2j * chi)
        elif mk == 0:
            c[k] = r[k] * np.exp(-1j * chi)
    return SectorState(two_j, c / np.linalg.norm(c))


def internal(*sectors) -> TwoModeState:
    return TwoModeState.build(sectors, Stage.INTERNAL)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
