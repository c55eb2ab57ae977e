import numpy as np
import pytest

from qglab.spectral import StateField, _reflect, leray_project, make_grid, zero_mean


@pytest.fixture(scope="session")
def grid16():
    return make_grid((16, 16, 16), (4 * np.pi,) * 3)


@pytest.fixture(scope="session")
def unit_grid():
    """2pi box: integer wavenumbers, convenient for hand examples."""
    return make_grid((16, 16, 16), (2 * np.pi,) * 3)


def random_field(grid, seed=0, band=None, divergence_free=True, slope=0.0):
    """Real, mean-free, Nyquist-free random state (shared test helper)."""
    rng = np.random.default_rng(seed)
    c = rng.normal(size=(4,) + grid.n) + 1j * rng.normal(size=(4,) + grid.n)
    c *= grid.admissible
    if band is not None:
        for j, nj in enumerate(grid.n):
            modes = np.fft.fftfreq(nj, 1.0 / nj)
            shape = [1, 1, 1]
            shape[j] = nj
            c *= (np.abs(modes) <= band).reshape(shape)
    if slope:
        c *= (1.0 + grid.k_sq) ** (-slope / 2.0)
    f = StateField(grid, 0.5 * (c + _reflect(c).conj()))
    f = zero_mean(f)
    if divergence_free:
        f = leray_project(f)
    return f


def single_mode(grid, m, component, value=1.0):
    """State with one coefficient set at integer mode index m (plus its mirror
    for a real field when value is real)."""
    c = np.zeros((4,) + grid.n, dtype=complex)
    idx = tuple(mi % ni for mi, ni in zip(m, grid.n))
    c[(component,) + idx] = value
    return StateField(grid, c)
