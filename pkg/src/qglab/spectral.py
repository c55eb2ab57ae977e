"""Periodic-box spectral infrastructure.

Conventions, fixed here and used everywhere else:

* The box is ``[0, L1) x [0, L2) x [0, L3)`` with ``n1 x n2 x n3`` collocation
  points.  Mode index ``m_j`` runs over ``{-n_j/2, ..., n_j/2 - 1}`` in FFT
  order and carries the wavenumber ``k_j = (2*pi/L_j) * m_j``.
* The forward transform carries the ``1/(n1*n2*n3)`` factor, so a pure mode
  ``exp(i k.x)`` has coefficient exactly 1.  With this normalization Parseval
  reads ``sum_k |fhat|^2 = mean_x |f|^2``, and the volume-integrated L^2 norm
  is ``sqrt(vol) * sqrt(sum |fhat|^2)``.
* State fields hold 4 components ``(v1, v2, v3, theta)`` of complex
  coefficients.  Physically real fields have conjugate-symmetric coefficients;
  complex fields (the driven wave parts) are allowed and flagged per use.
* The mean mode ``k = 0`` is kept identically zero: the propagator symbols and
  the anisotropic inversions are singular there.
* The Nyquist planes (any axis at mode ``-n_j/2``) are annihilated by the
  projection and propagation operators: those modes have no mirror partner,
  so no anisotropic symbol can act on them without breaking the reality
  constraint.  Dealiased fields never carry them in the first place.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.fft as _fft

__all__ = [
    "WaveGrid",
    "StateField",
    "make_grid",
    "to_physical",
    "to_spectral",
    "scalar_to_physical",
    "scalar_to_spectral",
    "leray_project",
    "dealias",
    "dealias_scalar",
    "spectral_gradient",
    "zero_mean",
]


@dataclass(frozen=True)
class WaveGrid:
    """Wavenumber lattice of a periodic box.

    Derived arrays (filled in ``__post_init__``):

    ``k1, k2, k3``
        Physical wavenumbers per axis, broadcastable to the full grid shape.
    ``kk``
        Stacked ``(3, n1, n2, n3)`` wavenumber array.
    ``k_sq``
        ``|k|^2`` on the grid; exactly 0 at the mean mode.
    ``nonzero``
        Boolean mask of the modes with ``k != 0``.
    ``dealias_mask``
        2/3-rule mask: keeps modes with ``|m_j| <= n_j/3`` on every axis.
    """

    n: tuple[int, int, int]
    L: tuple[float, float, float]
    k1: np.ndarray = field(init=False, repr=False, compare=False)
    k2: np.ndarray = field(init=False, repr=False, compare=False)
    k3: np.ndarray = field(init=False, repr=False, compare=False)
    kk: np.ndarray = field(init=False, repr=False, compare=False)
    k_sq: np.ndarray = field(init=False, repr=False, compare=False)
    nonzero: np.ndarray = field(init=False, repr=False, compare=False)
    admissible: np.ndarray = field(init=False, repr=False, compare=False)
    dealias_mask: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        for nj in self.n:
            if nj < 4 or nj % 2 != 0:
                raise ValueError(f"grid resolution must be even and >= 4, got {self.n}")
        for Lj in self.L:
            if not Lj > 0:
                raise ValueError(f"box lengths must be positive, got {self.L}")
        axes = []
        modes = []
        for nj, Lj in zip(self.n, self.L):
            m = np.fft.fftfreq(nj, d=1.0 / nj)  # integer modes in FFT order
            modes.append(m)
            axes.append(2.0 * np.pi / Lj * m)
        k1 = axes[0][:, None, None]
        k2 = axes[1][None, :, None]
        k3 = axes[2][None, None, :]
        object.__setattr__(self, "k1", k1)
        object.__setattr__(self, "k2", k2)
        object.__setattr__(self, "k3", k3)
        kk = np.empty((3,) + self.n)
        kk[0], kk[1], kk[2] = np.broadcast_arrays(k1, k2, k3)
        object.__setattr__(self, "kk", kk)
        k_sq = kk[0] ** 2 + kk[1] ** 2 + kk[2] ** 2
        object.__setattr__(self, "k_sq", k_sq)
        object.__setattr__(self, "nonzero", k_sq > 0)
        no_nyquist = (
            (modes[0] != -self.n[0] // 2)[:, None, None]
            & (modes[1] != -self.n[1] // 2)[None, :, None]
            & (modes[2] != -self.n[2] // 2)[None, None, :]
        )
        object.__setattr__(self, "admissible", (k_sq > 0) & no_nyquist)
        keep = (
            (np.abs(modes[0])[:, None, None] <= self.n[0] / 3)
            & (np.abs(modes[1])[None, :, None] <= self.n[1] / 3)
            & (np.abs(modes[2])[None, None, :] <= self.n[2] / 3)
        )
        object.__setattr__(self, "dealias_mask", keep)

    def __hash__(self) -> int:
        return hash((self.n, self.L))

    def __eq__(self, other) -> bool:
        return isinstance(other, WaveGrid) and self.n == other.n and self.L == other.L

    @property
    def shape(self) -> tuple[int, int, int]:
        return self.n

    @property
    def num_points(self) -> int:
        return self.n[0] * self.n[1] * self.n[2]

    @property
    def volume(self) -> float:
        return self.L[0] * self.L[1] * self.L[2]

    @property
    def cell_volume(self) -> float:
        return self.volume / self.num_points

    def points(self) -> np.ndarray:
        """Collocation points, shape (3, n1, n2, n3)."""
        xs = [np.arange(nj) * (Lj / nj) for nj, Lj in zip(self.n, self.L)]
        out = np.empty((3,) + self.n)
        out[0] = xs[0][:, None, None]
        out[1] = xs[1][None, :, None]
        out[2] = xs[2][None, None, :]
        return out


@dataclass(frozen=True)
class StateField:
    """4-component spectral field (v1, v2, v3, theta) on a :class:`WaveGrid`."""

    grid: WaveGrid
    coeff: np.ndarray  # (4, n1, n2, n3) complex

    def __post_init__(self) -> None:
        expected = (4,) + self.grid.n
        if self.coeff.shape != expected:
            raise ValueError(f"coefficient shape {self.coeff.shape} != {expected}")

    def copy(self) -> "StateField":
        return StateField(self.grid, self.coeff.copy())

    def velocity_divergence(self) -> np.ndarray:
        """Mode-wise divergence of the velocity part, ``i k . vhat`` without the i."""
        g = self.grid
        return g.kk[0] * self.coeff[0] + g.kk[1] * self.coeff[1] + g.kk[2] * self.coeff[2]

    def max_divergence(self) -> float:
        """Largest mode-wise |k . vhat| relative to the coefficient scale."""
        scale = float(np.abs(self.coeff).max())
        if scale == 0.0:
            return 0.0
        kscale = float(np.sqrt(self.grid.k_sq.max()))
        return float(np.abs(self.velocity_divergence()).max()) / (scale * kscale)

    def conjugate_symmetry_defect(self) -> float:
        """Max |fhat(-k) - conj(fhat(k))|; zero for physically real fields."""
        flipped = _reflect(self.coeff)
        return float(np.abs(flipped.conj() - self.coeff).max())

    def reflected_conjugate(self) -> "StateField":
        """Field with coefficients conj(fhat(-k)); equals self when real."""
        return StateField(self.grid, _reflect(self.coeff).conj())

    def __add__(self, other: "StateField") -> "StateField":
        _check_same_grid(self.grid, other.grid)
        return StateField(self.grid, self.coeff + other.coeff)

    def __sub__(self, other: "StateField") -> "StateField":
        _check_same_grid(self.grid, other.grid)
        return StateField(self.grid, self.coeff - other.coeff)

    def __mul__(self, a: float) -> "StateField":
        return StateField(self.grid, self.coeff * a)

    __rmul__ = __mul__

    def __neg__(self) -> "StateField":
        return StateField(self.grid, -self.coeff)


def _reflect(c: np.ndarray) -> np.ndarray:
    """Index reversal m -> -m on the trailing three axes (FFT ordering)."""
    out = c
    for ax in (-3, -2, -1):
        out = np.roll(np.flip(out, axis=ax), 1, axis=ax)
    return out


def _check_same_grid(a: WaveGrid, b: WaveGrid) -> None:
    if a != b:
        raise ValueError("fields live on different grids")


def make_grid(n, L) -> WaveGrid:
    """Build a :class:`WaveGrid` from per-axis resolutions and box lengths."""
    n = tuple(int(v) for v in n)
    L = tuple(float(v) for v in L)
    if len(n) != 3 or len(L) != 3:
        raise ValueError("n and L must have 3 entries")
    return WaveGrid(n, L)


def scalar_to_physical(grid: WaveGrid, coeff: np.ndarray) -> np.ndarray:
    """Inverse transform of one scalar coefficient array."""
    return _fft.ifftn(coeff, axes=(-3, -2, -1)) * grid.num_points


def scalar_to_spectral(grid: WaveGrid, samples: np.ndarray) -> np.ndarray:
    """Forward transform of scalar samples (carries the 1/N normalization)."""
    if samples.shape[-3:] != grid.n:
        raise ValueError(f"sample shape {samples.shape} does not match grid {grid.n}")
    return _fft.fftn(samples, axes=(-3, -2, -1)) / grid.num_points


def to_physical(f: StateField) -> np.ndarray:
    """Physical-space samples of all 4 components, shape (4, n1, n2, n3).

    The result is complex; callers holding physically real fields may take
    the real part (the imaginary part is then roundoff).
    """
    return scalar_to_physical(f.grid, f.coeff)


def to_spectral(grid: WaveGrid, samples: np.ndarray) -> StateField:
    """StateField from physical samples of all 4 components."""
    if samples.shape != (4,) + grid.n:
        raise ValueError(f"sample shape {samples.shape} != {(4,) + grid.n}")
    return StateField(grid, scalar_to_spectral(grid, samples))


def zero_mean(f: StateField) -> StateField:
    c = f.coeff.copy()
    c[:, 0, 0, 0] = 0.0
    return StateField(f.grid, c)


def leray_project(f: StateField) -> StateField:
    """Remove the gradient part of the velocity; theta is untouched.

    Mode-wise ``vhat -> vhat - k (k . vhat) / |k|^2``; the mean mode and the
    (reality-incompatible) Nyquist planes are zeroed.
    """
    g = f.grid
    div = f.velocity_divergence()
    factor = np.where(g.admissible, div / np.where(g.admissible, g.k_sq, 1.0), 0.0)
    c = f.coeff * g.admissible
    for j in range(3):
        c[j] -= g.kk[j] * factor
    return StateField(g, c)


def dealias(f: StateField) -> StateField:
    """2/3-rule truncation on all 4 components."""
    return StateField(f.grid, f.coeff * f.grid.dealias_mask)


def dealias_scalar(grid: WaveGrid, coeff: np.ndarray) -> np.ndarray:
    return coeff * grid.dealias_mask


def spectral_gradient(grid: WaveGrid, coeff: np.ndarray) -> np.ndarray:
    """Gradient of a scalar coefficient array: (3, n1, n2, n3), entries i*k_j*fhat."""
    out = np.empty((3,) + grid.n, dtype=complex)
    out[0] = 1j * grid.k1 * coeff
    out[1] = 1j * grid.k2 * coeff
    out[2] = 1j * grid.k3 * coeff
    return out
