"""Exact linear algebra of the rotating-stratified wave propagator.

The linearized dynamics in Fourier variables is ``d/dt uhat = L(k) uhat``
with a real skew-symmetric 4x4 symbol ``L(k)``.  For every nonzero
wavenumber the symbol has a rank-one kernel direction along the balanced
(geostrophic) vector, a spurious gradient direction (zero on divergence-free
fields), and a conjugate pair of wave branches with frequencies
``+- strat * p(k)`` where the dimensionless frequency factor is

    p(k) = |k_mu| / |k|,     k_mu = (-k2, k1, 0, mu*k3),

``mu`` being the rotation-stratification ratio.  All four eigenvectors are
available in closed form and make an orthonormal basis of C^4; the flow of
the linear system is applied exactly, mode by mode, with unit-modulus phases.

On the vertical axis ``k_H = (k1, k2) = 0`` the closed-form wave vectors
degenerate to 0/0; the limit frame used there is ``(1, +-i, 0, 0)/sqrt(2)``,
which diagonalizes the (purely rotational) symbol on that axis.  Any unit
phase would do: only the induced projections enter the dynamics.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from qglab.spectral import StateField, WaveGrid

__all__ = [
    "symbol",
    "wave_frequency_factor",
    "EigenFrame",
    "eigenframe",
    "FrameField",
    "frame_field",
    "project",
    "projection_matrix_slow",
    "propagate_linear",
    "hessian_det_frequency_factor",
    "projection_gap_bound",
]

_BRANCHES = ("slow", "plus", "minus", "grad")
_ALIASES = {"mu": "slow", "+": "plus", "-": "minus", "n": "grad", "N": "grad"}


def _canon_branch(which: str) -> str:
    which = _ALIASES.get(which, which)
    if which not in _BRANCHES:
        raise ValueError(f"unknown branch {which!r}; expected one of {_BRANCHES}")
    return which


def symbol(xi, rot: float, strat: float) -> np.ndarray:
    """4x4 propagator symbol at one wavenumber.

    ``rot`` is the rotation (Coriolis) frequency, ``strat`` the stratification
    frequency.  The matrix is real and skew-symmetric; its spectrum is
    ``{0, 0, +-i * strat * p(xi)}`` with ``mu = rot/strat``.
    """
    x1, x2, x3 = (float(v) for v in xi)
    nsq = x1 * x1 + x2 * x2 + x3 * x3
    if nsq == 0.0:
        raise ValueError("the propagator symbol is undefined at xi = 0")
    h2 = x1 * x1 + x2 * x2
    return (
        np.array(
            [
                [0.0, rot * x3 * x3, -rot * x2 * x3, -strat * x1 * x3],
                [-rot * x3 * x3, 0.0, rot * x1 * x3, -strat * x2 * x3],
                [rot * x2 * x3, -rot * x1 * x3, 0.0, strat * h2],
                [strat * x1 * x3, strat * x2 * x3, -strat * h2, 0.0],
            ]
        )
        / nsq
    )


def wave_frequency_factor(xi, mu: float) -> float:
    """Dimensionless wave frequency |xi_mu|/|xi|, in [min(1,mu), max(1,mu)]."""
    x1, x2, x3 = (float(v) for v in xi)
    nsq = x1 * x1 + x2 * x2 + x3 * x3
    if nsq == 0.0:
        raise ValueError("frequency factor undefined at xi = 0")
    return float(np.sqrt((x1 * x1 + x2 * x2 + mu * mu * x3 * x3) / nsq))


@dataclass(frozen=True)
class EigenFrame:
    """Orthonormal eigenbasis of the symbol at one wavenumber.

    ``slow`` spans the kernel seen by divergence-free fields, ``grad`` the
    gradient direction, and ``plus``/``minus`` the wave pair with eigenvalues
    ``+- i * strat * freq_factor``.
    """

    xi: tuple[float, float, float]
    mu: float
    slow: np.ndarray
    grad: np.ndarray
    plus: np.ndarray
    minus: np.ndarray
    freq_factor: float

    def basis(self) -> np.ndarray:
        """Rows grad, slow, plus, minus."""
        return np.stack([self.grad, self.slow, self.plus, self.minus])

    def eigenvalues(self, strat: float) -> np.ndarray:
        w = 1j * strat * self.freq_factor
        return np.array([0.0, 0.0, w, -w])


def eigenframe(xi, mu: float) -> EigenFrame:
    """Closed-form eigenframe at one nonzero wavenumber."""
    x1, x2, x3 = (float(v) for v in xi)
    nrm = np.sqrt(x1 * x1 + x2 * x2 + x3 * x3)
    if nrm == 0.0:
        raise ValueError("eigenframe undefined at xi = 0")
    if mu <= 0:
        raise ValueError("mu must be positive")
    h = np.hypot(x1, x2)
    xmu = np.array([-x2, x1, 0.0, mu * x3])
    nmu = np.linalg.norm(xmu)
    grad = np.array([x1, x2, x3, 0.0]) / nrm
    slow = xmu / nmu
    if h == 0.0:
        plus = np.array([1.0, 1j, 0.0, 0.0]) / np.sqrt(2.0)
    else:
        denom = np.sqrt(2.0) * h * nrm * nmu
        plus = (
            np.array(
                [
                    mu * x2 * x3 * nrm + 1j * x1 * x3 * nmu,
                    -mu * x1 * x3 * nrm + 1j * x2 * x3 * nmu,
                    -1j * h * h * nmu,
                    h * h * nrm,
                ]
            )
            / denom
        )
    return EigenFrame(
        xi=(x1, x2, x3),
        mu=float(mu),
        slow=slow.astype(complex),
        grad=grad.astype(complex),
        plus=plus,
        minus=plus.conj(),
        freq_factor=float(nmu / nrm),
    )


class FrameField:
    """Vectorized eigenframe over every nonzero mode of a grid.

    Arrays are shaped like the coefficient grid; the mean mode holds dummy
    values and is excluded by construction from every projection.
    """

    def __init__(self, grid: WaveGrid, mu: float):
        if mu <= 0:
            raise ValueError("mu must be positive")
        self.grid = grid
        self.mu = float(mu)
        k1, k2, k3 = grid.kk[0], grid.kk[1], grid.kk[2]
        ok = grid.admissible
        nsq = grid.k_sq
        safe_nsq = np.where(ok, nsq, 1.0)
        nrm = np.sqrt(safe_nsq)
        h_sq = k1 ** 2 + k2 ** 2
        h = np.sqrt(h_sq)
        mu_sq_arr = h_sq + mu * mu * k3 ** 2
        nmu = np.sqrt(np.where(ok, mu_sq_arr, 1.0))

        self.freq = np.where(ok, nmu / nrm, 0.0)

        self.grad = np.zeros((4,) + grid.n)
        for j, kj in enumerate((k1, k2, k3)):
            self.grad[j] = kj / nrm
        self.grad *= ok

        self.slow = np.zeros((4,) + grid.n)
        self.slow[0] = -k2 / nmu
        self.slow[1] = k1 / nmu
        self.slow[3] = mu * k3 / nmu
        self.slow *= ok

        on_axis = ok & (h_sq == 0.0)
        off_axis = ok & (h_sq > 0.0)
        denom = np.where(off_axis, np.sqrt(2.0) * h * nrm * nmu, 1.0)
        plus = np.zeros((4,) + grid.n, dtype=complex)
        plus[0] = (mu * k2 * k3 * nrm + 1j * k1 * k3 * nmu) / denom
        plus[1] = (-mu * k1 * k3 * nrm + 1j * k2 * k3 * nmu) / denom
        plus[2] = -1j * h_sq * nmu / denom
        plus[3] = h_sq * nrm / denom
        plus *= off_axis
        plus[0] += on_axis / np.sqrt(2.0)
        plus[1] += 1j * on_axis / np.sqrt(2.0)
        self.plus = plus

    def inner(self, coeff: np.ndarray, which: str) -> np.ndarray:
        """Mode-wise C^4 inner product <fhat, b_which>."""
        b = {"slow": self.slow, "grad": self.grad, "plus": self.plus}.get(which)
        if b is None and which == "minus":
            return np.einsum("c...,c...->...", coeff, self.plus)
        return np.einsum("c...,c...->...", coeff, b.conj())

    def branch_vectors(self, which: str) -> np.ndarray:
        if which == "slow":
            return self.slow.astype(complex)
        if which == "grad":
            return self.grad.astype(complex)
        if which == "plus":
            return self.plus
        return self.plus.conj()


@lru_cache(maxsize=16)
def frame_field(grid: WaveGrid, mu: float) -> FrameField:
    """Cached per-(grid, mu) eigenframe; frames are t- and strat-independent."""
    return FrameField(grid, float(mu))


def project(f: StateField, which: str, mu: float) -> StateField:
    """Orthogonal projection of a state onto one spectral branch."""
    which = _canon_branch(which)
    fr = frame_field(f.grid, mu)
    c = fr.inner(f.coeff, which)
    out = fr.branch_vectors(which) * c[None, ...]
    return StateField(f.grid, out)


def projection_matrix_slow(xi, mu: float) -> np.ndarray:
    """Rank-one projector onto the balanced direction, as an explicit matrix.

    Equals ``outer(b_slow, b_slow)``; assembled from its closed entries so it
    can be cross-checked against the outer product.
    """
    x1, x2, x3 = (float(v) for v in xi)
    nmu_sq = x1 * x1 + x2 * x2 + mu * mu * x3 * x3
    if nmu_sq == 0.0 or (x1 == 0.0 and x2 == 0.0 and x3 == 0.0):
        raise ValueError("projection matrix undefined at xi = 0")
    m = np.array(
        [
            [x2 * x2, -x1 * x2, 0.0, -mu * x2 * x3],
            [-x1 * x2, x1 * x1, 0.0, mu * x1 * x3],
            [0.0, 0.0, 0.0, 0.0],
            [-mu * x2 * x3, mu * x1 * x3, 0.0, mu * mu * x3 * x3],
        ]
    )
    return m / nmu_sq


def propagate_linear(f: StateField, t: float, strat: float, mu: float) -> StateField:
    """Exact flow of the linearized system for time ``t``.

    The balanced and gradient parts are constant; the wave parts pick up the
    unit phases ``exp(+-i * t * strat * p(k))``.  Every Sobolev norm is
    preserved exactly (up to roundoff).
    """
    fr = frame_field(f.grid, mu)
    c = f.coeff
    c_grad = fr.inner(c, "grad")
    c_slow = fr.inner(c, "slow")
    c_plus = fr.inner(c, "plus")
    c_minus = fr.inner(c, "minus")
    phase = np.exp(1j * t * strat * fr.freq)
    out = (
        fr.grad * c_grad[None]
        + fr.slow * c_slow[None]
        + fr.plus * (phase * c_plus)[None]
        + fr.plus.conj() * (phase.conj() * c_minus)[None]
    )
    return StateField(f.grid, out)


def hessian_det_frequency_factor(xi, mu: float) -> float:
    """Determinant of the 3x3 Hessian of the frequency factor.

    Closed form ``(mu^2-1)^3 |k_H|^2 k3^4 / (|k|^9 |k_mu|^3)``; identically
    zero when ``mu = 1`` or on the vertical axis, which is exactly the
    degeneracy that kills the dispersive sup-norm decay.
    """
    x1, x2, x3 = (float(v) for v in xi)
    nsq = x1 * x1 + x2 * x2 + x3 * x3
    if nsq == 0.0:
        raise ValueError("Hessian undefined at xi = 0")
    h_sq = x1 * x1 + x2 * x2
    nmu_sq = h_sq + mu * mu * x3 * x3
    return float((mu * mu - 1.0) ** 3 * h_sq * x3 ** 4 / (nsq ** 4.5 * nmu_sq ** 1.5))


def projection_gap_bound(mu: float, nu: float) -> float:
    """Operator-norm bound for the gap between balanced projections at two ratios."""
    return 3.0 * abs(mu - nu) / np.sqrt(mu * nu)
