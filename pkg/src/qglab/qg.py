"""Quasi-geostrophic limit dynamics in two equivalent forms.

Potential-vorticity form (the production path): a single scalar

    dq/dt + v_H . grad_H q = 0,      q = (d11 + d22 + mu^2 d33) psi,
    v_H = (-d2 psi, d1 psi),

advanced with pseudo-spectral RK4.  Projected form (for cross-validation):
the 4-component state constrained to the balanced spectral branch,

    du/dt + P_slow[(v . grad) u] = 0,      P_slow u = u.

The two are linked by the anisotropic streamfunction inversion and the lift

    u = (-d2 psi, d1 psi, 0, mu * d3 psi),

which lands exactly on the balanced branch and is divergence-free with zero
third velocity component.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from qglab.boussinesq import BlowUpError, advection
from qglab.spectral import (
    StateField,
    WaveGrid,
    dealias_scalar,
    scalar_to_physical,
    scalar_to_spectral,
)
from qglab.waves import project

__all__ = [
    "PVField",
    "invert_pv",
    "lift",
    "pv_from_state",
    "qg_step_pv",
    "qg_step_projected",
    "QGTrajectory",
    "qg_solve",
    "qg_solve_projected",
]


@dataclass(frozen=True)
class PVField:
    """Spectral pseudo-potential-vorticity scalar at one ratio ``mu``."""

    grid: WaveGrid
    coeff: np.ndarray  # (n1, n2, n3) complex
    mu: float

    def __post_init__(self) -> None:
        if self.coeff.shape != self.grid.n:
            raise ValueError("coefficient shape does not match grid")
        if self.mu <= 0:
            raise ValueError("mu must be positive")


def _aniso_laplace_symbol(grid: WaveGrid, mu: float) -> np.ndarray:
    """|k_mu|^2 = k1^2 + k2^2 + mu^2 k3^2 (positive away from the mean mode)."""
    return grid.kk[0] ** 2 + grid.kk[1] ** 2 + (mu * grid.kk[2]) ** 2


def invert_pv(q: PVField) -> np.ndarray:
    """Streamfunction coefficients solving the anisotropic Poisson problem.

    ``psihat = -qhat / |k_mu|^2`` on nonzero modes; rejects nonzero-mean input.
    """
    if abs(q.coeff[0, 0, 0]) > 1e-13 * max(np.abs(q.coeff).max(), 1e-300):
        raise ValueError("potential vorticity must be mean-free")
    sym = _aniso_laplace_symbol(q.grid, q.mu)
    psi = np.where(q.grid.nonzero, -q.coeff / np.where(q.grid.nonzero, sym, 1.0), 0.0)
    return psi


def lift(grid: WaveGrid, psi: np.ndarray, mu: float) -> StateField:
    """State with components (-d2 psi, d1 psi, 0, mu d3 psi)."""
    out = np.zeros((4,) + grid.n, dtype=complex)
    out[0] = -1j * grid.kk[1] * psi
    out[1] = 1j * grid.kk[0] * psi
    out[3] = mu * 1j * grid.kk[2] * psi
    return StateField(grid, out)


def pv_from_state(u: StateField, mu: float) -> PVField:
    """q = -d2 u1 + d1 u2 + mu d3 u4 (spectrally)."""
    g = u.grid
    q = 1j * (-g.kk[1] * u.coeff[0] + g.kk[0] * u.coeff[1] + mu * g.kk[2] * u.coeff[3])
    return PVField(g, q, mu)


def _pv_rhs(grid: WaveGrid, qc: np.ndarray, mu: float) -> np.ndarray:
    """-(v_H . grad_H) q, dealiased, mean-free."""
    psi = invert_pv(PVField(grid, qc, mu))
    v1 = scalar_to_physical(grid, -1j * grid.kk[1] * psi)
    v2 = scalar_to_physical(grid, 1j * grid.kk[0] * psi)
    g1 = scalar_to_physical(grid, 1j * grid.kk[0] * qc)
    g2 = scalar_to_physical(grid, 1j * grid.kk[1] * qc)
    rhs = scalar_to_spectral(grid, -(v1 * g1 + v2 * g2))
    rhs = dealias_scalar(grid, rhs)
    rhs[0, 0, 0] = 0.0
    return rhs


def qg_step_pv(q: PVField, dt: float) -> PVField:
    """RK4 step of the horizontal PV transport."""
    g, mu = q.grid, q.mu
    k1 = _pv_rhs(g, q.coeff, mu)
    k2 = _pv_rhs(g, q.coeff + 0.5 * dt * k1, mu)
    k3 = _pv_rhs(g, q.coeff + 0.5 * dt * k2, mu)
    k4 = _pv_rhs(g, q.coeff + dt * k3, mu)
    return PVField(g, q.coeff + (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4), mu)


def _projected_rhs(u: StateField, mu: float) -> StateField:
    return -1.0 * project(advection(u, use_dealias=True), "slow", mu)


def qg_step_projected(u: StateField, dt: float, mu: float) -> StateField:
    """RK4 step of the projected form; every stage is re-projected."""
    p = lambda f: project(f, "slow", mu)
    k1 = _projected_rhs(u, mu)
    k2 = _projected_rhs(p(u + 0.5 * dt * k1), mu)
    k3 = _projected_rhs(p(u + 0.5 * dt * k2), mu)
    k4 = _projected_rhs(p(u + dt * k3), mu)
    return p(u + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4))


@dataclass
class QGTrajectory:
    """PV snapshots on a node wall, densely enough for later quadrature."""

    grid: WaveGrid
    mu: float
    times: np.ndarray
    q_coeffs: list[np.ndarray]

    def pv(self, j: int) -> PVField:
        return PVField(self.grid, self.q_coeffs[j], self.mu)

    def streamfunction(self, j: int) -> np.ndarray:
        return invert_pv(self.pv(j))

    def state(self, j: int) -> StateField:
        """Lifted balanced state at node j."""
        return lift(self.grid, self.streamfunction(j), self.mu)

    def index_of(self, t: float) -> int:
        j = int(np.argmin(np.abs(self.times - t)))
        if abs(self.times[j] - t) > 1e-9 * max(1.0, abs(t)):
            raise ValueError(f"time {t} is not on the node wall")
        return j


def qg_solve(
    q0: PVField,
    T: float,
    dt: float = 2e-3,
    node_times: np.ndarray | None = None,
    blowup_factor: float = 1e3,
) -> QGTrajectory:
    """Integrate the PV transport, storing q on the node wall.

    ``node_times`` defaults to 129 equispaced nodes on [0, T]; it must start
    at 0 and end at T.
    """
    if node_times is None:
        node_times = np.linspace(0.0, T, 129)
    node_times = np.asarray(node_times, dtype=float)
    if abs(node_times[0]) > 1e-14 or abs(node_times[-1] - T) > 1e-12:
        raise ValueError("node wall must span [0, T]")
    g, mu = q0.grid, q0.mu
    qc = dealias_scalar(g, q0.coeff)
    sup0 = float(np.abs(scalar_to_physical(g, qc)).max())
    guard = blowup_factor * max(sup0, 1e-30)
    out = [qc.copy()]
    cur = PVField(g, qc, mu)
    for j in range(len(node_times) - 1):
        seg = node_times[j + 1] - node_times[j]
        n_sub = max(1, math.ceil(seg / dt - 1e-12))
        h = seg / n_sub
        for _ in range(n_sub):
            cur = qg_step_pv(cur, h)
        if not np.isfinite(cur.coeff).all():
            raise BlowUpError(node_times[j + 1], float("inf"))
        sup = float(np.abs(scalar_to_physical(g, cur.coeff)).max())
        if sup > guard:
            raise BlowUpError(node_times[j + 1], sup)
        out.append(cur.coeff.copy())
    return QGTrajectory(grid=g, mu=mu, times=node_times, q_coeffs=out)


def qg_solve_projected(
    u0: StateField,
    mu: float,
    T: float,
    dt: float = 2e-3,
    sample_times: np.ndarray | None = None,
) -> tuple[np.ndarray, list[StateField]]:
    """Integrate the projected form; returns sampled balanced states."""
    if sample_times is None:
        sample_times = np.linspace(0.0, T, 65)
    sample_times = np.asarray(sample_times, dtype=float)
    u = project(u0, "slow", mu)
    states = [u]
    for j in range(len(sample_times) - 1):
        seg = sample_times[j + 1] - sample_times[j]
        n_sub = max(1, math.ceil(seg / dt - 1e-12))
        h = seg / n_sub
        for _ in range(n_sub):
            u = qg_step_projected(u, h, mu)
        if not np.isfinite(u.coeff).all():
            raise BlowUpError(sample_times[j + 1], float("inf"))
        states.append(u)
    return sample_times, states
