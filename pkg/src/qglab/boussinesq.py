"""Time integration of the rotating stratified Boussinesq equations.

The amalgamated unknown is ``u = (v, theta)`` with

    du/dt + strat * (extended Leray) J (extended Leray) u
          + (extended Leray)(v . grad) u = 0,

advected by the velocity alone (the fourth slot of the extended gradient is
zero).  The stiff linear part is applied exactly, mode by mode, through the
closed-form eigenframe; the nonlinearity is advanced with a 4th-order
integrating-factor Runge-Kutta scheme.  The time step is therefore set by the
advection alone and the per-step cost is independent of the rotation and
stratification frequencies.

Dealiasing follows the 2/3 rule.  With band-limited initial data the
truncated advection term is skew-symmetric, so the combined L^2 energy
``|v|^2 + |theta|^2`` is conserved up to the RK4 time-stepping error.
"""

from __future__ import annotations

import math
import time as _time
from dataclasses import dataclass

import numpy as np

from qglab.spectral import (
    StateField,
    WaveGrid,
    dealias,
    leray_project,
    scalar_to_physical,
    scalar_to_spectral,
    to_physical,
)
from qglab.waves import frame_field

__all__ = [
    "SimConfig",
    "Trajectory",
    "BlowUpError",
    "CFLViolation",
    "LinearFlow",
    "nonlinear_term",
    "step",
    "solve",
]


class BlowUpError(RuntimeError):
    """Raised when the physical sup norm exceeds the blow-up guard."""

    def __init__(self, time: float, value: float):
        super().__init__(f"solution blew up at t = {time:.6g} (sup = {value:.3e})")
        self.time = time
        self.value = value


class CFLViolation(RuntimeError):
    pass


@dataclass(frozen=True)
class SimConfig:
    """Physical and numerical parameters of one run.

    ``mu`` is the rotation-stratification ratio, ``strat`` the stratification
    frequency; the rotation frequency is the derived product ``mu * strat``.
    ``dt = None`` selects a CFL-based step from the current advection speed.
    """

    grid: WaveGrid
    mu: float
    strat: float
    T: float
    dt: float | None = 5e-3
    cfl: float = 0.3
    use_dealias: bool = True
    nonlinear: bool = True
    num_samples: int = 65
    blowup_factor: float = 1e3
    store_states: bool = True

    def __post_init__(self) -> None:
        if self.mu <= 0:
            raise ValueError("mu must be positive")
        if self.strat < 0:
            raise ValueError("strat must be nonnegative")
        if self.T <= 0:
            raise ValueError("T must be positive")
        if self.num_samples < 2:
            raise ValueError("need at least 2 sample times")

    @property
    def rot(self) -> float:
        """Rotation frequency, exactly mu * strat."""
        return self.mu * self.strat

    def sample_times(self) -> np.ndarray:
        return np.linspace(0.0, self.T, self.num_samples)


@dataclass
class Trajectory:
    """Sampled states of one run on the fixed diagnostic wall of times."""

    times: np.ndarray
    states: list[StateField] | None
    run_id: str = "run"
    steps_taken: int = 0
    wall_seconds: float = 0.0

    def state_at(self, j: int) -> StateField:
        if self.states is None:
            raise ValueError("trajectory was run without state storage")
        return self.states[j]


class LinearFlow:
    """Exact flow of the linear part on a fixed grid at fixed (mu, strat)."""

    def __init__(self, grid: WaveGrid, mu: float, strat: float):
        self.grid = grid
        self.strat = float(strat)
        self.frame = frame_field(grid, mu) if strat > 0 else None

    def phases(self, tau: float) -> np.ndarray | None:
        if self.frame is None:
            return None
        return np.exp(1j * tau * self.strat * self.frame.freq)

    def apply(self, coeff: np.ndarray, phase: np.ndarray | None) -> np.ndarray:
        """Apply the propagator with precomputed wave phases."""
        if phase is None:
            return coeff
        fr = self.frame
        c_grad = fr.inner(coeff, "grad")
        c_slow = fr.inner(coeff, "slow")
        c_plus = fr.inner(coeff, "plus")
        c_minus = fr.inner(coeff, "minus")
        return (
            fr.grad * c_grad[None]
            + fr.slow * c_slow[None]
            + fr.plus * (phase * c_plus)[None]
            + fr.plus.conj() * (phase.conj() * c_minus)[None]
        )


def advection(u: StateField, use_dealias: bool = True) -> StateField:
    """Pseudo-spectral ``(v . grad) u`` on all 4 components, dealiased and
    projected back to the divergence-free, mean-free space."""
    g = u.grid
    # one batched inverse transform: 3 velocity components + 12 gradients
    stack = np.empty((15,) + g.n, dtype=complex)
    stack[:3] = u.coeff[:3]
    for c in range(4):
        stack[3 + 3 * c] = 1j * g.k1 * u.coeff[c]
        stack[4 + 3 * c] = 1j * g.k2 * u.coeff[c]
        stack[5 + 3 * c] = 1j * g.k3 * u.coeff[c]
    phys = scalar_to_physical(g, stack)
    vel = phys[:3]
    adv = np.empty((4,) + g.n, dtype=complex)
    for c in range(4):
        gradc = phys[3 + 3 * c : 6 + 3 * c]
        adv[c] = vel[0] * gradc[0] + vel[1] * gradc[1] + vel[2] * gradc[2]
    out = StateField(g, scalar_to_spectral(g, adv))
    if use_dealias:
        out = dealias(out)
    return leray_project(out)


def nonlinear_term(u: StateField, use_dealias: bool = True) -> StateField:
    """The advection term as it enters the equation (positive sign)."""
    return advection(u, use_dealias)


def _rhs(coeff: np.ndarray, grid: WaveGrid, cfg: SimConfig) -> np.ndarray:
    u = StateField(grid, coeff)
    return -advection(u, cfg.use_dealias).coeff


def _ifrk4(coeff: np.ndarray, h: float, flow: LinearFlow, half_phase, cfg: SimConfig) -> np.ndarray:
    """One integrating-factor RK4 step of size h (half_phase = phases(h/2))."""
    grid = cfg.grid
    if not cfg.nonlinear:
        full = None if half_phase is None else half_phase * half_phase
        return flow.apply(coeff, full)
    E = lambda c: flow.apply(c, half_phase)
    a1 = _rhs(coeff, grid, cfg)
    u_mid = E(coeff)
    b = E(a1)
    q2 = _rhs(u_mid + 0.5 * h * b, grid, cfg)
    q3 = _rhs(u_mid + 0.5 * h * q2, grid, cfg)
    u_full = E(u_mid)
    Eq3 = E(q3)
    q4 = _rhs(u_full + h * Eq3, grid, cfg)
    return u_full + (h / 6.0) * (E(b) + 2.0 * E(q2) + 2.0 * Eq3 + q4)


def step(u: StateField, dt: float, cfg: SimConfig) -> StateField:
    """Advance one step of size dt (exact linear flow + IFRK4 nonlinearity)."""
    flow = LinearFlow(cfg.grid, cfg.mu, cfg.strat)
    out = _ifrk4(u.coeff, dt, flow, flow.phases(dt / 2.0), cfg)
    return StateField(cfg.grid, out)


def _max_speed(u: StateField) -> float:
    vel = scalar_to_physical(u.grid, u.coeff[:3])
    return float(np.sqrt((np.abs(vel) ** 2).sum(axis=0)).max())


def _sup_norm(u: StateField) -> float:
    phys = to_physical(u)
    return float(np.sqrt((np.abs(phys) ** 2).sum(axis=0)).max())


def solve(u0: StateField, cfg: SimConfig, sink=None, run_id: str = "run") -> Trajectory:
    """Integrate to T, sampling on the fixed diagnostic wall.

    ``sink(t, state)`` is called at every sample time.  Raises
    :class:`BlowUpError` if the physical sup norm exceeds the guard and
    :class:`CFLViolation` if the configured dt violates the advective CFL
    condition at a sample time.
    """
    if u0.grid != cfg.grid:
        raise ValueError("initial state grid does not match config grid")
    state = dealias(u0) if cfg.use_dealias else u0.copy()
    flow = LinearFlow(cfg.grid, cfg.mu, cfg.strat)
    k_max = float(np.sqrt(cfg.grid.k_sq.max()))
    sup0 = _sup_norm(state)
    guard = cfg.blowup_factor * max(sup0, 1e-30)
    times = cfg.sample_times()
    states = [state] if cfg.store_states else None
    if sink is not None:
        sink(0.0, state)
    coeff = state.coeff
    steps = 0
    t_start = _time.perf_counter()
    for j in range(len(times) - 1):
        seg = times[j + 1] - times[j]
        if cfg.dt is None:
            speed = max(_max_speed(StateField(cfg.grid, coeff)), 1e-12)
            dt_target = cfg.cfl / (speed * k_max)
        else:
            dt_target = cfg.dt
        n_sub = max(1, math.ceil(seg / dt_target - 1e-12))
        h = seg / n_sub
        half_phase = flow.phases(h / 2.0)
        for _ in range(n_sub):
            coeff = _ifrk4(coeff, h, flow, half_phase, cfg)
            steps += 1
        if not np.isfinite(coeff).all():
            raise BlowUpError(times[j + 1], float("inf"))
        snap = StateField(cfg.grid, coeff)
        sup = _sup_norm(snap)
        if sup > guard:
            raise BlowUpError(times[j + 1], sup)
        if cfg.dt is not None and cfg.nonlinear:
            speed = _max_speed(snap)
            if cfg.dt * speed * k_max > cfg.cfl * (1.0 + 1e-9):
                raise CFLViolation(
                    f"dt = {cfg.dt} violates CFL at t = {times[j+1]:.4g}: "
                    f"dt * speed * k_max = {cfg.dt * speed * k_max:.3g} > {cfg.cfl}"
                )
        if cfg.store_states:
            states.append(snap)
        if sink is not None:
            sink(float(times[j + 1]), snap)
    return Trajectory(
        times=times,
        states=states,
        run_id=run_id,
        steps_taken=steps,
        wall_seconds=_time.perf_counter() - t_start,
    )
