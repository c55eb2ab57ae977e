"""When is the balanced limit a valid description?  A compact tour.

Three desk-scale experiments with the full nonlinear solver:

1. balanced (well-prepared) data: the distance to the limit flow shrinks
   like 1/strat;
2. unbalanced data at ratio 1: the wave pair keeps its sup norm, and the
   distance never drops below half the largeness constant;
3. the same unbalanced data measured in H^3: the floor holds at every
   ratio, dispersion or not.
"""

import numpy as np

from qglab.boussinesq import SimConfig, solve
from qglab.diagnostics import rate_fit, sobolev_norm, wkinf_norm
from qglab.driven_waves import largeness_constant
from qglab.harness import make_initial_data
from qglab.qg import pv_from_state, qg_solve
from qglab.spectral import make_grid
from qglab.waves import project

grid = make_grid((32, 32, 32), (4 * np.pi,) * 3)
T, wall_n = 0.3, 9
wall = np.linspace(0.0, T, wall_n)


def distance_series(u0, mu, strat, norm):
    qg = qg_solve(pv_from_state(project(u0, "slow", mu), mu), T, dt=2e-3, node_times=wall)
    refs = [qg.state(j) for j in range(wall_n)]
    out = []
    cfg = SimConfig(grid=grid, mu=mu, strat=strat, T=T, dt=5e-3, num_samples=wall_n,
                    store_states=True)
    traj = solve(u0, cfg)
    for j in range(wall_n):
        out.append(norm(traj.states[j] - refs[j]))
    return np.array(out)


print("1) balanced data, ratio 2: sup_t |u - limit|_H3 vs strat")
u_bal = make_initial_data("well-prepared", 0, grid, 2.0)
sups = []
for strat in (50.0, 100.0, 200.0):
    d = distance_series(u_bal, 2.0, strat, lambda f: sobolev_norm(f, 3.0))
    sups.append((strat, float(d.max())))
    print(f"   strat={strat:5.0f}: sup = {d.max():.3e}")
slope, _, _ = rate_fit(sups)
print(f"   fitted slope: {slope:+.3f}  (the 1/strat law)")

print("\n2) unbalanced data, ratio 1: W^(1,inf) distance floor")
u_ill = make_initial_data("ill-prepared", 0, grid, 1.0)
A = largeness_constant(u_ill)["A"]
print(f"   largeness constant A = {A:.4e}")
for strat in (50.0, 400.0):
    d = distance_series(u_ill, 1.0, strat, lambda f: wkinf_norm(f, 1))
    print(f"   strat={strat:5.0f}: inf over [0,{T}] = {d.min():.4f}  (>= A/2 = {A/2:.4e})")

print("\n3) the same data in H^3: the floor is ratio-universal")
for mu in (0.5, 1.0, 2.0):
    u = make_initial_data("ill-prepared", 0, grid, mu)
    floor = 0.5 * sobolev_norm(u - project(u, "slow", mu), 3.0)
    d = distance_series(u, mu, 200.0, lambda f: sobolev_norm(f, 3.0))
    print(f"   mu={mu:3.1f}: inf = {d.min():.4f}  vs half wave content {floor:.4f}")
