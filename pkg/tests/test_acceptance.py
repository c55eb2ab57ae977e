"""Acceptance suite: every primary criterion at its stated tolerance.

Each test prints one PASS/FAIL line (run pytest with -s to see them live).
The scenarios behind the criteria are the same ones the CLI exposes; this
module pins their parameters and tolerances.
"""

import time

import numpy as np
import pytest

from qglab.boussinesq import SimConfig, solve
from qglab.diagnostics import sobolev_norm
from qglab.harness import ExperimentSpec, make_initial_data, run
from qglab.qg import PVField, pv_from_state, qg_solve, qg_solve_projected
from qglab.spectral import StateField, make_grid, scalar_to_physical
from qglab.waves import project


def _report(num: int, name: str, ok: bool, detail: str = "") -> None:
    line = f"[criterion {num:2d}] {'PASS' if ok else 'FAIL'}: {name}"
    if detail:
        line += f"  ({detail})"
    print(line)
    assert ok, line


def _clauses_by_name(summary):
    return {c["name"]: c for c in summary["clauses"]}


@pytest.fixture(scope="module")
def out_root(tmp_path_factory):
    return tmp_path_factory.mktemp("acceptance")


@pytest.fixture(scope="module")
def eigen_summary(out_root):
    t0 = time.perf_counter()
    summary = run(ExperimentSpec(scenario="eigen-check", out_dir=out_root / "eigen"))
    summary["elapsed"] = time.perf_counter() - t0
    return summary


def test_criterion_01_eigenstructure(eigen_summary):
    c = _clauses_by_name(eigen_summary)
    ok = (
        c["orthonormality defect < 1e-12"]["passed"]
        and c["eigen residual < 1e-12 of |L|"]["passed"]
        and c["projection sum = identity < 1e-12"]["passed"]
        and eigen_summary["elapsed"] < 10.0
    )
    _report(1, "eigenstructure identities on 10^4 random wavenumbers", ok,
            f"elapsed {eigen_summary['elapsed']:.1f}s")


def test_criterion_02_projection_continuity(out_root):
    t0 = time.perf_counter()
    summary = run(ExperimentSpec(scenario="proj-bound", out_dir=out_root / "proj"))
    elapsed = time.perf_counter() - t0
    ok = summary["passed"] and elapsed < 30.0
    _report(2, "balanced-projection continuity inequality on 10^3 trials", ok,
            f"elapsed {elapsed:.1f}s")


def test_criterion_03_hessian_determinant(eigen_summary):
    c = _clauses_by_name(eigen_summary)
    ok = (
        c["Hessian determinant matches FD oracle < 1e-6"]["passed"]
        and c["Hessian zero at ratio 1 and on the axis"]["passed"]
        and eigen_summary["elapsed"] < 20.0
    )
    _report(3, "Hessian determinant closed form vs finite differences", ok)


def test_criterion_04_dispersive_decay(out_root):
    t0 = time.perf_counter()
    summary = run(ExperimentSpec(scenario="dispersion", out_dir=out_root / "dispersion"))
    elapsed = time.perf_counter() - t0
    c = _clauses_by_name(summary)
    exponent = c["decay exponent at ratio 2.0 in [-0.6, -0.4]"]["details"]["exponent"]
    ok = summary["passed"] and elapsed < 600.0
    _report(4, "sup-norm decay exponent -1/2 at ratio 2; no decay at ratio 1", ok,
            f"exponent {exponent:.3f}, elapsed {elapsed:.0f}s")


def test_criterion_05_solver_conservation(out_root):
    t0 = time.perf_counter()
    grid = make_grid((32, 32, 32), (4 * np.pi,) * 3)
    u0 = make_initial_data("random-bandlimited", 0, grid, 1.0)

    # dt = 2e-3 keeps the interaction-picture nonlinearity resolved at the
    # largest frequency (strat * dt = 2); the exact linear flow makes the
    # per-step cost frequency-independent either way
    drifts, divs, per_step = [], [], []
    for strat in (10.0, 100.0, 1000.0):
        cfg = SimConfig(grid=grid, mu=1.0, strat=strat, T=1.0, dt=2e-3, num_samples=9)
        traj = solve(u0, cfg)
        e = [sobolev_norm(s, 0.0) for s in traj.states]
        drifts.append(max(abs(v - e[0]) for v in e) / e[0])
        divs.append(max(s.max_divergence() for s in traj.states))
        per_step.append(traj.wall_seconds / traj.steps_taken)
    energy_ok = max(drifts) < 1e-6
    div_ok = max(divs) < 1e-10
    cost_ok = max(per_step) / min(per_step) < 1.2

    # QG conservation in the resolved-transport regime (gentle amplitude,
    # low band: the truncated cascade is then negligible over T=1)
    u_qg = make_initial_data("random-bandlimited", 0, grid, 1.1, band=4)
    q0 = pv_from_state(project(u_qg, "slow", 1.1), 1.1)
    q0 = PVField(grid, 0.25 * q0.coeff, 1.1)
    qtraj = qg_solve(q0, 1.0, dt=2e-3, node_times=np.linspace(0, 1, 17))
    l2 = [float(np.linalg.norm(c)) for c in qtraj.q_coeffs]
    sup = [float(np.abs(scalar_to_physical(grid, c)).max()) for c in qtraj.q_coeffs]
    qg_l2_ok = max(abs(v - l2[0]) for v in l2) / l2[0] < 1e-8
    qg_sup_ok = max(abs(v - sup[0]) for v in sup) / sup[0] < 1e-4

    # formulation equivalence after T=1 at the documented step
    mu = 1.4
    u_eq = make_initial_data("well-prepared", 1, grid, mu, band=4)
    wall = np.array([0.0, 0.5, 1.0])
    qt = qg_solve(pv_from_state(u_eq, mu), 1.0, dt=1e-3, node_times=wall)
    _, proj_states = qg_solve_projected(u_eq, mu, 1.0, dt=1e-3, sample_times=wall)
    eq_diff = sobolev_norm(qt.state(2) - proj_states[2], 3.0)
    eq_ok = eq_diff < 1e-6

    elapsed = time.perf_counter() - t0
    ok = all([energy_ok, div_ok, cost_ok, qg_l2_ok, qg_sup_ok, eq_ok]) and elapsed < 600.0
    _report(
        5,
        "conservation, divergence, strat-uniform cost, QG invariants, form equivalence",
        ok,
        f"energy {max(drifts):.1e}, div {max(divs):.1e}, cost ratio "
        f"{max(per_step)/min(per_step):.2f}, qL2 {max(abs(v-l2[0]) for v in l2)/l2[0]:.1e}, "
        f"qSup {max(abs(v-sup[0]) for v in sup)/sup[0]:.1e}, equiv {eq_diff:.1e}, "
        f"elapsed {elapsed:.0f}s",
    )


def test_criterion_06_well_prepared_convergence(out_root):
    t0 = time.perf_counter()
    summary = run(ExperimentSpec(scenario="converge-prepared", out_dir=out_root / "conv"))
    elapsed = time.perf_counter() - t0
    slopes = {mu: f["slope"] for mu, f in summary["extra"]["fits"].items()}
    ok = summary["passed"] and elapsed < 1800.0
    _report(6, "balanced data converges at rate 1/strat for every ratio", ok,
            f"slopes {slopes}, elapsed {elapsed:.0f}s")


def test_criterion_07_hs_nonconvergence(out_root):
    t0 = time.perf_counter()
    summary = run(ExperimentSpec(scenario="nonconverge-hs", out_dir=out_root / "nchs"))
    elapsed = time.perf_counter() - t0
    ok = summary["passed"] and elapsed < 1800.0
    _report(7, "H^3 distance to the limit stays above half the wave content", ok,
            f"elapsed {elapsed:.0f}s")


def test_criterion_08_w1inf_nonconvergence(out_root):
    t0 = time.perf_counter()
    summary = run(ExperimentSpec(scenario="nonconverge-mu1", out_dir=out_root / "ncw"))
    elapsed = time.perf_counter() - t0
    A = summary["extra"]["largeness"]["A"]
    ok = summary["passed"] and elapsed < 900.0
    _report(8, "ratio-1 W^{1,inf} distance stays above half the largeness constant",
            ok, f"A {A:.3e}, elapsed {elapsed:.0f}s")


def test_criterion_09_duhamel_decay(out_root):
    t0 = time.perf_counter()
    summary = run(ExperimentSpec(scenario="duhamel-decay", out_dir=out_root / "duh"))
    elapsed = time.perf_counter() - t0
    slope = summary["extra"]["dev_fit"]["slope"]
    ok = summary["passed"] and elapsed < 1200.0
    _report(9, "driven-wave inhomogeneity decays like 1/strat; residual controlled",
            ok, f"slope {slope:.3f}, elapsed {elapsed:.0f}s")


def test_criterion_10_dichotomy(out_root):
    t0 = time.perf_counter()
    summary = run(ExperimentSpec(scenario="dichotomy", out_dir=out_root / "dich"))
    elapsed = time.perf_counter() - t0
    fast, slow = summary["extra"]["fast"], summary["extra"]["slow"]
    ok = summary["passed"] and elapsed < 2700.0
    _report(10, "fast sequences converge, slow sequences do not", ok,
            f"fast {fast[0]:.3f}->{fast[-1]:.3f}, slow {slow[0]:.3f}->{slow[-1]:.3f}, "
            f"elapsed {elapsed:.0f}s")


def test_criterion_11_continuity(out_root):
    t0 = time.perf_counter()
    s1 = run(ExperimentSpec(scenario="continuity-N", out_dir=out_root / "contN"))
    s2 = run(ExperimentSpec(scenario="continuity-mu", out_dir=out_root / "contMu"))
    elapsed = time.perf_counter() - t0
    ok = s1["passed"] and s2["passed"] and elapsed < 900.0
    _report(11, "solver continuity in strat and limit continuity in the ratio", ok,
            f"slopes {s1['extra']['fit']['slope']:.3f} / {s2['extra']['fit']['slope']:.3f}, "
            f"elapsed {elapsed:.0f}s")
