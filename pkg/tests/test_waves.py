"""Propagator symbol, eigenframe, projections, exact linear flow."""

import numpy as np
import pytest
from scipy.linalg import expm

from qglab.diagnostics import sobolev_norm
from qglab.spectral import StateField
from qglab.waves import (
    eigenframe,
    frame_field,
    hessian_det_frequency_factor,
    project,
    projection_gap_bound,
    projection_matrix_slow,
    propagate_linear,
    symbol,
    wave_frequency_factor,
)

from conftest import random_field, single_mode


class TestSymbol:
    def test_vertical_wavenumber_rows(self):
        L = symbol((0, 0, 1), rot=2.0, strat=1.0)
        expected = np.array(
            [[0, 2, 0, 0], [-2, 0, 0, 0], [0, 0, 0, 0], [0, 0, 0, 0]], dtype=float
        )
        assert np.allclose(L, expected, atol=1e-15)

    def test_no_rotation_horizontal_wavenumber(self):
        L = symbol((1, 0, 0), rot=0.0, strat=1.0)
        assert L[2, 3] == pytest.approx(1.0)
        assert L[3, 2] == pytest.approx(-1.0)
        L[2, 3] = L[3, 2] = 0.0
        assert np.abs(L).max() == 0.0

    def test_skew_symmetry(self):
        rng = np.random.default_rng(0)
        for _ in range(50):
            xi = rng.normal(size=3)
            L = symbol(xi, rot=rng.uniform(0, 10), strat=rng.uniform(0, 10))
            assert np.abs(L + L.T).max() < 1e-14 * max(np.abs(L).max(), 1.0)

    def test_zero_wavenumber_rejected(self):
        with pytest.raises(ValueError):
            symbol((0, 0, 0), 1.0, 1.0)


class TestFrequencyFactor:
    def test_hand_value(self):
        assert wave_frequency_factor((1, 0, 1), 2.0) == pytest.approx(
            1.5811388300841898, abs=1e-14
        )

    def test_bounds(self):
        rng = np.random.default_rng(1)
        for _ in range(200):
            xi = rng.normal(size=3)
            mu = rng.uniform(0.25, 4.0)
            p = wave_frequency_factor(xi, mu)
            assert min(1.0, mu) - 1e-12 <= p <= max(1.0, mu) + 1e-12

    def test_identity_at_ratio_one(self):
        rng = np.random.default_rng(2)
        for _ in range(50):
            assert wave_frequency_factor(rng.normal(size=3), 1.0) == pytest.approx(1.0)


class TestEigenframe:
    def test_vertical_axis_closed_form(self):
        fr = eigenframe((0, 0, 1), mu=1.7)
        assert np.allclose(fr.slow, [0, 0, 0, 1])
        assert np.allclose(fr.grad, [0, 0, 1, 0])
        assert np.allclose(fr.plus, np.array([1, 1j, 0, 0]) / np.sqrt(2))
        assert fr.freq_factor == pytest.approx(1.7)
        # eigenvalues +- i * strat * mu on the axis
        assert np.allclose(fr.eigenvalues(3.0), [0, 0, 5.1j, -5.1j])

    def test_orthonormal_and_eigen_residual(self):
        rng = np.random.default_rng(3)
        for _ in range(500):
            xi = rng.normal(size=3)
            if np.hypot(xi[0], xi[1]) < 1e-8:
                continue
            mu = rng.uniform(0.25, 4.0)
            strat = rng.uniform(0.5, 100.0)
            fr = eigenframe(xi, mu)
            B = fr.basis()
            assert np.abs(B @ B.conj().T - np.eye(4)).max() < 1e-12
            L = symbol(xi, mu * strat, strat)
            for b, lam in zip(B, fr.eigenvalues(strat)):
                assert np.linalg.norm(L @ b - lam * b) < 1e-12 * np.linalg.norm(L, 2)

    def test_against_dense_eigensolve(self):
        # oracle: numpy's dense eigendecomposition of the symbol
        rng = np.random.default_rng(4)
        for _ in range(25):
            xi = rng.normal(size=3)
            if np.hypot(xi[0], xi[1]) < 1e-3:
                continue
            mu = rng.uniform(0.3, 3.0)
            strat = 2.0
            fr = eigenframe(xi, mu)
            w, V = np.linalg.eig(symbol(xi, mu * strat, strat))
            assert np.abs(w.real).max() < 1e-12
            assert np.allclose(np.sort(w.imag), np.sort(fr.eigenvalues(strat).imag), atol=1e-12)
            # projector onto the +i eigenspace matches the closed-form vector
            j = int(np.argmin(np.abs(w - 1j * strat * fr.freq_factor)))
            v = V[:, j]
            P_dense = np.outer(v, v.conj()) / np.vdot(v, v)
            P_closed = np.outer(fr.plus, fr.plus.conj())
            assert np.abs(P_dense - P_closed).max() < 1e-10

    def test_ratio_one_eigenvalues(self):
        rng = np.random.default_rng(5)
        for _ in range(50):
            xi = rng.normal(size=3)
            fr = eigenframe(xi, 1.0)
            assert fr.freq_factor == pytest.approx(1.0, abs=1e-13)

    def test_zero_rejected(self):
        with pytest.raises(ValueError):
            eigenframe((0, 0, 0), 1.0)


class TestProjections:
    def test_slow_matrix_hand_value(self):
        M = projection_matrix_slow((1, 0, 0), 1.0)
        expected = np.zeros((4, 4))
        expected[1, 1] = 1.0
        assert np.allclose(M, expected, atol=1e-15)

    def test_slow_matrix_vertical_axis_ratio_one(self):
        # at horizontal wavenumber zero the balanced projector keeps only theta
        M = projection_matrix_slow((0, 0, 1), 1.0)
        assert np.allclose(M, np.diag([0, 0, 0, 1.0]), atol=1e-15)

    def test_trace_one_and_outer_product(self):
        rng = np.random.default_rng(6)
        for _ in range(300):
            xi = rng.normal(size=3)
            if np.hypot(xi[0], xi[1]) < 1e-8:
                continue
            mu = rng.uniform(0.25, 4.0)
            M = projection_matrix_slow(xi, mu)
            assert np.trace(M) == pytest.approx(1.0, abs=1e-12)
            fr = eigenframe(xi, mu)
            assert np.abs(M - np.outer(fr.slow, fr.slow.conj())).max() < 1e-14

    def test_single_mode_wave_projection(self, unit_grid):
        fr = eigenframe((0, 1, 2), mu=1.3)
        c = np.zeros((4,) + unit_grid.n, dtype=complex)
        c[:, 0, 1, 2] = fr.plus
        f = StateField(unit_grid, c)
        assert np.abs(project(f, "plus", 1.3).coeff - f.coeff).max() < 1e-13
        assert np.abs(project(f, "slow", 1.3).coeff).max() < 1e-13
        assert np.abs(project(f, "minus", 1.3).coeff).max() < 1e-13

    def test_divergence_free_has_no_gradient_part(self, grid16):
        f = random_field(grid16, seed=20)
        assert np.abs(project(f, "grad", 2.0).coeff).max() < 1e-12 * np.abs(f.coeff).max()

    def test_idempotent_orthogonal_and_complete(self, grid16):
        f = random_field(grid16, seed=21, divergence_free=False)
        mu = 0.8
        parts = {w: project(f, w, mu) for w in ("slow", "plus", "minus", "grad")}
        scale = np.abs(f.coeff).max()
        total = None
        for w, p in parts.items():
            assert np.abs(project(p, w, mu).coeff - p.coeff).max() < 1e-12 * scale
            total = p if total is None else total + p
        assert np.abs(total.coeff - f.coeff).max() < 1e-12 * scale
        i = np.vdot(parts["plus"].coeff, parts["minus"].coeff)
        assert abs(i) < 1e-12 * scale ** 2

    def test_branch_aliases(self, grid16):
        f = random_field(grid16, seed=22)
        assert np.array_equal(project(f, "mu", 1.5).coeff, project(f, "slow", 1.5).coeff)
        assert np.array_equal(project(f, "+", 1.5).coeff, project(f, "plus", 1.5).coeff)
        with pytest.raises(ValueError):
            project(f, "sideways", 1.5)

    def test_projection_continuity_bound(self, grid16):
        rng = np.random.default_rng(7)
        for _ in range(40):
            f = random_field(grid16, seed=int(rng.integers(1 << 30)), divergence_free=False)
            mu, nu = rng.uniform(0.25, 4.0, size=2)
            k = int(rng.integers(0, 3))
            gap = project(f, "slow", mu) - project(f, "slow", nu)
            assert sobolev_norm(gap, k) <= projection_gap_bound(mu, nu) * sobolev_norm(f, k) * (
                1 + 1e-12
            )


class TestPropagate:
    def test_identity_at_t_zero(self, grid16):
        f = random_field(grid16, seed=30)
        out = propagate_linear(f, 0.0, 50.0, 1.5)
        assert np.abs(out.coeff - f.coeff).max() < 1e-13 * np.abs(f.coeff).max()

    def test_balanced_part_is_steady(self, grid16):
        f = project(random_field(grid16, seed=31), "slow", 0.7)
        out = propagate_linear(f, 2.37, 80.0, 0.7)
        assert np.abs(out.coeff - f.coeff).max() < 1e-12 * np.abs(f.coeff).max()

    def test_norm_preservation(self, grid16):
        f = random_field(grid16, seed=32)
        for s in (0.0, 2.0, 4.0):
            n0 = sobolev_norm(f, s)
            n1 = sobolev_norm(propagate_linear(f, 0.61, 120.0, 2.2), s)
            assert abs(n1 - n0) < 1e-12 * n0

    def test_group_property(self, grid16):
        f = random_field(grid16, seed=33)
        a = propagate_linear(propagate_linear(f, 0.3, 40.0, 1.2), 0.5, 40.0, 1.2)
        b = propagate_linear(f, 0.8, 40.0, 1.2)
        assert np.abs(a.coeff - b.coeff).max() < 1e-12 * np.abs(f.coeff).max()

    def test_against_dense_matrix_exponential(self, grid16):
        # oracle: expm of the symbol applied mode by mode
        f = random_field(grid16, seed=34)
        t, strat, mu = 0.37, 55.0, 1.7
        out = propagate_linear(f, t, strat, mu)
        for m in [(1, 0, 0), (1, 2, 13), (0, 0, 2), (2, 15, 1), (5, 5, 5)]:
            xi = np.array([grid16.kk[j][m] for j in range(3)])
            M = expm(t * symbol(xi, mu * strat, strat))
            expected = M @ f.coeff[(slice(None),) + m]
            assert np.abs(expected - out.coeff[(slice(None),) + m]).max() < 1e-12

    def test_preserves_real_fields(self, grid16):
        f = random_field(grid16, seed=35)
        out = propagate_linear(f, 1.1, 33.0, 0.6)
        assert out.conjugate_symmetry_defect() < 1e-13


class TestHessianDeterminant:
    def test_zero_at_ratio_one(self):
        rng = np.random.default_rng(8)
        for _ in range(20):
            assert hessian_det_frequency_factor(rng.normal(size=3), 1.0) == 0.0

    def test_zero_on_vertical_axis(self):
        assert hessian_det_frequency_factor((0, 0, 1.3), 2.0) == 0.0

    def test_hand_value(self):
        v = hessian_det_frequency_factor((1, 0, 1), 2.0)
        assert v == pytest.approx(27.0 / (2 ** 4.5 * 5 ** 1.5), rel=1e-14)
        assert v == pytest.approx(0.10672687103068279, rel=1e-12)

    def test_finite_difference_oracle(self):
        h = 1e-4
        rng = np.random.default_rng(9)
        for mu in (0.5, 2.0, 3.0):
            for _ in range(10):
                xi = rng.normal(size=3)
                nx = np.linalg.norm(xi)
                while not (0.2 * nx < np.hypot(xi[0], xi[1]) and 0.2 * nx < abs(xi[2])):
                    xi = rng.normal(size=3)
                    nx = np.linalg.norm(xi)
                xi /= nx
                H = np.empty((3, 3))
                for i in range(3):
                    for j in range(3):
                        ei = np.eye(3)[i] * h
                        ej = np.eye(3)[j] * h
                        H[i, j] = (
                            wave_frequency_factor(xi + ei + ej, mu)
                            - wave_frequency_factor(xi + ei - ej, mu)
                            - wave_frequency_factor(xi - ei + ej, mu)
                            + wave_frequency_factor(xi - ei - ej, mu)
                        ) / (4 * h * h)
                closed = hessian_det_frequency_factor(xi, mu)
                assert np.linalg.det(H) == pytest.approx(closed, rel=1e-6)


class TestFrameField:
    def test_matches_pointwise_frames(self, grid16):
        fr = frame_field(grid16, 1.45)
        rng = np.random.default_rng(10)
        for _ in range(20):
            m = tuple(int(v) for v in rng.integers(0, 16, size=3))
            if not grid16.admissible[m]:
                continue
            xi = [grid16.kk[j][m] for j in range(3)]
            single = eigenframe(xi, 1.45)
            assert np.allclose(fr.slow[(slice(None),) + m], single.slow.real, atol=1e-13)
            assert np.allclose(fr.grad[(slice(None),) + m], single.grad.real, atol=1e-13)
            assert np.allclose(fr.plus[(slice(None),) + m], single.plus, atol=1e-13)
            assert fr.freq[m] == pytest.approx(single.freq_factor, abs=1e-13)

    def test_cached(self, grid16):
        assert frame_field(grid16, 1.25) is frame_field(grid16, 1.25)
