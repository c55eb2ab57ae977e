"""Initial data, experiment specs, memoization, CLI contract."""

import json
import subprocess
import sys

import numpy as np
import pytest

from qglab.diagnostics import sobolev_norm
from qglab.harness import ExperimentSpec, make_initial_data, run
from qglab.io import RunCache, config_hash, load_checkpoint, save_checkpoint
from qglab.spectral import make_grid
from qglab.waves import project


@pytest.fixture(scope="module")
def grid32():
    return make_grid((32, 32, 32), (4 * np.pi,) * 3)


class TestInitialData:
    def test_common_contracts(self, grid32):
        for kind in ("random-bandlimited", "well-prepared", "ill-prepared"):
            u = make_initial_data(kind, 3, grid32, 1.5)
            assert sobolev_norm(u, 6) == pytest.approx(1.0, rel=1e-12)
            assert u.max_divergence() < 1e-12
            assert abs(u.coeff[:, 0, 0, 0]).max() == 0.0
            assert u.conjugate_symmetry_defect() < 1e-13

    def test_well_prepared_has_no_wave_part(self, grid32):
        u = make_initial_data("well-prepared", 0, grid32, 2.0)
        wave = u - project(u, "slow", 2.0)
        assert sobolev_norm(wave, 6) < 1e-12

    def test_ill_prepared_floor(self, grid32):
        for mu in (0.5, 1.0, 2.0):
            u = make_initial_data("ill-prepared", 0, grid32, mu)
            wave = u - project(u, "slow", mu)
            assert sobolev_norm(wave, 3) >= 0.1

    def test_band_limit(self, grid32):
        u = make_initial_data("random-bandlimited", 1, grid32, 1.0)
        c = np.abs(u.coeff)
        modes = np.fft.fftfreq(32, 1 / 32)
        high = np.abs(modes) > 8
        assert c[:, high, :, :].max() == 0.0
        assert c[:, :, high, :].max() == 0.0
        assert c[:, :, :, high].max() == 0.0

    def test_deterministic_per_seed(self, grid32):
        a = make_initial_data("ill-prepared", 7, grid32, 1.0)
        b = make_initial_data("ill-prepared", 7, grid32, 1.0)
        c = make_initial_data("ill-prepared", 8, grid32, 1.0)
        assert np.array_equal(a.coeff, b.coeff)
        assert not np.array_equal(a.coeff, c.coeff)

    def test_unknown_kind(self, grid32):
        with pytest.raises(ValueError):
            make_initial_data("prepared-ish", 0, grid32, 1.0)


class TestExperimentSpec:
    def test_unknown_scenario(self, tmp_path):
        with pytest.raises(ValueError):
            ExperimentSpec(scenario="warp-drive", out_dir=tmp_path)

    def test_window_validation(self, tmp_path):
        with pytest.raises(ValueError):
            ExperimentSpec(scenario="nonconverge-hs", out_dir=tmp_path, t0=0.0)
        with pytest.raises(ValueError):
            ExperimentSpec(scenario="nonconverge-hs", out_dir=tmp_path, t0=2.0, T=1.0)

    def test_default_mus_filled(self, tmp_path):
        spec = ExperimentSpec(scenario="converge-prepared", out_dir=tmp_path)
        assert spec.mu_values == (0.5, 1.0, 2.0)


class TestScenarioPlumbing:
    def test_eigen_check_artifacts_and_determinism(self, tmp_path):
        extra = {"frame_samples": 300, "hessian_samples": 60}
        s1 = run(ExperimentSpec(scenario="eigen-check", out_dir=tmp_path / "a",
                                seed=5, extra=extra))
        s2 = run(ExperimentSpec(scenario="eigen-check", out_dir=tmp_path / "b",
                                seed=5, extra=extra))
        assert s1["passed"] and s2["passed"]
        rec1 = (tmp_path / "a" / "records.csv").read_bytes()
        rec2 = (tmp_path / "b" / "records.csv").read_bytes()
        assert rec1 == rec2
        assert (tmp_path / "a" / "summary.json").exists()

    def test_proj_bound_small(self, tmp_path):
        s = run(ExperimentSpec(scenario="proj-bound", out_dir=tmp_path,
                               seed=2, extra={"trials": 60}))
        assert s["passed"]

    def test_sweep_resume_uses_cache(self, tmp_path):
        import time

        spec = dict(scenario="converge-prepared", out_dir=tmp_path, seed=1,
                    mu_values=(2.0,), strat_values=(50.0, 100.0, 200.0),
                    grid_n=(16, 16, 16), T=0.1, t0=0.05, dt=5e-3, num_samples=9)
        t0 = time.perf_counter()
        s1 = run(ExperimentSpec(**spec))
        first = time.perf_counter() - t0
        rec1 = (tmp_path / "records.csv").read_bytes()
        t0 = time.perf_counter()
        s2 = run(ExperimentSpec(**spec))
        second = time.perf_counter() - t0
        rec2 = (tmp_path / "records.csv").read_bytes()
        assert rec1 == rec2
        assert second < first / 2
        assert s1["extra"]["fits"] == s2["extra"]["fits"]


class TestCheckpointFormat:
    def test_roundtrip(self, tmp_path):
        arr = np.arange(8, dtype=complex).reshape(2, 2, 2) * (1 + 2j)
        path = tmp_path / "state.npz"
        save_checkpoint(path, "boussinesq", {"mu": 1.5, "strat": 10.0}, {"coeff": arr}, 0.25)
        back = load_checkpoint(path)
        assert back["form"] == "boussinesq"
        assert back["config"] == {"mu": 1.5, "strat": 10.0}
        assert back["time"] == 0.25
        assert np.array_equal(back["coeff"], arr)

    def test_hash_stability(self):
        a = config_hash({"b": 1, "a": [1, 2]})
        b = config_hash({"a": [1, 2], "b": 1})
        assert a == b
        assert a != config_hash({"a": [1, 2], "b": 2})


class TestCLI:
    def _run(self, *args):
        return subprocess.run(
            [sys.executable, "-m", "qglab.cli", *args],
            capture_output=True, text=True,
        )

    def test_success_exit_zero(self, tmp_path):
        r = self._run("eigen-check", "--out", str(tmp_path / "e"),
                      "--extra", '{"frame_samples": 200, "hessian_samples": 60}')
        assert r.returncode == 0, r.stderr
        assert "[PASS]" in r.stdout

    def test_bad_configuration_exit_two(self, tmp_path):
        r = self._run("nonconverge-hs", "--t0", "5.0", "--T", "1.0",
                      "--out", str(tmp_path / "x"))
        assert r.returncode == 2

    def test_bad_config_file_key(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"warp": 9}))
        r = self._run("eigen-check", "--config", str(cfg), "--out", str(tmp_path / "y"))
        assert r.returncode == 2

    def test_unknown_scenario_exit_two(self):
        r = self._run("does-not-exist")
        assert r.returncode == 2
