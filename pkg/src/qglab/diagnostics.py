"""Norms, rate fits, and diagnostic record streams.

Norm conventions (match the transform normalization in :mod:`qglab.spectral`):

* ``sobolev_norm(f, s) = sqrt( sum_k (1 + |k|^2)^s  sum_c |fhat_c(k)|^2 )``.
  For ``s = 0`` this is the volume-averaged (RMS) L^2 norm by Parseval.
* ``integral_l2_norm`` is the volume-integrated L^2 norm,
  ``sqrt(vol) * sobolev_norm(f, 0)``; it is the one that pairs with pointwise
  sup bounds on balls.
* ``wkinf_norm`` is the grid sup of the pointwise Euclidean component norm,
  plus (for k = 1) the grid sup of the Frobenius norm of the spectral
  gradient.  It is a lower bound of the continuum sup norm; an optional
  2x zero-padded evaluation exists for refinement checks.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field

import numpy as np

from qglab.spectral import StateField, WaveGrid, scalar_to_physical, spectral_gradient

__all__ = [
    "sobolev_norm",
    "integral_l2_norm",
    "wkinf_norm",
    "rate_fit",
    "fixed_slope_intercept",
    "time_infimum",
    "time_supremum",
    "DiagnosticsRecord",
    "RecordStream",
]


def sobolev_norm(f: StateField, s: float) -> float:
    """H^s norm over all 4 components."""
    w = (1.0 + f.grid.k_sq) ** s
    return float(np.sqrt(np.sum(w * np.abs(f.coeff) ** 2)))


def integral_l2_norm(f: StateField) -> float:
    """Volume-integrated L^2 norm, sqrt( int |f|^2 dx )."""
    return float(np.sqrt(f.grid.volume) * sobolev_norm(f, 0.0))


def _oversampled_coeff(grid: WaveGrid, coeff: np.ndarray, factor: int):
    """Zero-pad coefficients onto a ``factor`` x finer grid."""
    if factor == 1:
        return grid, coeff
    n2 = tuple(factor * nj for nj in grid.n)
    fine = WaveGrid(n2, grid.L)
    out = np.zeros(coeff.shape[:-3] + n2, dtype=complex)
    idx = []
    for nj in grid.n:
        half = nj // 2
        idx.append(np.r_[0:half, (factor * nj - half):(factor * nj)])
    src = np.ix_(*[np.r_[0:nj] for nj in grid.n])
    dst = np.ix_(*idx)
    out[(..., *dst)] = coeff[(..., *src)]
    return fine, out


def wkinf_norm(f: StateField, k: int = 1, oversample: int = 1) -> float:
    """Discrete W^{k,inf} norm, k in {0, 1}.

    Grid sup of |f(x)| (Euclidean over components), plus for k = 1 the grid
    sup of |grad f(x)| (Frobenius over components and directions), gradients
    computed spectrally.
    """
    if k not in (0, 1):
        raise ValueError("k must be 0 or 1")
    grid, coeff = _oversampled_coeff(f.grid, f.coeff, oversample)
    phys = scalar_to_physical(grid, coeff)
    value = float(np.sqrt((np.abs(phys) ** 2).sum(axis=0)).max())
    if k == 1:
        grad_sq = np.zeros(grid.n)
        for c in range(4):
            g = spectral_gradient(grid, coeff[c])
            grad_sq += (np.abs(scalar_to_physical(grid, g)) ** 2).sum(axis=0)
        value += float(np.sqrt(grad_sq).max())
    return value


def rate_fit(series, expected_slope: float | None = None):
    """Least-squares fit of log(value) vs log(parameter).

    Returns ``(slope, intercept_constant, residual)`` where the constant is
    ``exp(intercept)`` so the model reads ``value = constant * parameter^slope``.
    ``expected_slope`` is carried through for caller-side assertions only.
    """
    pts = [(float(x), float(y)) for x, y in series]
    if len(pts) < 3:
        raise ValueError("need at least 3 points for a rate fit")
    if any(x <= 0 or y <= 0 for x, y in pts):
        raise ValueError("rate_fit needs positive parameters and values")
    lx = np.log([x for x, _ in pts])
    ly = np.log([y for _, y in pts])
    A = np.stack([lx, np.ones_like(lx)], axis=1)
    (slope, intercept), res, *_ = np.linalg.lstsq(A, ly, rcond=None)
    residual = float(np.sqrt(res[0] / len(pts))) if res.size else 0.0
    return float(slope), float(np.exp(intercept)), residual


def fixed_slope_intercept(series, slope: float) -> float:
    """Best constant c for the model value = c * parameter^slope."""
    pts = [(float(x), float(y)) for x, y in series]
    if any(x <= 0 or y <= 0 for x, y in pts):
        raise ValueError("needs positive parameters and values")
    lx = np.log([x for x, _ in pts])
    ly = np.log([y for _, y in pts])
    return float(np.exp(np.mean(ly - slope * lx)))


def time_infimum(records, norm_name: str, window) -> float:
    """Min of one norm over the sampled times inside ``window = (t0, t1)``."""
    t0, t1 = window
    vals = [r.values[norm_name] for r in records if t0 <= r.time <= t1 and norm_name in r.values]
    if not vals:
        raise ValueError(f"no samples of {norm_name!r} in [{t0}, {t1}]")
    return float(min(vals))


def time_supremum(records, norm_name: str, window) -> float:
    t0, t1 = window
    vals = [r.values[norm_name] for r in records if t0 <= r.time <= t1 and norm_name in r.values]
    if not vals:
        raise ValueError(f"no samples of {norm_name!r} in [{t0}, {t1}]")
    return float(max(vals))


@dataclass
class DiagnosticsRecord:
    """Time-stamped bag of named norm values for one run."""

    run_id: str
    time: float
    values: dict[str, float] = field(default_factory=dict)

    def validate(self) -> None:
        for name, v in self.values.items():
            if not np.isfinite(v) or v < 0:
                raise ValueError(f"norm {name!r} has invalid value {v}")


class RecordStream:
    """Accumulates records for one run and writes them as flat CSV rows.

    CSV schema: ``run_id,time,norm_name,value`` with deterministic float
    formatting, so identical runs produce byte-identical files.
    """

    def __init__(self, run_id: str):
        self.run_id = run_id
        self.records: list[DiagnosticsRecord] = []

    def emit(self, time: float, values: dict[str, float]) -> DiagnosticsRecord:
        rec = DiagnosticsRecord(self.run_id, float(time), dict(values))
        rec.validate()
        if self.records and rec.time < self.records[-1].time:
            raise ValueError("record times must be monotone within a run")
        self.records.append(rec)
        return rec

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["run_id", "time", "norm_name", "value"])
            for rec in self.records:
                for name in sorted(rec.values):
                    w.writerow([rec.run_id, f"{rec.time:.17g}", name, f"{rec.values[name]:.17g}"])

    @staticmethod
    def append_many_csv(path, streams) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["run_id", "time", "norm_name", "value"])
            for stream in streams:
                for rec in stream.records:
                    for name in sorted(rec.values):
                        w.writerow([rec.run_id, f"{rec.time:.17g}", name, f"{rec.values[name]:.17g}"])

    def summary_json(self, path, extra: dict | None = None) -> None:
        payload = {"run_id": self.run_id, "num_records": len(self.records)}
        if extra:
            payload.update(extra)
        with open(path, "w") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
            fh.write("\n")
