"""Pseudo-spectral laboratory for rotating stratified Boussinesq flows.

The package integrates the inviscid rotating stratified Boussinesq equations
on a periodic box, the quasi-geostrophic (QG) limit dynamics in both
potential-vorticity and projected form, and the driven linear wave system
used to split solutions into balanced, wave, and residual parts.  A separate
quadrature module measures the dispersive sup-norm decay of the wave
propagator on all of R^3, where the periodic solver cannot.

Entry points:

* :mod:`qglab.spectral`     -- grids, transforms, Leray projection, dealiasing
* :mod:`qglab.waves`        -- linear propagator symbol, eigenframe, projections
* :mod:`qglab.boussinesq`   -- nonlinear solver with exact linear flow
* :mod:`qglab.qg`           -- quasi-geostrophic limit dynamics
* :mod:`qglab.driven_waves` -- wave components driven by the balanced flow
* :mod:`qglab.dispersion`   -- oscillatory-integral decay measurements
* :mod:`qglab.diagnostics`  -- norms, rate fits, record streams
* :mod:`qglab.harness`      -- experiment scenarios behind the CLI
"""

from qglab.boussinesq import SimConfig, solve
from qglab.diagnostics import sobolev_norm, wkinf_norm
from qglab.harness import ExperimentSpec, make_initial_data, run
from qglab.spectral import StateField, WaveGrid, make_grid
from qglab.waves import eigenframe, project, propagate_linear, wave_frequency_factor

__all__ = [
    "ExperimentSpec",
    "SimConfig",
    "StateField",
    "WaveGrid",
    "eigenframe",
    "make_grid",
    "make_initial_data",
    "project",
    "propagate_linear",
    "run",
    "sobolev_norm",
    "solve",
    "wave_frequency_factor",
    "wkinf_norm",
]

__version__ = "0.1.0"
