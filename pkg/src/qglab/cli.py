"""Command-line experiment runner.

One subcommand per scenario; flags can be overridden by a JSON config file
(``--config``), whose keys mirror the flag names.  The default output root
is the current directory or ``QGLAB_OUT_ROOT`` when set.

Exit codes: 0 all clauses pass, 1 a numerical check failed,
2 configuration error, 3 solver blow-up.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from qglab.boussinesq import BlowUpError, CFLViolation
from qglab.harness import SCENARIOS, ExperimentSpec, run

__all__ = ["main", "build_parser"]


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="qglab",
        description="Rotating stratified Boussinesq vs quasi-geostrophic limit: experiment runner",
    )
    sub = p.add_subparsers(dest="scenario", required=True)
    for name in SCENARIOS:
        sp = sub.add_parser(name, help=f"run the {name} scenario")
        sp.add_argument("--mu", type=float, nargs="+", default=None,
                        help="rotation-stratification ratios")
        sp.add_argument("--n-list", type=float, nargs="+", default=None,
                        help="stratification frequencies to sweep")
        sp.add_argument("--grid", type=int, nargs=3, default=None, metavar=("N1", "N2", "N3"))
        sp.add_argument("--box", type=float, nargs=3, default=None, metavar=("L1", "L2", "L3"))
        sp.add_argument("--T", type=float, default=None, help="final time")
        sp.add_argument("--t0", type=float, default=None, help="infimum window length")
        sp.add_argument("--dt", type=float, default=None, help="time step")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--q", type=float, default=None, help="time-integral exponent")
        sp.add_argument("--s", type=int, default=None, help="Sobolev index for difference norms")
        sp.add_argument("--samples", type=int, default=None, help="diagnostic samples per run")
        sp.add_argument("--jobs", type=int, default=1,
                        help="accepted for interface compatibility; members "
                             "currently run sequentially (results are "
                             "identical either way)")
        sp.add_argument("--out", type=Path, default=None, help="output directory")
        sp.add_argument("--config", type=Path, default=None,
                        help="JSON file overriding any of the above keys")
        sp.add_argument("--extra", type=str, default=None,
                        help="JSON object of scenario-specific knobs")
    return p


def _spec_from_args(args: argparse.Namespace) -> ExperimentSpec:
    overrides = {}
    if args.config is not None:
        with open(args.config) as fh:
            overrides = json.load(fh)
    merged = {
        "mu": args.mu,
        "n_list": args.n_list,
        "grid": args.grid,
        "box": args.box,
        "T": args.T,
        "t0": args.t0,
        "dt": args.dt,
        "seed": args.seed,
        "q": args.q,
        "s": args.s,
        "samples": args.samples,
        "jobs": args.jobs,
        "out": args.out,
        "extra": json.loads(args.extra) if args.extra else {},
    }
    for key, val in overrides.items():
        if key not in merged and key != "scenario":
            raise ValueError(f"unknown config key {key!r}")
        if key != "scenario":
            merged[key] = val
    root = Path(os.environ.get("QGLAB_OUT_ROOT", "."))
    out = Path(merged["out"]) if merged["out"] else root / f"qglab-{args.scenario}"
    kwargs = dict(scenario=args.scenario, out_dir=out, seed=int(merged["seed"]),
                  jobs=int(merged["jobs"]), extra=dict(merged["extra"]))
    if merged["mu"] is not None:
        kwargs["mu_values"] = tuple(merged["mu"])
    if merged["n_list"] is not None:
        kwargs["strat_values"] = tuple(merged["n_list"])
    if merged["grid"] is not None:
        kwargs["grid_n"] = tuple(merged["grid"])
    if merged["box"] is not None:
        kwargs["box"] = tuple(merged["box"])
    for flag, attr in (("T", "T"), ("t0", "t0"), ("dt", "dt"), ("q", "q"), ("s", "s"),
                       ("samples", "num_samples")):
        if merged[flag] is not None:
            kwargs[attr] = merged[flag]
    return ExperimentSpec(**kwargs)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        spec = _spec_from_args(args)
    except (ValueError, TypeError, OSError, json.JSONDecodeError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    try:
        summary = run(spec)
    except BlowUpError as exc:
        print(f"solver blow-up: {exc}", file=sys.stderr)
        return 3
    except CFLViolation as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    for clause in summary["clauses"]:
        mark = "PASS" if clause["passed"] else "FAIL"
        print(f"[{mark}] {clause['name']}")
    print(f"artifacts: {spec.out_dir}")
    return 0 if summary["passed"] else 1


if __name__ == "__main__":
    sys.exit(main())
