"""Command-line interface.

Subcommands:

* ``validate --config FILE``        parse-only check of a scenario
* ``run --config FILE --out DIR``   run it, writing snapshots and series
* ``eigen --config FILE``           hyperbolicity report along a snapshot
* ``report --out DIR``              render figures for a finished run

Exit codes: 0 success, 2 configuration error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from .diagnostics import nlayer_eigen
from .errors import ConfigurationError, NumericalError
from .exchange import interface_velocity
from .scenario import load_scenario
from .snapshots import SeriesWriter, snapshot_filename, write_snapshot
from .stepper import advance, compute_step_terms

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


def _load(path):
    try:
        return load_scenario(path)
    except FileNotFoundError:
        raise ConfigurationError([f"config file not found: {path}"])


def _apply_overrides(scenario, args):
    if getattr(args, "order", None) is not None:
        if args.order not in (1, 2):
            raise ConfigurationError(["--order must be 1 or 2"])
        scenario.order = args.order
    if getattr(args, "tend", None) is not None:
        if args.tend < 0.0:
            raise ConfigurationError(["--tend must be non-negative"])
        scenario.t_end = args.tend
    if getattr(args, "snapshots", None) is not None:
        scenario.snapshot_interval = args.snapshots
    return scenario


def cmd_validate(args):
    _load(args.config)
    print("configuration ok")
    return EXIT_OK


def cmd_run(args):
    scenario = _apply_overrides(_load(args.config), args)
    model, state = scenario.build()
    os.makedirs(args.out, exist_ok=True)
    with open(os.path.join(args.out, "scenario.ini"), "w",
              encoding="utf-8") as fh:
        fh.write(scenario.serialize())
    series = SeriesWriter(os.path.join(args.out, "series.csv"))
    counter = {"index": 0}

    def on_snapshot(snap):
        path = os.path.join(args.out, snapshot_filename(counter["index"]))
        write_snapshot(path, snap.state, model)
        series.append(snap.state.t, snap.dt, snap.mass, snap.energy)
        print(f"t = {snap.state.t:.6g}  dt = {snap.dt:.3e}  "
              f"mass = {snap.mass:.12g}  energy = {snap.energy:.12g}")
        counter["index"] += 1

    interval = scenario.snapshot_interval or None
    result = advance(model, state, scenario.t_end,
                     snapshot_interval=interval, on_snapshot=on_snapshot)
    print(f"finished at t = {result.state.t:.6g} after {result.steps} steps")
    if args.figures:
        from .figures import render_run_figures

        for path in render_run_figures(args.out):
            print(f"wrote {path}")
    return EXIT_OK


def cmd_eigen(args):
    scenario = _apply_overrides(_load(args.config), args)
    model, state = scenario.build()
    if scenario.t_end > 0.0 and getattr(args, "tend", None) != 0.0:
        state = advance(model, state, scenario.t_end).state
    terms = compute_step_terms(model, state)
    u = terms.velocities
    dry = model.config.dry_threshold
    wet = np.flatnonzero(state.H > dry)
    if wet.size == 0:
        print("all columns dry; nothing to analyse")
        return EXIT_OK
    worst = None
    print(f"hyperbolicity along snapshot at t = {state.t:.6g} "
          f"({wet.size} wet columns, N = {model.part.n_layers})")
    for i in wet:
        if model.part.n_layers > 1:
            u_iface = interface_velocity(u[:-1, i], u[1:, i],
                                         terms.exchange_rates[:, i])
        else:
            u_iface = np.zeros(0)
        rep = nlayer_eigen(state.H[i], u[:, i], u_iface, model.part,
                           model.phys.gravity)
        if worst is None or rep.max_imag > worst[1].max_imag:
            worst = (i, rep)
    i, rep = worst
    print(f"max |Im(lambda)| over columns: {rep.max_imag:.3e} "
          f"(column {i}, x = {model.grid.x[i]:.6g})")
    print(f"spectral radius there: {rep.spectral_radius:.6g}; "
          f"real and distinct: {rep.real_and_distinct}")
    with np.printoptions(precision=6, suppress=True):
        print(f"eigenvalues (column {i}): {rep.eigenvalues}")
    return EXIT_OK


def cmd_report(args):
    from .figures import render_run_figures

    for path in render_run_figures(args.out):
        print(f"wrote {path}")
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog="mlswe",
        description="1D multilayer Saint-Venant solver with mass exchange",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a scenario")
    p_run.add_argument("--config", required=True)
    p_run.add_argument("--out", required=True)
    p_run.add_argument("--order", type=int, default=None)
    p_run.add_argument("--tend", type=float, default=None)
    p_run.add_argument("--snapshots", type=float, default=None,
                       help="override snapshot interval (s)")
    p_run.add_argument("--figures", action="store_true",
                       help="render report figures after the run")
    p_run.set_defaults(func=cmd_run)

    p_eig = sub.add_parser("eigen", help="hyperbolicity report")
    p_eig.add_argument("--config", required=True)
    p_eig.add_argument("--tend", type=float, default=None)
    p_eig.set_defaults(func=cmd_eigen)

    p_val = sub.add_parser("validate", help="parse-only configuration check")
    p_val.add_argument("--config", required=True)
    p_val.set_defaults(func=cmd_validate)

    p_rep = sub.add_parser("report", help="render figures for a run directory")
    p_rep.add_argument("--out", required=True)
    p_rep.set_defaults(func=cmd_report)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigurationError as exc:
        for line in exc.errors:
            print(f"config error: {line}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
