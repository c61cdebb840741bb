"""Command-line entry point.

Exit codes: 0 success, 2 usage or domain error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import coercivity, modulation, operators, threshold, virial
from .errors import DomainError, GBLabError, NumericalError
from .grid import Grid
from .io import load_config, load_trajectory, output_dir, save_trajectory, simulation_config
from .profiles import SolitonParams, write_profile_csv
from .simulator import run
from .weights import WeightScales, make_weights

EXIT_OK, EXIT_USAGE, EXIT_NUMERICAL = 0, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        _report("UsageError", message)
        raise SystemExit(EXIT_USAGE)


def _report(kind: str, message: str) -> None:
    print(json.dumps({"error": kind, "message": message}), file=sys.stderr)


def cmd_threshold(args) -> int:
    if args.steps < 1 or not args.pmin < args.pmax:
        raise DomainError("empty p range: need pmin < pmax and steps >= 1")
    rows = threshold.threshold_curve(args.pmin, args.pmax, args.steps)
    path = output_dir(args.out) / "threshold.csv"
    threshold.write_threshold_csv(path, rows)
    print(path)
    return EXIT_OK


def cmd_spectrum(args) -> int:
    params = SolitonParams(args.p, args.c)
    spec = operators.OperatorSpec(args.kind, params, Grid(args.L, args.n))
    rep = operators.lowest_eigenpairs(spec, k=args.k)
    text = rep.to_json()
    if args.out:
        path = output_dir(args.out) / "spectrum.json"
        path.write_text(text + "\n")
    print(text)
    return EXIT_OK


_SIM_KEYS = ("p", "c", "delta", "perturbation", "seed", "L", "n", "dt", "T", "snapshot_every", "x0")


def cmd_simulate(args) -> int:
    values = load_config(args.config) if args.config else {}
    over = {k: getattr(args, k) for k in _SIM_KEYS}
    if args.sponge is not None:
        over["sponge"] = args.sponge
    cfg = simulation_config(values, **over)
    traj = run(cfg)
    npz, cons = save_trajectory(output_dir(args.out), traj, args.stem)
    print(npz)
    print(cons)
    if traj.blowup:
        _report("BlowUp", f"run stopped at t={traj.times[-1]}")
        return EXIT_NUMERICAL
    return EXIT_OK


def cmd_diagnose(args) -> int:
    traj = load_trajectory(args.trajectory)
    cfg = traj.meta.get("config")
    c0 = args.c if args.c is not None else (cfg.c if cfg else None)
    x0 = args.x0 if args.x0 is not None else (cfg.x0 if cfg else 0.0)
    if c0 is None:
        raise DomainError("initial speed unknown: pass --c")
    tr = modulation.track(traj, (c0, x0))
    out = output_dir(args.out)
    modulation.write_track_csv(out / "track.csv", tr)
    if tr.error:
        _report("ModulationError", tr.error)
        return EXIT_NUMERICAL
    delta = args.delta if args.delta is not None else (cfg.delta if cfg and cfg.delta > 0 else 0.01)
    weights = make_weights(WeightScales.from_delta(delta))
    series = virial.virial_series(tr, traj.p, weights, traj.grid, variant=args.variant, refine=args.refine)
    virial.write_diagnose_csv(out / "diagnose.csv", series)
    print(out / "track.csv")
    print(out / "diagnose.csv")
    return EXIT_OK


def cmd_coercivity(args) -> int:
    cs = np.linspace(args.cmin, args.cmax, args.steps)
    rows = coercivity.positivity_map(args.p, cs, args.form, args.n)
    path = output_dir(args.out) / "coercivity.csv"
    coercivity.write_coercivity_csv(path, rows)
    print(path)
    return EXIT_OK


def cmd_profile(args) -> int:
    params = SolitonParams(args.p, args.c)
    y = np.linspace(-args.L, args.L, args.points)
    path = output_dir(args.out) / "profile.csv"
    write_profile_csv(path, params, y)
    print(path)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="gblab", description="Solitary-wave stability toolkit for the gGB system.")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("threshold-curve", help="sweep a1, a2 and the speed thresholds over p")
    s.add_argument("--pmin", type=float, default=1.5)
    s.add_argument("--pmax", type=float, default=5.0)
    s.add_argument("--steps", type=int, default=350)
    s.add_argument("--out")
    s.set_defaults(func=cmd_threshold)

    s = sub.add_parser("spectrum", help="lowest eigenpairs of a linearized operator (JSON)")
    s.add_argument("--kind", choices=operators.KINDS, default="L0")
    s.add_argument("--p", type=float, default=3.0)
    s.add_argument("--c", type=float, default=0.0)
    s.add_argument("--L", type=float, default=40.0)
    s.add_argument("--n", type=int, default=1024)
    s.add_argument("--k", type=int, default=3)
    s.add_argument("--out")
    s.set_defaults(func=cmd_spectrum)

    s = sub.add_parser("simulate", help="evolve a perturbed soliton")
    s.add_argument("--config", help="key=value file; flags override it")
    for k, typ in (("p", float), ("c", float), ("delta", float), ("seed", int), ("L", float), ("n", int),
                   ("dt", float), ("T", float), ("snapshot_every", float), ("x0", float)):
        s.add_argument(f"--{k.replace('_', '-')}", dest=k, type=typ)
    s.add_argument("--perturbation", choices=("none", "gauss", "random"))
    s.add_argument("--sponge", action=argparse.BooleanOptionalAction, default=None)
    s.add_argument("--stem", default="trajectory")
    s.add_argument("--out")
    s.set_defaults(func=cmd_simulate)

    s = sub.add_parser("diagnose", help="modulation track and virial identity check")
    s.add_argument("trajectory")
    s.add_argument("--c", type=float, help="initial speed guess (default: from the stored config)")
    s.add_argument("--x0", type=float)
    s.add_argument("--delta", type=float, help="scale for the weights (default: run delta or 0.01)")
    s.add_argument("--variant", choices=virial.VARIANTS, default="derived")
    s.add_argument("--refine", type=int, default=4)
    s.add_argument("--out")
    s.set_defaults(func=cmd_diagnose)

    s = sub.add_parser("coercivity", help="constrained minimum of a quadratic form across speeds")
    s.add_argument("--form", choices=coercivity.FORMS, default="B_Ltilde")
    s.add_argument("--p", type=float, default=3.0)
    s.add_argument("--cmin", type=float, default=0.1)
    s.add_argument("--cmax", type=float, default=0.95)
    s.add_argument("--steps", type=int, default=18)
    s.add_argument("--n", type=int, default=256)
    s.add_argument("--out")
    s.set_defaults(func=cmd_coercivity)

    s = sub.add_parser("profile", help="tabulate Q_c, Q_c' and Lambda Q_c")
    s.add_argument("--p", type=float, default=3.0)
    s.add_argument("--c", type=float, default=0.5)
    s.add_argument("--L", type=float, default=20.0)
    s.add_argument("--points", type=int, default=401)
    s.add_argument("--out")
    s.set_defaults(func=cmd_profile)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except NumericalError as exc:
        _report(type(exc).__name__, str(exc))
        return EXIT_NUMERICAL
    except (GBLabError, ValueError) as exc:
        _report(type(exc).__name__, str(exc))
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
