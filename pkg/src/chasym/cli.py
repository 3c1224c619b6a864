"""Command-line surface: simulate, regions, compare, painleve, wavenumber, decay.

Exit codes: 0 on success, 2 on usage/config errors, 3 on numerical failure.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from . import analysis, asymptotics, ch_solver, painleve
from .spatial_schemes import modified_wavenumber
from .time_integration import StepControl

_CONFIG_KEYS = {
    "q0": float, "x_min": float, "x_max": float, "h": float, "dt": float,
    "t_end": float, "helmholtz_rhs_mode": str, "fp_rel_tol": float,
    "fp_max_iters": int,
    "snapshot_times": lambda s: tuple(float(v) for v in s.split(",") if v.strip()),
}


class UsageError(Exception):
    pass


def parse_config(path: str) -> ch_solver.SimulationConfig:
    """Plain `key = value` lines; '#' starts a comment."""
    if not os.path.exists(path):
        raise UsageError(f"config file not found: {path}")
    raw = {}
    with open(path, encoding="utf-8") as fh:
        for ln, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{ln}: expected `key = value`")
            key, _, value = line.partition("=")
            key, value = key.strip(), value.strip()
            if key not in _CONFIG_KEYS:
                raise UsageError(f"{path}:{ln}: unknown key {key!r}")
            try:
                raw[key] = _CONFIG_KEYS[key](value)
            except ValueError as exc:
                raise UsageError(f"{path}:{ln}: bad value for {key}: {exc}")
    control = StepControl(fp_rel_tol=raw.pop("fp_rel_tol", 1e-13),
                          fp_max_iters=raw.pop("fp_max_iters", 200))
    try:
        return ch_solver.SimulationConfig(control=control, **raw)
    except (TypeError, ValueError) as exc:
        raise UsageError(f"{path}: {exc}")


def _cmd_simulate(args) -> int:
    config = parse_config(args.config)
    outdir = args.out
    os.makedirs(outdir, exist_ok=True)
    partial = False
    try:
        snapshots = ch_solver.run(config)
    except ch_solver.SimulationError as exc:
        print(f"simulate: {exc}", file=sys.stderr)
        snapshots = exc.snapshots
        partial = True
    files = [ch_solver.write_snapshot_csv(s, outdir) for s in snapshots]
    ch_solver.write_manifest(outdir, config, snapshots, files, partial=partial)
    print(f"wrote {len(files)} snapshot(s) to {outdir}")
    return 3 if partial else 0


def _cmd_regions(args) -> int:
    part = asymptotics.classify(args.t, args.eps, args.C, args.q0)
    for label in asymptotics.REGION_LABELS:
        for lo, hi in part.interval_list(label):
            print(f"{label}: ({lo:.6g}, {hi:.6g})")
    return 0


def _cmd_compare(args) -> int:
    u_num = ch_solver.load_snapshot_csv(args.snapshot)
    part = asymptotics.classify(args.t, args.eps, args.C, args.q0)
    evaluators = analysis.build_evaluators(args.q0)
    report = analysis.region_norms(u_num, args.t, part, evaluators)
    os.makedirs(args.out, exist_ok=True)
    stem = f"compare_t{args.t:.3f}"
    json_path = os.path.join(args.out, stem + ".json")
    with open(json_path, "w", encoding="ascii") as fh:
        fh.write(analysis.report_to_json(report))
    csv_path = os.path.join(args.out, stem + ".csv")
    analysis.write_region_csv(u_num, args.t, part, evaluators, csv_path)
    print(f"wrote {json_path} and {csv_path}")
    return 0


def _cmd_painleve(args) -> int:
    family = (painleve.PiiFamily.HASTINGS_MCLEOD if args.family == "hm"
              else painleve.PiiFamily.ABLOWITZ_SEGUR)
    sol = painleve.solve_bvp(family, args.r, args.sL, args.sR, args.n)
    painleve.write_solution_csv(sol, args.out)
    print(f"wrote {args.out} (error estimate {sol.error_estimate:.2e})")
    return 0


def _cmd_wavenumber(args) -> int:
    with open(args.out, "w", encoding="ascii") as fh:
        fh.write("alpha_h,re_alpha_prime_h,im_alpha_prime_h\n")
        for th in np.linspace(0.0, math.pi, args.samples):
            wk = modified_wavenumber(th)
            fh.write(f"{th:.17g},{wk.alpha_prime_h.real:.17g},"
                     f"{wk.alpha_prime_h.imag:.17g}\n")
    print(f"wrote {args.out}")
    return 0


_KIND_BY_REGION = {"soliton_i1": "L", "fast_decay": "L", "osc1": "A", "osc2": "A"}


def _cmd_decay(args) -> int:
    series = []
    for path in args.reports:
        with open(path, encoding="ascii") as fh:
            doc = json.load(fh)
        for row in doc["regions"]:
            if row["label"] == args.region and row["n_points"] > 0:
                e = row["e_sup" if args.norm == "sup" else "e_l2"]
                series.append((doc["t"], e))
    if not series:
        print(f"decay: no data for region {args.region}", file=sys.stderr)
        return 2
    series.sort()
    kind = _KIND_BY_REGION.get(args.region, "A")
    t_last, e_last = series[-1]
    est = analysis.decay_power(e_last, t_last, kind, label=args.region)
    print(f"region {args.region}: T={est.T:g}  E(T)={est.E_at_T:.6e}  "
          f"{est.kind}-power={est.power:.5f}")
    if len(series) >= 3:
        roc = analysis.rate_of_convergence(series)
        print(f"rate of convergence (log-log least squares): {roc:.5f}")
    else:
        print("rate of convergence: needs at least 3 reports")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="chasym",
                                description="Camassa-Holm long-time asymptotics toolkit")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("simulate", help="run a simulation from a config file")
    s.add_argument("--config", required=True)
    s.add_argument("--out", default="out")
    s.set_defaults(fn=_cmd_simulate)

    s = sub.add_parser("regions", help="print the region partition")
    s.add_argument("--t", type=float, required=True)
    s.add_argument("--eps", type=float, required=True)
    s.add_argument("--C", type=float, required=True)
    s.add_argument("--q0", type=float, required=True)
    s.set_defaults(fn=_cmd_regions)

    s = sub.add_parser("compare", help="compare a snapshot with the asymptotics")
    s.add_argument("--snapshot", required=True)
    s.add_argument("--t", type=float, required=True)
    s.add_argument("--q0", type=float, default=0.5)
    s.add_argument("--eps", type=float, default=14.0 / 80.0)
    s.add_argument("--C", type=float, default=14.0 / 80.0)
    s.add_argument("--out", default="out")
    s.set_defaults(fn=_cmd_compare)

    s = sub.add_parser("painleve", help="solve a Painleve II boundary-value problem")
    s.add_argument("--family", choices=("hm", "as"), required=True)
    s.add_argument("--r", type=float, default=1.0)
    s.add_argument("--sL", type=float, default=-12.0)
    s.add_argument("--sR", type=float, default=8.0)
    s.add_argument("--n", type=int, default=2001)
    s.add_argument("--out", default="painleve.csv")
    s.set_defaults(fn=_cmd_painleve)

    s = sub.add_parser("wavenumber", help="dump the modified-wavenumber curve")
    s.add_argument("--samples", type=int, default=181)
    s.add_argument("--out", default="wavenumber.csv")
    s.set_defaults(fn=_cmd_wavenumber)

    s = sub.add_parser("decay", help="decay power and convergence rate from reports")
    s.add_argument("--region", required=True)
    s.add_argument("--norm", choices=("sup", "l2"), default="sup")
    s.add_argument("reports", nargs="+")
    s.set_defaults(fn=_cmd_decay)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        return args.fn(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ArithmeticError, RuntimeError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    raise SystemExit(main())
