"""Command line front-end: ``verify``, ``run``, ``compare`` and ``convergence``.

Exit codes: 0 success, 1 config error, 2 numerical failure, 3 failed verification.
The output directory is ``output.dir`` from the config unless the environment
variable ``SPLITDG_OUTPUT_DIR`` is set.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import verify as vf
from .config import parse_config
from .errors import ConfigError, NumericalError, ValidationError
from .geometry import mesh_summary
from .solver import run

ENV_OUTPUT_DIR = "SPLITDG_OUTPUT_DIR"
EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL, EXIT_VERIFY = 0, 1, 2, 3


def fmt(x):
    """Fixed 17-significant-digit rendering shared by CSV and JSON output."""
    if x is None:
        return ""
    return format(float(x), ".17g")


def dumps(obj, indent=0):
    """Deterministic JSON: sorted keys, floats at 17 significant digits, non-finite as null."""
    pad, inner = "  " * indent, "  " * (indent + 1)
    if obj is None:
        return "null"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return fmt(obj) if math.isfinite(obj) else "null"
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f'{inner}{dumps(str(k))}: {dumps(obj[k], indent + 1)}' for k in sorted(obj)]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        if len(obj) == 0:
            return "[]"
        items = [inner + dumps(v, indent + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + pad + "]"
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def write_json(path, obj):
    Path(path).write_text(dumps(obj) + "\n")


def write_csv(path, header, rows):
    lines = [",".join(header)]
    lines += [",".join(v if isinstance(v, str) else fmt(v) for v in row) for row in rows]
    Path(path).write_text("\n".join(lines) + "\n")


def output_dir(cfg_dir):
    path = Path(os.environ.get(ENV_OUTPUT_DIR) or cfg_dir)
    path.mkdir(parents=True, exist_ok=True)
    return path


def diagnostics_table(rows, p):
    header = ["t", "energy"] + [f"q{i + 1}" for i in range(p)] + [f"bf{i + 1}" for i in range(p)]
    header += ["energy_rate", "cons_defect"]
    table = [[r.t, r.energy, *r.conserved, *r.boundary_flux, r.energy_rate, r.conservation_defect]
             for r in rows]
    return header, table


# ----------------------------------------------------------------------------
# subcommands

def cmd_verify(args):
    degrees = list(range(args.N_min, args.N_max + 1))
    checks = vf.run_suite(degrees, args.seed, args.metric, args.trials)
    rep = vf.report(checks, degrees, args.seed, args.metric)
    out = Path(args.output) if args.output else output_dir(".") / "verify.json"
    write_json(out, rep)
    for c in checks:
        if not c.passed:
            print(f"FAIL {c.name} N={c.N} defect={c.defect:.3e} tol={c.tolerance:.1e}")
    print(f"verify: {rep['n_checks'] - rep['n_failed']}/{rep['n_checks']} checks passed -> {out}")
    return EXIT_OK if rep["passed"] else EXIT_VERIFY


def cmd_run(args):
    cfg = parse_config(args.config)
    start = time.perf_counter()
    res = run(cfg)
    wall = time.perf_counter() - start
    out = output_dir(cfg.output_dir)
    header, table = diagnostics_table(res.rows, res.state.op.p)
    write_csv(out / f"{cfg.output_name}.csv", header, table)
    summary = {
        "final_time": res.state.t,
        "final_energy": res.rows[-1].energy,
        "initial_energy": res.rows[0].energy,
        "max_conservation_defect": max(r.conservation_defect for r in res.rows),
        "gamma_hat": res.gamma_hat,
        "l2_error": res.l2_error,
        "dt": res.dt,
        "steps": res.nsteps,
        "wall_time": wall,
        "config": cfg.to_dict(),
        "mesh": mesh_summary(res.state.mesh),
    }
    write_json(out / f"{cfg.output_name}.json", summary)
    print(f"run: E(0)={summary['initial_energy']:.6e} E(T)={summary['final_energy']:.6e} "
          f"-> {out / cfg.output_name}.csv")
    return EXIT_OK


def compare_runs(cfg):
    """Run the same setup under DGSEM and DS; returns (header, table, summary)."""
    dg = run(cfg, form="DGSEM")
    ds = run(cfg, form="DS")
    g = ds.gamma_hat
    e0 = ds.rows[0].energy
    header = ["t", "energy_DGSEM", "energy_DS", "ds_bound", "rate_DGSEM", "rate_DS"]
    table, exceeded, ratio = [], False, []
    for a, b in zip(dg.rows, ds.rows):
        bound = math.exp(2.0 * g * b.t) * (e0 + b.energy_inflow)
        exceeded |= a.energy > bound * (1.0 + 1e-10)
        ratio.append(a.energy / b.energy if b.energy > 0 else (1.0 if a.energy == 0 else math.inf))
        table.append([a.t, a.energy, b.energy, bound, a.energy_rate, b.energy_rate])
    summary = {
        "dgsem_exceeds_ds_bound": bool(exceeded),
        "final_energy_DGSEM": dg.rows[-1].energy,
        "final_energy_DS": ds.rows[-1].energy,
        "final_energy_ratio": ratio[-1],
        "max_energy_ratio": max(ratio),
        "gamma_hat": g,
        "dt": ds.dt,
        "steps": ds.nsteps,
    }
    return header, table, summary


def cmd_compare(args):
    cfg = parse_config(args.config)
    start = time.perf_counter()
    header, table, summary = compare_runs(cfg)
    summary["wall_time"] = time.perf_counter() - start
    summary["config"] = cfg.to_dict()
    out = output_dir(cfg.output_dir)
    write_csv(out / f"{cfg.output_name}_compare.csv", header, table)
    write_json(out / f"{cfg.output_name}_compare.json", summary)
    print(f"compare: E_DGSEM/E_DS at T = {summary['final_energy_ratio']:.4g}, "
          f"DGSEM exceeds DS bound: {summary['dgsem_exceeds_ds_bound']}")
    return EXIT_OK


def convergence_table(cfg, degrees):
    rows = []
    for N in degrees:
        res = run(replace(cfg, N=N))
        if res.l2_error is None:
            raise ValidationError("initial", "convergence needs a manufactured solution")
        rows.append((N, res.l2_error))
    table = []
    for i, (N, err) in enumerate(rows):
        rate = None
        if i > 0:
            N0, e0 = rows[i - 1]
            rate = -math.log(err / e0) / math.log(N / N0)
        table.append([N, err, rate])
    return table


def cmd_convergence(args):
    cfg = parse_config(args.config)
    for N in args.N:
        if not 1 <= N <= 64:
            raise ValidationError("N", "must lie in [1, 64]")
    table = convergence_table(cfg, args.N)
    out = output_dir(cfg.output_dir)
    path = out / f"{cfg.output_name}_convergence.csv"
    write_csv(path, ["N", "error", "rate"], [[str(N), e, r] for N, e, r in table])
    for N, e, r in table:
        print(f"N={N:3d}  error={e:.3e}  rate={'' if r is None else f'{r:.2f}'}")
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(prog="splitdg", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="discrete calculus and metric identity suite")
    p.add_argument("--N-min", type=int, default=1)
    p.add_argument("--N-max", type=int, default=8)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--metric", choices=("curl", "cross"), default="curl")
    p.add_argument("--trials", type=int, default=10, help="random fields per degree")
    p.add_argument("--output", help="report path (default <output dir>/verify.json)")
    p.set_defaults(func=cmd_verify)

    for name, func, text in (("run", cmd_run, "integrate one configuration"),
                             ("compare", cmd_compare, "DGSEM against DS on one configuration")):
        p = sub.add_parser(name, help=text)
        p.add_argument("config")
        p.set_defaults(func=func)

    p = sub.add_parser("convergence", help="L2 error against a manufactured solution over N")
    p.add_argument("config")
    p.add_argument("--N", type=int, nargs="+", required=True)
    p.set_defaults(func=cmd_convergence)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    if getattr(args, "command", None) == "verify" and not 1 <= args.N_min <= args.N_max <= 64:
        print("error: need 1 <= N-min <= N-max <= 64", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except FileNotFoundError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
