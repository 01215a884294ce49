"""Command-line front end: ml-eval, params, solve, norms, verify.

Configuration is a single JSON document; command-line flags override fields
and the effective config is echoed to the output directory.  Exit codes:
0 ok, 1 verify failure, 2 usage, 3 blow-up, 4 nonconvergence.  The default
output root is taken from FHW_OUT_DIR (falling back to the working
directory).
"""

import argparse
import csv
import hashlib
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from .analysis import validate_params
from .errors import BlowUpError, DomainError, NonconvergenceError
from .fields import make_initial_data
from .grid import BoxGrid, read_grid_function, write_grid_function
from .norms import SpaceParams, besov_morrey_norm, morrey_norm, sobolev_morrey_norm, write_norm_reports
from .solver import ModelParams, TimeGrid, march_solve, picard_solve
from .special import MLParams, l_alpha, ml_one_with_path, ml_two
from .verify import SUITES, run_suites

DEFAULT_CONFIG = {
    "model": {"alpha": 1.5, "rho": 3.0, "gamma_sign": -1, "nu": 1.0, "form": "signed"},
    "space": {"n": 2, "sizes": [32, 32], "half_length": 4.0},
    "time": {"horizon": 2.0, "nsteps": 16},
    "params": {"p": 3.0, "q": 3.2, "mu": 0.0},
    "data": {"kind": "gaussian", "amplitude": 0.1, "width": 1.0},
    "tolerances": {"picard_tol": 1e-10, "max_iter": 25, "corrector_iters": 2},
    "seed": 0,
    "snapshot_stride": 1,
}


def config_hash(cfg) -> str:
    blob = json.dumps(cfg, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()[:12]


def out_root(explicit=None) -> Path:
    if explicit:
        return Path(explicit)
    return Path(os.environ.get("FHW_OUT_DIR", "."))


def _load_config(path):
    cfg = json.loads(json.dumps(DEFAULT_CONFIG))
    if path:
        with open(path) as fh:
            user = json.load(fh)
        for key, val in user.items():
            if isinstance(val, dict) and key in cfg:
                cfg[key].update(val)
            else:
                cfg[key] = val
    return cfg


def _parse_values(text):
    """Comma list '1,2,3' or range 'a:b:n'."""
    if ":" in text:
        a, b, n = text.split(":")
        return list(np.linspace(float(a), float(b), int(n)))
    return [float(v) for v in text.split(",")]


def cmd_ml_eval(args):
    writer = csv.writer(sys.stdout)
    writer.writerow(["alpha", "b", "x", "value", "path_used"])
    params = None
    for alpha in _parse_values(args.alpha):
        if args.x_switch is not None:
            params = MLParams(alpha=alpha, x_switch=args.x_switch)
        for x in _parse_values(args.x):
            if args.two_param:
                b = args.b if args.b is not None else alpha
                val = ml_two(alpha, b, x, params=params)
                path = "series" if x <= (params.x_switch if params else 5.0) else "decomposition"
                writer.writerow([repr(alpha), repr(b), repr(x), repr(float(val)), path])
            elif args.l_alpha:
                val = l_alpha(alpha, x)
                writer.writerow([repr(alpha), "", repr(x), repr(float(val)), "branch-cut"])
            else:
                val, path = ml_one_with_path(alpha, x, params=params)
                writer.writerow([repr(alpha), "", repr(x), repr(float(val)), path])
    return 0


def cmd_params(args):
    ok, exps, reasons = validate_params(args.n, args.alpha, args.rho, args.p, args.q, args.mu)
    print(f"admissible: {ok}")
    print(f"eta = {exps.eta!r}")
    print(f"sigma = {exps.sigma!r}")
    print(f"gamma1 = {exps.gamma1!r}")
    print(f"gamma2 = {exps.gamma2!r}")
    for reason in reasons:
        print(f"violated: {reason}")
    return 0


def _setup_run(cfg):
    sp = cfg["space"]
    grid = BoxGrid(sp["n"], tuple(sp["sizes"]), sp["half_length"])
    md = cfg["model"]
    model = ModelParams(md["alpha"], md["rho"], md["gamma_sign"], md.get("nu", 1.0), md.get("form", "signed"))
    tm = cfg["time"]
    tgrid = TimeGrid(tm["horizon"], tm["nsteps"])
    data_kw = dict(cfg["data"])
    kind = data_kw.pop("kind")
    u0 = make_initial_data(kind, grid, **data_kw)
    return grid, model, tgrid, u0


def cmd_solve(args):
    cfg = _load_config(args.config)
    if args.horizon is not None:
        cfg["time"]["horizon"] = args.horizon
    if args.nsteps is not None:
        cfg["time"]["nsteps"] = args.nsteps
    if args.alpha is not None:
        cfg["model"]["alpha"] = args.alpha
    chash = config_hash(cfg)
    root = out_root(args.output_dir)
    root.mkdir(parents=True, exist_ok=True)
    (root / "effective_config.json").write_text(json.dumps(cfg, sort_keys=True, indent=2))

    grid, model, tgrid, u0 = _setup_run(cfg)
    pr = cfg["params"]
    ok, exps, reasons = validate_params(
        grid.n, model.alpha, model.rho, pr["p"], pr["q"], pr["mu"]
    )
    if not ok and not args.force:
        print("config outside the well-posedness admissibility window (use --force to run anyway):")
        for reason in reasons:
            print(f"  {reason}")
        return 2

    tols = cfg["tolerances"]
    try:
        if args.picard:
            traj, report = picard_solve(u0, model, tgrid, tols["max_iter"], tols["picard_tol"])
            print(f"picard converged={report.converged} iterates={report.iterate_count}")
        else:
            traj = march_solve(u0, model, tgrid, tols.get("corrector_iters", 2))
    except BlowUpError as exc:
        print(f"blow-up: {exc} (last valid node {exc.last_valid_index})")
        return 3
    except NonconvergenceError as exc:
        print(f"nonconvergence: {exc}")
        print(f"  diff norms: {exc.report.diff_norms}")
        return 4

    stride = cfg.get("snapshot_stride", 1)
    space = SpaceParams(p=pr["p"], q=pr["q"], mu=pr["mu"])
    with open(root / "manifest.csv", "w", newline="") as fh:
        fh.write(f"# config_hash={chash}\n")
        writer = csv.writer(fh)
        writer.writerow(["node", "t", "l2", "linf", "morrey_q_mu", "t_eta_morrey"])
        for k, state in enumerate(traj.states):
            t = float(tgrid.nodes[k])
            if k % stride == 0:
                write_grid_function(root / f"state_{k:05d}.fhwg", state)
            m = morrey_norm(state, pr["q"], pr["mu"], space).value
            weighted = t**exps.eta * m if t > 0 else 0.0
            writer.writerow([k, repr(t), repr(state.l2()), repr(state.linf()), repr(m), repr(weighted)])
    print(f"wrote {root / 'manifest.csv'} ({tgrid.nsteps + 1} nodes, hash {chash})")
    return 0


def cmd_norms(args):
    f = read_grid_function(args.input)
    space = SpaceParams(p=args.p, q=args.q, mu=args.mu)
    reports = [morrey_norm(f, args.p, args.mu, space)]
    if args.s is not None:
        reports.append(sobolev_morrey_norm(f, args.s, args.p, args.mu, space))
        reports.append(besov_morrey_norm(f, args.s, args.q, args.mu, math.inf, space))
    chash = config_hash(
        {"input": str(args.input), "p": args.p, "q": args.q, "mu": args.mu, "s": args.s}
    )
    if args.output:
        write_norm_reports(args.output, reports, chash)
        print(f"wrote {args.output}")
    else:
        for rep in reports:
            print(f"{rep.kind}: {rep.value!r}")
    return 0


def cmd_verify(args):
    names = list(SUITES) if args.suite == "all" else [args.suite]
    results = run_suites(names, seed=args.seed, jobs=args.jobs, grid_size=args.grid)
    chash = config_hash({"suites": names, "seed": args.seed, "grid": args.grid})
    root = out_root(args.output_dir)
    root.mkdir(parents=True, exist_ok=True)
    path = root / "verdicts.csv"
    failures = []
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["name", "config_hash", "value", "threshold", "pass"])
        for suite, row in results:
            writer.writerow(
                [f"{suite}.{row.name}", chash, repr(row.value), repr(row.threshold), row.passed]
            )
            status = "pass" if row.passed else "FAIL"
            print(f"[{status}] {suite}.{row.name}: {row.value:.6g} (threshold {row.threshold:.6g})")
            if not row.passed:
                failures.append(f"{suite}.{row.name}")
    print(f"wrote {path}")
    if failures:
        print("failures:", ", ".join(failures))
        return 1
    return 0


def build_parser():
    parser = argparse.ArgumentParser(prog="fhw", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ml-eval", help="evaluate Mittag-Leffler functions")
    p.add_argument("--alpha", required=True, help="comma list or a:b:n range")
    p.add_argument("--x", required=True, help="comma list or a:b:n range")
    p.add_argument("--two-param", action="store_true")
    p.add_argument("--b", type=float, default=None)
    p.add_argument("--l-alpha", action="store_true", help="evaluate the branch-cut remainder")
    p.add_argument("--x-switch", type=float, default=None)
    p.set_defaults(func=cmd_ml_eval)

    p = sub.add_parser("params", help="admissibility report")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--rho", type=float, required=True)
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--q", type=float, required=True)
    p.add_argument("--mu", type=float, default=0.0)
    p.set_defaults(func=cmd_params)

    p = sub.add_parser("solve", help="run the mild solver")
    p.add_argument("--config", help="JSON config file")
    p.add_argument("--picard", action="store_true", help="global Picard instead of marching")
    p.add_argument("--force", action="store_true", help="run despite inadmissible parameters")
    p.add_argument("--output-dir", default=None)
    p.add_argument("--horizon", type=float, default=None)
    p.add_argument("--nsteps", type=int, default=None)
    p.add_argument("--alpha", type=float, default=None)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("norms", help="norm reports for a stored field")
    p.add_argument("--input", required=True)
    p.add_argument("--p", type=float, default=2.0)
    p.add_argument("--q", type=float, default=2.0)
    p.add_argument("--mu", type=float, default=0.0)
    p.add_argument("--s", type=float, default=None)
    p.add_argument("--output", default=None)
    p.set_defaults(func=cmd_norms)

    p = sub.add_parser("verify", help="run verification suites")
    p.add_argument("--suite", default="all", choices=["all", *SUITES])
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--grid", type=int, default=None, help="per-axis size for the norms suite")
    p.add_argument("--output-dir", default=None)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except (DomainError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
