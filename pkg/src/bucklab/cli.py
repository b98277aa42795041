"""Batch experiment front door.

Each subcommand runs one pipeline, persists every numeric output into a
fresh timestamped run directory (CSV tables, plot-data files, manifest
written last) and prints a one-line summary. Exit codes: 0 success,
1 domain error, 2 usage error.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import counterexample as cex
from . import runio, spherecap, traceops
from .errors import BucklabError, ConfigError
from .mesh import Mesh, make_disk_mesh, make_rectangle_mesh
from .runio import RunManifest, SweepResult, fmt
from .spectra import (
    buckling_spectrum,
    laplace_spectrum,
    navier_spectrum,
    spectrum_to_csv_rows,
)


def _float_list(text: str) -> list[float]:
    try:
        return [float(part) for part in text.split(",") if part.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad numeric list {text!r}") from exc


# (converter, validator, description) per configurable parameter
def _positive(x: float) -> bool:
    return x > 0


def _nonneg(x) -> bool:
    return x >= 0


_PARAM_TYPES = {
    "domain": (str, lambda v: v in ("disk", "rectangle"), "disk|rectangle"),
    "refine": (int, _nonneg, ">= 0"),
    "radius": (float, _positive, "> 0"),
    "a": (float, _positive, "> 0"),
    "b": (float, _positive, "> 0"),
    "nx": (int, lambda v: v >= 1, ">= 1"),
    "ny": (int, lambda v: v >= 1, ">= 1"),
    "problem": (
        str,
        lambda v: v in ("dirichlet", "neumann", "buckling", "navier"),
        "dirichlet|neumann|buckling|navier",
    ),
    "order": (int, lambda v: v in (1, 2), "1|2"),
    "count": (int, lambda v: v >= 1, ">= 1"),
    "kind": (str, lambda v: v in ("friedlander", "liu"), "friedlander|liu"),
    "lmin": (float, lambda v: True, "real"),
    "lmax": (float, lambda v: True, "real"),
    "points": (int, lambda v: v >= 1, ">= 1"),
    "lam": (float, lambda v: True, "real"),
    "eps": (_float_list, lambda v: all(x > 0 for x in v), "positive list"),
    "eps_list": (
        _float_list,
        lambda v: all(0 < x < np.pi / 2 for x in v),
        "list in (0, pi/2)",
    ),
    "nodes": (int, lambda v: v >= 8, ">= 8"),
    "modes": (int, lambda v: v >= 2, ">= 2"),
    "grading": (str, lambda v: v in ("uniform", "geometric"), "uniform|geometric"),
    "threads": (int, lambda v: v >= 1, ">= 1"),
    "seed": (int, _nonneg, ">= 0"),
    "trials": (int, _nonneg, ">= 0"),
}

_COMMAND_PARAMS = {
    "spectrum": ["domain", "refine", "radius", "a", "b", "nx", "ny", "problem",
                 "order", "count", "threads"],
    "identity-scan": ["domain", "refine", "radius", "a", "b", "nx", "ny", "kind",
                      "order", "lmin", "lmax", "points", "threads"],
    "beta1-scan": ["domain", "refine", "radius", "a", "b", "nx", "ny", "lmin",
                   "lmax", "points", "threads"],
    "counterexample": ["domain", "refine", "radius", "a", "b", "nx", "ny", "lam",
                       "eps", "trials", "seed", "threads"],
    "spherecap": ["eps_list", "nodes", "modes", "grading", "threads"],
}

_DEFAULTS = {
    "domain": "disk",
    "refine": 3,
    "radius": 1.0,
    "a": 1.0,
    "b": 1.0,
    "nx": 16,
    "ny": 16,
    "problem": "dirichlet",
    "order": 2,
    "count": 6,
    "kind": "liu",
    "lmin": 1.0,
    "lmax": 60.0,
    "points": 20,
    "lam": 20.0,
    "eps": [1e-1, 1e-2, 1e-3, 1e-4],
    "eps_list": [0.4, 0.2, 0.1, 0.05],
    "nodes": 64,
    "modes": 4,
    "grading": "geometric",
    "threads": 1,
    "seed": 0,
    "trials": 200,
}


def _merge_params(command: str, args: argparse.Namespace) -> dict:
    """defaults < config file < explicit CLI flags; unknown config keys
    and out-of-range values are rejected by name."""
    allowed = _COMMAND_PARAMS[command]
    params = {k: _DEFAULTS[k] for k in allowed}
    if args.config:
        raw = runio.load_config(args.config)
        for key, text in raw.items():
            if key not in allowed:
                raise ConfigError(f"unknown config key {key!r} for {command}")
            conv, check, desc = _PARAM_TYPES[key]
            try:
                value = conv(text)
            except (ValueError, argparse.ArgumentTypeError) as exc:
                raise ConfigError(f"config key {key!r}: {exc}") from exc
            if not check(value):
                raise ConfigError(f"config key {key!r} out of range (need {desc})")
            params[key] = value
    for key in allowed:
        cli_value = getattr(args, key, None)
        if cli_value is not None:
            conv, check, desc = _PARAM_TYPES[key]
            if not check(cli_value):
                raise ConfigError(f"flag --{key.replace('_', '-')} out of range (need {desc})")
            params[key] = cli_value
    return params


def _build_mesh(params: dict) -> Mesh:
    if params["domain"] == "disk":
        return make_disk_mesh(params["radius"], params["refine"])
    return make_rectangle_mesh(params["a"], params["b"], params["nx"], params["ny"])


def _finish(command: str, params: dict, tables: dict[str, str],
            hashes: dict, run_root) -> Path:
    manifest = RunManifest(
        command=command,
        params={k: (v if not isinstance(v, list) else list(map(float, v)))
                for k, v in params.items()},
        hashes=hashes,
    )
    import time

    manifest.started_utc = time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime())
    run_dir = runio.new_run_dir(run_root, command)
    runio.write_results(run_dir, manifest, tables)
    return run_dir


def _skips_table(result: SweepResult) -> dict[str, str]:
    if not result.skips:
        return {}
    lines = ["index,reason"]
    for s in result.skips:
        reason = str(s["reason"]).replace(",", ";")
        lines.append(f"{s['index']},{reason}")
    return {"skips.csv": "\n".join(lines) + "\n"}


def _cmd_spectrum(args) -> int:
    params = _merge_params("spectrum", args)
    mesh = _build_mesh(params)
    problem, k = params["problem"], params["count"]
    if problem in ("dirichlet", "neumann"):
        spec = laplace_spectrum(mesh, problem, params["order"], k)
    elif problem == "buckling":
        spec = buckling_spectrum(mesh, k)
    else:
        spec = navier_spectrum(mesh, k)
    rows = ["index,value,problem,mesh_hash"] + spectrum_to_csv_rows(spec)
    tables = {"spectrum.csv": "\n".join(rows) + "\n"}
    run_dir = _finish("spectrum", params, tables,
                      {"mesh": mesh.content_hash()}, args.run_root)
    values = " ".join(f"{v:.6g}" for v in spec.values)
    print(f"{problem} spectrum: {values}")
    print(f"run_dir={run_dir}")
    return 0


def _cmd_identity_scan(args) -> int:
    params = _merge_params("identity-scan", args)
    mesh = _build_mesh(params)
    grid = np.linspace(params["lmin"], params["lmax"], params["points"])
    result = traceops.scan_identities(
        mesh, params["kind"], grid, order=params["order"], threads=params["threads"]
    )
    columns = ["lambda", "neg_count", "lhs", "rhs", "holds", "margin", "nudged"]
    tables = {"identities.csv": result.to_csv(columns)}
    tables.update(_skips_table(result))
    run_dir = _finish("identity-scan", params, tables,
                      {"mesh": mesh.content_hash()}, args.run_root)
    print(
        f"all_hold={fmt(result.summary['all_hold'])} "
        f"points={len(result.records)} skips={len(result.skips)}"
    )
    print(f"run_dir={run_dir}")
    return 0


def _cmd_beta1_scan(args) -> int:
    params = _merge_params("beta1-scan", args)
    mesh = _build_mesh(params)
    grid = np.linspace(params["lmin"], params["lmax"], params["points"])
    result = traceops.scan_beta1(mesh, grid, threads=params["threads"])
    columns = ["lambda", "beta1", "neg_count", "margin", "nudged"]
    tables = {"beta1.csv": result.to_csv(columns)}
    lam = np.array([r["lambda"] for r in result.records])
    b1 = np.array([r["beta1"] for r in result.records])
    tables["beta1.dat"] = runio.plot_data_content({"lambda": lam, "beta1": b1})
    tables.update(_skips_table(result))
    run_dir = _finish("beta1-scan", params, tables,
                      {"mesh": mesh.content_hash()}, args.run_root)
    print(
        f"points={len(result.records)} negative={result.summary['n_negative']} "
        f"skips={len(result.skips)}"
    )
    print(f"run_dir={run_dir}")
    return 0


def _cmd_counterexample(args) -> int:
    params = _merge_params("counterexample", args)
    mesh = _build_mesh(params)
    _, lambda1 = cex.buckling_ground_state(mesh)
    if params["lam"] < lambda1:
        return _run_bounded_below(params, mesh, lambda1, args.run_root)
    report = cex.divergence_sweep(mesh, params["lam"], params["eps"])
    rows = ["eps,numerator,denominator,quotient"]
    for s in report.samples:
        rows.append(
            f"{fmt(s.eps)},{fmt(s.numerator)},{fmt(s.denominator)},{fmt(s.quotient)}"
        )
    eps = np.array([s.eps for s in report.samples])
    q = np.array([abs(s.quotient) for s in report.samples])
    tables = {
        "divergence.csv": "\n".join(rows) + "\n",
        "divergence_loglog.dat": runio.plot_data_content(
            {"eps": eps, "abs_quotient": q}, xlog=True, ylog=True
        ),
    }
    run_dir = _finish("counterexample", params, tables,
                      {"mesh": mesh.content_hash()}, args.run_root)
    print(
        f"slope={report.fitted_slope:.4f} stderr={report.slope_stderr:.4f} "
        f"alpha={report.alpha:.10g} alpha_pencil={report.alpha_pencil:.10g} "
        f"Lambda1={report.lambda1_buckling:.10g} anomaly={fmt(report.anomaly)}"
    )
    print(f"run_dir={run_dir}")
    return 0


def _run_bounded_below(params: dict, mesh: Mesh, lambda1: float, run_root) -> int:
    """Below the buckling threshold the same command checks the bounded
    regime instead: random trial quotients never undercut the smallest
    trace eigenvalue."""
    report = cex.bounded_below_check(
        mesh, params["lam"], params["trials"], seed=params["seed"]
    )
    rows = [
        "quantity,value",
        f"lambda,{fmt(report.lam)}",
        f"Lambda1,{fmt(lambda1)}",
        f"beta1,{fmt(report.beta1)}",
        f"n_trials,{report.n_trials}",
        f"min_quotient,{fmt(report.min_quotient)}",
        f"minimizer_quotient,{fmt(report.minimizer_quotient)}",
        f"violations,{report.violations}",
        f"interior_residual,{fmt(report.interior_residual)}",
        f"passed,{fmt(report.passed)}",
    ]
    tables = {"bounded_below.csv": "\n".join(rows) + "\n"}
    run_dir = _finish("counterexample", params, tables,
                      {"mesh": mesh.content_hash()}, run_root)
    print(
        f"regime=bounded-below beta1={report.beta1:.8g} "
        f"min_quotient={report.min_quotient:.8g} violations={report.violations} "
        f"interior_residual={report.interior_residual:.2e} passed={fmt(report.passed)}"
    )
    print(f"run_dir={run_dir}")
    return 0 if report.passed else 1


def _cmd_spherecap(args) -> int:
    params = _merge_params("spherecap", args)
    result = spherecap.cap_scan(
        params["eps_list"], params["nodes"], params["modes"],
        params["grading"], params["threads"],
    )
    columns = [
        "eps", "lambda1", "lambda2", "mu2", "Lambda1",
        "friedlander_fails", "payne_fails", "resolution_warning",
    ]
    tables = {"spherecap.csv": result.to_csv(columns)}
    eps = np.array([r["eps"] for r in result.records])
    for curve in ("lambda1", "lambda2", "mu2", "Lambda1"):
        vals = np.array([r[curve] for r in result.records])
        tables[f"{curve}.dat"] = runio.plot_data_content(
            {"eps": eps, curve: vals}, xlog=True
        )
    tables.update(_skips_table(result))
    from .mesh import make_radial_grid

    grid_hashes = ",".join(
        make_radial_grid(e, params["nodes"], params["grading"]).content_hash()
        for e in params["eps_list"]
    )
    run_dir = _finish("spherecap", params, tables, {"grids": grid_hashes},
                      args.run_root)
    for r in result.records:
        print(
            f"eps={r['eps']:g} lambda1={r['lambda1']:.5g} lambda2={r['lambda2']:.5g} "
            f"mu2={r['mu2']:.5g} Lambda1={r['Lambda1']:.5g} "
            f"friedlander_fails={fmt(r['friedlander_fails'])} "
            f"payne_fails={fmt(r['payne_fails'])}"
        )
    print(f"run_dir={run_dir}")
    return 0


def _cmd_report(args) -> int:
    run_dir = Path(args.run)
    manifest_path = run_dir / "manifest.json"
    if not manifest_path.exists():
        print(f"incomplete run (no manifest): {run_dir}", file=sys.stderr)
        return 1
    meta = json.loads(manifest_path.read_text())
    print(f"command: {meta['command']}")
    print(f"version: {meta['version']}")
    print(f"params: {json.dumps(meta['params'], sort_keys=True)}")
    ok = True
    for name in meta.get("outputs", []):
        path = run_dir / name
        if path.exists():
            n_rows = max(len(path.read_text().splitlines()) - 1, 0)
            print(f"output: {name} ({n_rows} data rows)")
        else:
            print(f"output: {name} MISSING", file=sys.stderr)
            ok = False
    return 0 if ok else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bucklab",
        description="Spectral laboratory: Laplace/buckling spectra, boundary "
        "trace operators, counting identities, quotient divergence and "
        "punctured-sphere experiments.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--config", help="flat key = value parameter file")
        p.add_argument("--run-root", default=None,
                       help="run directory root (default $BUCKLAB_RUNS or ./runs)")
        p.add_argument("--threads", type=int, default=None)

    def add_mesh_flags(p):
        p.add_argument("--domain", choices=["disk", "rectangle"], default=None)
        p.add_argument("--refine", type=int, default=None)
        p.add_argument("--radius", type=float, default=None)
        p.add_argument("--a", type=float, default=None)
        p.add_argument("--b", type=float, default=None)
        p.add_argument("--nx", type=int, default=None)
        p.add_argument("--ny", type=int, default=None)

    p = sub.add_parser("spectrum", help="compute one spectrum")
    add_common(p)
    add_mesh_flags(p)
    p.add_argument("--problem", choices=["dirichlet", "neumann", "buckling", "navier"],
                   default=None)
    p.add_argument("--order", type=int, choices=[1, 2], default=None)
    p.add_argument("--count", type=int, default=None)
    p.set_defaults(func=_cmd_spectrum)

    p = sub.add_parser("identity-scan", help="sweep a counting identity")
    add_common(p)
    add_mesh_flags(p)
    p.add_argument("--kind", choices=["friedlander", "liu"], default=None)
    p.add_argument("--order", type=int, choices=[1, 2], default=None)
    p.add_argument("--lmin", type=float, default=None)
    p.add_argument("--lmax", type=float, default=None)
    p.add_argument("--points", type=int, default=None)
    p.set_defaults(func=_cmd_identity_scan)

    p = sub.add_parser("beta1-scan", help="sweep the smallest trace eigenvalue")
    add_common(p)
    add_mesh_flags(p)
    p.add_argument("--lmin", type=float, default=None)
    p.add_argument("--lmax", type=float, default=None)
    p.add_argument("--points", type=int, default=None)
    p.set_defaults(func=_cmd_beta1_scan)

    p = sub.add_parser(
        "counterexample",
        help="quotient divergence sweep (or, below the buckling "
        "threshold, the bounded-regime check)",
    )
    add_common(p)
    add_mesh_flags(p)
    p.add_argument("--lambda", dest="lam", type=float, default=None)
    p.add_argument("--eps", type=_float_list, default=None,
                   help="comma-separated decreasing list")
    p.add_argument("--trials", type=int, default=None,
                   help="random trial count for the bounded regime")
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(func=_cmd_counterexample)

    p = sub.add_parser("spherecap", help="punctured-sphere scan")
    add_common(p)
    p.add_argument("--eps-list", dest="eps_list", type=_float_list, default=None)
    p.add_argument("--nodes", type=int, default=None)
    p.add_argument("--modes", type=int, default=None)
    p.add_argument("--grading", choices=["uniform", "geometric"], default=None)
    p.set_defaults(func=_cmd_spherecap)

    p = sub.add_parser("report", help="summarize a run directory")
    p.add_argument("--run", required=True)
    p.set_defaults(func=_cmd_report)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if getattr(args, "run_root", None) is None and args.command != "report":
        args.run_root = runio.default_run_root()
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except (BucklabError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
