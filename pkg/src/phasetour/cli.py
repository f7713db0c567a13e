"""Command-line front end.

Exit codes: 0 success, 2 usage error, 3 size/feasibility error,
4 provenance error.
"""
from __future__ import annotations

import argparse
import dataclasses
import logging
import sys
from pathlib import Path

from . import experiment as ex
from . import stats
from .costspace import asymmetry_report, triangle_report, TRIANGLE_CAP
from .errors import InvalidArgument, PhaseTourError
from .plotdata import emit_path_plot_data, emit_trajectory_csv
from .store import json_bytes, read_grid, write_artifact, write_grid
from .trajectory import AccelBound

log = logging.getLogger("phasetour")


def _floats(text):
    try:
        return [float(v) for v in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _add_grid_args(p):
    g = p.add_argument_group("grid")
    g.add_argument("--m", type=int, help="phase-space dimension (even)")
    g.add_argument("--n-per-axis", type=int, help="points per axis (rectangular grid)")
    g.add_argument("--count", type=int, help="number of points (random grid)")
    g.add_argument("--grid", choices=["rect", "rand"], dest="grid_kind")
    g.add_argument("--seed-grid", type=int, dest="grid_seed")


def _add_matrix_args(p):
    g = p.add_argument_group("cost")
    g.add_argument("--cost", choices=["time", "energy"], dest="cost_kind")
    g.add_argument("--amax", type=float, dest="a_max")
    g.add_argument("--accel-tol", type=float)
    g.add_argument("--workers", type=int)


def _add_common(p):
    p.add_argument("--config", type=Path, help="YAML key/value config; flags override it")
    p.add_argument("--out", dest="output_dir", help="output directory")


def _config(args) -> ex.ExperimentConfig:
    cfg = ex.load_config(args.config) if getattr(args, "config", None) else ex.ExperimentConfig()
    names = {f.name for f in dataclasses.fields(cfg)}
    overrides = {k: v for k, v in vars(args).items() if k in names and v is not None}
    return dataclasses.replace(cfg, **overrides).validate()


def _emit(obj, out_dir=None, prefix=None):
    data = json_bytes(obj)
    if out_dir and prefix:
        path, _ = write_artifact(out_dir, prefix, data, ".json")
        log.info("wrote %s", path)
    sys.stdout.write(data.decode())


def cmd_gen_grid(args):
    cfg = _config(args)
    grid = ex.make_grid(cfg)
    path = write_grid(grid, cfg.output_dir)
    _emit({"grid_id": grid.id, "points": len(grid), "file": str(path)})


def cmd_build_matrix(args):
    cfg = _config(args)
    grid = ex.make_grid(cfg)
    write_grid(grid, cfg.output_dir)
    matrix, path = ex.obtain_matrix(cfg, grid, Path(cfg.output_dir))
    _emit({"grid_id": grid.id, "matrix_id": matrix.id, "kind": matrix.kind.value, "n": matrix.n,
           "manifest": str(path)})


def cmd_search(args):
    cfg = _config(args)
    path, manifest = ex.run_experiment(cfg)
    summary = {k: manifest[k] for k in ("result_id", "regime", "n_runs", "best_cost", "moments", "files")}
    if "max_tie" in manifest:
        summary["max_tie"] = manifest["max_tie"]
    summary["manifest"] = str(path)
    _emit(summary)


def cmd_stats(args):
    man = ex.load_result(args.result)
    costs = ex.load_costs(man)
    files = ex.write_population_stats(costs, Path(man["_dir"]), args.bins)
    out = {"moments": stats.summarize(costs).to_dict(), "files": files}
    if len(costs) >= 3 and costs.std() > 0:
        out["qq_correlation"] = stats.qq_data(costs).correlation
    _emit(out)


def cmd_compare(args):
    nn = ex.load_result(args.nn)
    samp = ex.load_result(args.sample)
    if nn["regime"] != "nn":
        raise InvalidArgument("first result must be an NN search")
    report = stats.compare(ex.load_costs(nn), ex.load_costs(samp), n=args.tries)
    obj = {"nn_result": nn["result_id"], "sample_result": samp["result_id"], **report.to_dict()}
    _emit(obj, args.output_dir or nn["_dir"], "zreport")


def cmd_diagnose(args):
    cfg = _config(args)
    grid = ex.make_grid(cfg)
    write_grid(grid, cfg.output_dir)
    matrix, _ = ex.obtain_matrix(cfg, grid, Path(cfg.output_dir))
    obj = {"matrix_id": matrix.id, "kind": matrix.kind.value,
           "asymmetry": dataclasses.asdict(asymmetry_report(matrix, args.rel_tol))}
    if matrix.n <= args.triangle_cap:
        obj["triangle"] = dataclasses.asdict(triangle_report(matrix, args.triangle_cap))
    else:
        obj["triangle"] = None
        log.warning("skipping triangle scan: %d points exceeds cap %d", matrix.n, args.triangle_cap)
    _emit(obj, cfg.output_dir, "diagnostics")


def cmd_ties(args):
    man = ex.load_result(args.result)
    dist = ex.tie_distribution(ex.load_ties(man))
    dist["result_id"] = man["result_id"]
    _emit(dist)


def cmd_traj_plot(args):
    bound = AccelBound(args.a_max if args.a_max is not None else 2.0,
                       args.accel_tol if args.accel_tol is not None else 0.02)
    if args.result:
        man = ex.load_result(args.result)
        d = Path(man["_dir"])
        grid = read_grid(d / man["grid_file"])
        cfg = man["config"]
        bound = AccelBound(cfg["a_max"], cfg["accel_tol"])
        seg, seq = emit_path_plot_data(grid, man["best_order"], bound, args.samples)
        out = Path(args.output_dir or d)
        p1, _ = write_artifact(out, "segments", seg, ".csv")
        p2, _ = write_artifact(out, "sequence", seq, ".csv")
        _emit({"segments": str(p1), "sequence": str(p2)})
        return
    if not (args.from_ and args.to):
        raise InvalidArgument("traj-plot needs --from and --to, or --result")
    data = emit_trajectory_csv(args.from_, args.to, bound, args.samples)
    if args.output_dir:
        path, _ = write_artifact(args.output_dir, "traj", data, ".csv")
        log.info("wrote %s", path)
    else:
        sys.stdout.write(data.decode())


def cmd_reproduce(args):
    report = ex.reproduce(args.result)
    _emit({"reproduced": True, "files": {k: v[0] for k, v in report.items()}})


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="phasetour", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-grid", help="generate and store a grid")
    _add_common(p)
    _add_grid_args(p)
    p.set_defaults(func=cmd_gen_grid)

    p = sub.add_parser("build-matrix", help="build (or load cached) cost matrices")
    _add_common(p)
    _add_grid_args(p)
    _add_matrix_args(p)
    p.set_defaults(func=cmd_build_matrix)

    p = sub.add_parser("search", help="run a search experiment")
    _add_common(p)
    _add_grid_args(p)
    _add_matrix_args(p)
    g = p.add_argument_group("search")
    g.add_argument("--regime", choices=ex.REGIMES)
    g.add_argument("--tie-tol", type=float)
    g.add_argument("--seed-search", type=int, dest="search_seed")
    g.add_argument("--runs", type=int, help="NN runs per start (or number of random starts)")
    g.add_argument("--starts", help="all | random | comma list of indices")
    g.add_argument("--samples", type=int, dest="sample_count")
    g.add_argument("--bins", type=int)
    g.add_argument("--enum-cap", type=int)
    g.add_argument("--compare-with", help="result id or manifest to build a Z report against")
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("stats", help="moments, histogram and Q-Q data for a result")
    p.add_argument("result")
    p.add_argument("--bins", type=int, default=50)
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("compare", help="Z report of an NN result against a sample result")
    p.add_argument("nn")
    p.add_argument("sample")
    p.add_argument("--tries", type=int, help="n for P_ln (default: sample size)")
    p.add_argument("--out", dest="output_dir")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("diagnose", help="asymmetry and triangle-inequality report")
    _add_common(p)
    _add_grid_args(p)
    _add_matrix_args(p)
    p.add_argument("--rel-tol", type=float, default=0.05)
    p.add_argument("--triangle-cap", type=int, default=TRIANGLE_CAP)
    p.set_defaults(func=cmd_diagnose)

    p = sub.add_parser("ties", help="tie multiplicity distribution of an NN result")
    p.add_argument("result")
    p.set_defaults(func=cmd_ties)

    p = sub.add_parser("traj-plot", help="trajectory or path samples as CSV")
    p.add_argument("--from", dest="from_", type=_floats)
    p.add_argument("--to", type=_floats)
    p.add_argument("--result", help="emit the best path of this result instead")
    p.add_argument("--amax", type=float, dest="a_max")
    p.add_argument("--accel-tol", type=float)
    p.add_argument("--samples", type=int, default=50)
    p.add_argument("--out", dest="output_dir")
    p.set_defaults(func=cmd_traj_plot)

    p = sub.add_parser("reproduce", help="rerun a result from its manifest and verify bytes")
    p.add_argument("result")
    p.set_defaults(func=cmd_reproduce)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        args.func(args)
    except PhaseTourError as exc:
        print(f"phasetour: {exc}", file=sys.stderr)
        return exc.exit_code
    return 0


if __name__ == "__main__":
    sys.exit(main())
