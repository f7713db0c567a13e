"""Experiment orchestration: grid -> cost matrix -> search -> data files.

A result manifest embeds the resolved config (minus output location and
worker count, which do not affect results) and the ArtifactId of every data
file, so ``reproduce`` can rerun it and compare bytes.
"""
from __future__ import annotations

import dataclasses
import json
import logging
import math
import tempfile
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np
import yaml

from . import stats
from .costspace import CostKind, build_cost_matrices
from .errors import InvalidArgument, ProvenanceError
from .grid import Grid, make_random_grid, make_rect_grid
from .search import ENUMERATION_CAP, exhaustive_search, multi_nn, random_sample, random_starts
from .store import (content_hash, csv_bytes, find_matrix, fmt, json_bytes, read_grid, read_matrix,
                    verify_file, write_artifact, write_grid, write_matrix)
from .trajectory import AccelBound

log = logging.getLogger(__name__)

REGIMES = ("exhaustive", "nn", "sample")
_NOT_HASHED = ("output_dir", "workers")

# flag spellings accepted as config keys
_ALIASES = {
    "n": "n_per_axis",
    "grid": "grid_kind",
    "cost": "cost_kind",
    "amax": "a_max",
    "seed_grid": "grid_seed",
    "seed_search": "search_seed",
    "samples": "sample_count",
    "out": "output_dir",
}


@dataclass
class ExperimentConfig:
    m: int = 2
    n_per_axis: Optional[int] = 3
    count: Optional[int] = None
    grid_kind: str = "rect"
    grid_seed: int = 0
    cost_kind: str = "time"
    a_max: float = 2.0
    accel_tol: float = 0.02
    tie_tol: float = 0.02
    regime: str = "sample"
    # NN starting points: "all", "random" (``runs`` random starts, one run
    # each) or a comma list of indices
    starts: str = "all"
    runs: int = 1
    sample_count: int = 10_000
    search_seed: int = 0
    bins: int = 50
    enum_cap: int = ENUMERATION_CAP
    compare_with: Optional[str] = None
    output_dir: str = "runs"
    workers: int = 1

    def validate(self) -> "ExperimentConfig":
        if self.m < 2 or self.m % 2:
            raise InvalidArgument(f"m must be a positive even integer, got {self.m}")
        if self.bins < 1:
            raise InvalidArgument("bins must be >= 1")
        if self.grid_kind not in ("rect", "rand"):
            raise InvalidArgument(f"grid_kind must be rect or rand, got {self.grid_kind!r}")
        if self.grid_kind == "rect" and not self.n_per_axis:
            raise InvalidArgument("rectangular grid needs n_per_axis")
        if self.grid_kind == "rand" and not self.count:
            raise InvalidArgument("random grid needs count")
        if self.cost_kind not in ("time", "energy"):
            raise InvalidArgument(f"cost_kind must be time or energy, got {self.cost_kind!r}")
        if self.regime not in REGIMES:
            raise InvalidArgument(f"regime must be one of {REGIMES}, got {self.regime!r}")
        if self.runs < 1 or self.sample_count < 1:
            raise InvalidArgument("runs and sample_count must be >= 1")
        if not 0 < self.tie_tol < 1:
            raise InvalidArgument("tie_tol must lie in (0, 1)")
        AccelBound(self.a_max, self.accel_tol)
        return self

    @property
    def bound(self) -> AccelBound:
        return AccelBound(self.a_max, self.accel_tol)

    def hashed_dict(self) -> dict:
        d = dataclasses.asdict(self)
        for k in _NOT_HASHED:
            d.pop(k)
        return d

    @classmethod
    def from_mapping(cls, data: dict) -> "ExperimentConfig":
        names = {f.name for f in dataclasses.fields(cls)}
        kwargs = {}
        for key, value in data.items():
            k = key.replace("-", "_")
            k = _ALIASES.get(k, k)
            if k not in names:
                raise InvalidArgument(f"unknown config key {key!r}")
            kwargs[k] = value
        if "starts" in kwargs and isinstance(kwargs["starts"], (list, tuple)):
            kwargs["starts"] = ",".join(str(int(s)) for s in kwargs["starts"])
        return cls(**kwargs)


def load_config(path) -> ExperimentConfig:
    data = yaml.safe_load(Path(path).read_text()) or {}
    if not isinstance(data, dict):
        raise InvalidArgument(f"{path}: config must be a key/value mapping")
    return ExperimentConfig.from_mapping(data)


def make_grid(cfg: ExperimentConfig) -> Grid:
    if cfg.grid_kind == "rect":
        return make_rect_grid(cfg.m, cfg.n_per_axis)
    return make_random_grid(cfg.m, cfg.count, cfg.grid_seed)


def obtain_matrix(cfg: ExperimentConfig, grid: Grid, out: Path):
    """Cached matrix for (grid, kind, a_max, tol), building both kinds on a miss."""
    cached = find_matrix(out, grid.id, cfg.cost_kind, cfg.a_max, cfg.accel_tol)
    if cached is not None:
        log.info("using cached matrix %s", cached.name)
        return read_matrix(cached, grid), cached
    log.info("building cost matrices for grid %s (%d points)", grid.id, len(grid))
    mats = build_cost_matrices(grid, cfg.bound, workers=cfg.workers)
    paths = {kind: write_matrix(mat, out) for kind, mat in mats.items()}
    kind = CostKind(cfg.cost_kind)
    return mats[kind], paths[kind]


def _resolve_starts(cfg: ExperimentConfig, n: int):
    if cfg.starts == "all":
        return "all", cfg.runs
    if cfg.starts == "random":
        return random_starts(n, cfg.runs, cfg.search_seed), 1
    try:
        starts = [int(s) for s in str(cfg.starts).split(",") if s.strip()]
    except ValueError:
        raise InvalidArgument(f"starts must be all, random, or a comma list, got {cfg.starts!r}")
    if not starts or any(not 0 <= s < n for s in starts):
        raise InvalidArgument(f"start indices must lie in [0, {n})")
    return starts, cfg.runs


def run_search(cfg: ExperimentConfig, matrix):
    if cfg.regime == "exhaustive":
        return exhaustive_search(matrix, cap=cfg.enum_cap)
    if cfg.regime == "sample":
        return random_sample(matrix, cfg.sample_count, seed=cfg.search_seed)
    starts, per_start = _resolve_starts(cfg, matrix.n)
    return multi_nn(matrix, starts, per_start, cfg.tie_tol, cfg.search_seed, workers=cfg.workers)


def _costs_csv(result) -> bytes:
    if result.regime == "nn":
        rows = [(s, r, c) for (s, r), c in zip(result.runs, result.all_costs.tolist())]
        return csv_bytes(["start", "rep", "cost"], rows)
    return b"cost\n" + "".join(fmt(c) + "\n" for c in result.all_costs.tolist()).encode()


def _ties_csv(result) -> bytes:
    rows = [
        (s, r, step, int(k))
        for (s, r), log_ in zip(result.runs, result.tie_logs)
        for step, k in enumerate(log_.tolist())
    ]
    return csv_bytes(["start", "rep", "step", "multiplicity"], rows)


def histogram_csv(h: stats.Histogram) -> bytes:
    rows = [(lo, hi, int(c)) for lo, hi, c in zip(h.edges[:-1].tolist(), h.edges[1:].tolist(), h.counts)]
    return csv_bytes(["edge_lo", "edge_hi", "count"], rows)


def qq_csv(qq: stats.QQSeries) -> bytes:
    return csv_bytes(["theoretical", "sample"], zip(qq.theoretical.tolist(), qq.sample.tolist()))


def write_population_stats(costs, out: Path, bins: int) -> dict:
    """Moments JSON, histogram CSV and (when defined) Q-Q CSV; returns file names by role."""
    files = {}
    moments = stats.summarize(costs)
    files["moments"] = write_artifact(out, "moments", json_bytes(moments.to_dict()), ".json")[0].name
    files["histogram"] = write_artifact(out, "hist", histogram_csv(stats.histogram(costs, bins)), ".csv")[0].name
    if len(costs) >= 3 and moments.std > 0:
        qq = stats.qq_data(costs)
        files["qq"] = write_artifact(out, "qq", qq_csv(qq), ".csv")[0].name
    return files


def _manifest_id(manifest: dict) -> str:
    body = {k: v for k, v in manifest.items() if k not in ("result_id", "elapsed_sec")}
    return content_hash(json_bytes(body))


def run_experiment(cfg: ExperimentConfig, lookup_dirs=()) -> tuple[Path, dict]:
    """Run one configured experiment; returns (manifest path, manifest).

    ``lookup_dirs`` are extra places to find the ``compare_with`` result.
    """
    cfg.validate()
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    grid = make_grid(cfg)
    grid_path = write_grid(grid, out)
    matrix, matrix_path = obtain_matrix(cfg, grid, out)
    result = run_search(cfg, matrix)
    log.info("%s search: %d paths, best %.6g", result.regime, result.all_costs.size, result.best.total_cost)

    files = {"costs": write_artifact(out, "costs", _costs_csv(result), ".csv")[0].name}
    if result.regime == "nn":
        files["ties"] = write_artifact(out, "ties", _ties_csv(result), ".csv")[0].name
    files.update(write_population_stats(result.all_costs, out, cfg.bins))
    if cfg.compare_with:
        other = load_result(cfg.compare_with, base=[out, *lookup_dirs])
        # store the companion by id so the manifest is location independent
        cfg = dataclasses.replace(cfg, compare_with=other["result_id"])
        other_costs = load_costs(other)
        nn, samp = (result.all_costs, other_costs) if result.regime == "nn" else (other_costs, result.all_costs)
        z = stats.compare(nn, samp)
        files["zreport"] = write_artifact(out, "zreport", json_bytes(z.to_dict()), ".json")[0].name

    manifest = {
        "config": cfg.hashed_dict(),
        "grid_id": grid.id,
        "grid_file": grid_path.name,
        "matrix_id": matrix.id,
        "matrix_manifest": matrix_path.name,
        "regime": result.regime,
        "params": dict(result.params),
        "seed": cfg.search_seed,
        "n_runs": int(result.all_costs.size),
        "best_order": result.best.order.tolist(),
        "best_cost": result.best.total_cost,
        "moments": stats.summarize(result.all_costs).to_dict(),
        "files": files,
        "elapsed_sec": round(result.elapsed, 3),
    }
    if result.tie_logs:
        manifest["max_tie"] = int(max(t.max() for t in result.tie_logs if t.size))
    manifest["result_id"] = _manifest_id(manifest)
    path = out / f"result_{manifest['result_id']}.json"
    path.write_bytes(json_bytes(manifest))
    return path, manifest


def load_result(ref, base=None) -> dict:
    """Load and verify a result manifest given a path or a bare result id."""
    path = Path(ref)
    if not path.exists() and base is not None:
        bases = [base] if isinstance(base, (str, Path)) else base
        candidates = [Path(b) / n for b in bases for n in (ref, f"result_{ref}.json")]
        path = next((p for p in candidates if p.exists()), path)
    if not path.exists():
        raise InvalidArgument(f"no result manifest at {ref}")
    manifest = json.loads(path.read_text())
    if _manifest_id(manifest) != manifest.get("result_id"):
        raise ProvenanceError(f"{path}: manifest content does not match its result_id")
    manifest["_dir"] = str(path.parent)
    return manifest


def verify_result(manifest: dict) -> None:
    d = Path(manifest["_dir"])
    for name in manifest["files"].values():
        verify_file(d / name)
    read_grid(d / manifest["grid_file"])
    mat = json.loads((d / manifest["matrix_manifest"]).read_text())
    verify_file(d / mat["data_file"], mat["matrix_id"])
    if mat["grid_id"] != manifest["grid_id"]:
        raise ProvenanceError("matrix and result disagree on grid id")


def load_costs(manifest: dict) -> np.ndarray:
    data = verify_file(Path(manifest["_dir"]) / manifest["files"]["costs"]).decode()
    lines = data.splitlines()
    col = lines[0].split(",").index("cost")
    return np.array([float(line.split(",")[col]) for line in lines[1:]])


def load_ties(manifest: dict) -> np.ndarray:
    if "ties" not in manifest["files"]:
        raise InvalidArgument("result has no tie log (not an NN search)")
    data = verify_file(Path(manifest["_dir"]) / manifest["files"]["ties"]).decode()
    return np.array([int(line.rsplit(",", 1)[1]) for line in data.splitlines()[1:]], dtype=np.int64)


def tie_distribution(multiplicities) -> dict:
    m = np.asarray(multiplicities)
    values, counts = np.unique(m, return_counts=True)
    return {
        "steps": int(m.size),
        "max": int(m.max()),
        "mean": float(m.mean()),
        "fraction_tied": float(np.mean(m > 1)),
        "counts": {int(v): int(c) for v, c in zip(values, counts)},
        "log_max": math.log(int(m.max())),
    }


def reproduce(manifest_path, workdir=None) -> dict:
    """Rerun a result from its embedded config and compare every data file.

    Returns ``{role: (recorded name, rerun name)}``; raises ProvenanceError on
    any mismatch.
    """
    manifest = load_result(manifest_path)
    verify_result(manifest)
    with tempfile.TemporaryDirectory(dir=workdir) as tmp:
        cfg = ExperimentConfig.from_mapping({**manifest["config"], "output_dir": tmp})
        _, rerun = run_experiment(cfg, lookup_dirs=[manifest["_dir"]])
    report = {role: (name, rerun["files"].get(role)) for role, name in manifest["files"].items()}
    bad = {r: v for r, v in report.items() if v[0] != v[1]}
    if bad or rerun["result_id"] != manifest["result_id"]:
        raise ProvenanceError(f"rerun differs from recorded result: {bad or 'manifest'}")
    return report
