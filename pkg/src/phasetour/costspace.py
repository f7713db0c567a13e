"""Dense ordered-pair cost matrices and their metric diagnostics."""
from __future__ import annotations

import enum
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidArgument, SizeError
from .grid import Grid
from .store import content_hash, matrix_data_bytes
from .trajectory import AccelBound, pair_costs

MAX_POINTS = 4096
TRIANGLE_CAP = 1024
TRIANGLE_ATOL = 1e-9
_PAIRS_PER_CHUNK = 1 << 17


class CostKind(str, enum.Enum):
    TIME = "time"
    ENERGY = "energy"


@dataclass(frozen=True, eq=False)
class CostMatrix:
    entries: np.ndarray
    kind: CostKind
    grid_id: str = ""
    a_max: float = 2.0
    tol: float = 0.02
    id: str = field(default="", init=False)

    def __post_init__(self):
        e = np.array(self.entries, dtype=float)
        if e.ndim != 2 or e.shape[0] != e.shape[1]:
            raise InvalidArgument("cost matrix must be square")
        if not np.all(np.isfinite(e)):
            raise InvalidArgument("cost matrix entries must be finite")
        e.setflags(write=False)
        object.__setattr__(self, "entries", e)
        object.__setattr__(self, "kind", CostKind(self.kind))
        object.__setattr__(self, "id", content_hash(matrix_data_bytes(e)))

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    def __getitem__(self, ij):
        return self.entries[ij]


def _row_block(points, rows, bound):
    n = points.shape[0]
    starts = np.repeat(points[rows], n, axis=0)
    ends = np.tile(points, (len(rows), 1))
    dt, energy = pair_costs(starts, ends, bound)
    return dt.reshape(len(rows), n), energy.reshape(len(rows), n)


def build_cost_matrices(grid: Grid, bound: AccelBound = AccelBound(), workers: int = 1,
                        max_points: int = MAX_POINTS) -> dict:
    """Time and energy matrices from one trajectory per ordered pair.

    Rows are independent, so they are computed in blocks, optionally on a
    thread pool (numpy releases the GIL in the heavy kernels).
    """
    n = len(grid)
    if n > max_points:
        raise SizeError(
            f"{n} points exceeds the dense matrix cap of {max_points} "
            f"({n * n * 8 / 1e9:.1f} GB per matrix)"
        )
    pts = grid.points
    rows_per = max(1, _PAIRS_PER_CHUNK // n)
    blocks = [np.arange(i, min(i + rows_per, n)) for i in range(0, n, rows_per)]
    times = np.empty((n, n))
    energies = np.empty((n, n))

    def work(rows):
        t, e = _row_block(pts, rows, bound)
        times[rows] = t
        energies[rows] = e

    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            list(pool.map(work, blocks))
    else:
        for rows in blocks:
            work(rows)

    off = ~np.eye(n, dtype=bool)
    if np.any(times[off] <= 0):
        raise InvalidArgument("grid contains duplicate points; off-diagonal costs must be positive")
    common = dict(grid_id=grid.id, a_max=bound.a_max, tol=bound.tol)
    return {
        CostKind.TIME: CostMatrix(times, CostKind.TIME, **common),
        CostKind.ENERGY: CostMatrix(energies, CostKind.ENERGY, **common),
    }


def build_cost_matrix(grid: Grid, kind, bound: AccelBound = AccelBound(), workers: int = 1,
                      max_points: int = MAX_POINTS) -> CostMatrix:
    return build_cost_matrices(grid, bound, workers, max_points)[CostKind(kind)]


@dataclass
class AsymmetryReport:
    rel_tol: float
    asymmetric_pairs: int
    max_rel_gap: float
    worst_pair: tuple | None


@dataclass
class TriangleReport:
    violations: int
    worst_violation: float
    worst_triplet: tuple | None


@dataclass
class MetricDiagnostics:
    asymmetry: AsymmetryReport
    triangle: TriangleReport | None


def _entries(matrix):
    return matrix.entries if isinstance(matrix, CostMatrix) else np.asarray(matrix, dtype=float)


def asymmetry_report(matrix, rel_tol: float = 0.05) -> AsymmetryReport:
    """Unordered pairs whose two directions differ by more than ``rel_tol``,
    relative to the cheaper direction."""
    c = _entries(matrix)
    iu, ju = np.triu_indices(c.shape[0], k=1)
    fwd, bwd = c[iu, ju], c[ju, iu]
    lo = np.minimum(fwd, bwd)
    with np.errstate(divide="ignore", invalid="ignore"):
        gap = np.where(lo > 0, np.abs(fwd - bwd) / lo, np.where(fwd == bwd, 0.0, np.inf))
    if gap.size == 0:
        return AsymmetryReport(rel_tol, 0, 0.0, None)
    worst = int(np.argmax(gap))
    return AsymmetryReport(
        rel_tol=rel_tol,
        asymmetric_pairs=int(np.count_nonzero(gap > rel_tol)),
        max_rel_gap=float(gap[worst]),
        worst_pair=(int(iu[worst]), int(ju[worst])),
    )


def triangle_report(matrix, cap: int = TRIANGLE_CAP, atol: float = TRIANGLE_ATOL) -> TriangleReport:
    """Count ordered triplets (i, k, j) of distinct indices with
    c(i, j) > c(i, k) + c(k, j) + atol. O(n^3)."""
    c = _entries(matrix)
    n = c.shape[0]
    if n > cap:
        raise SizeError(f"triangle scan over {n} points exceeds cap {cap} ({n ** 3:.2e} triplets)")
    count = 0
    worst = 0.0
    worst_triplet = None
    distinct = ~np.eye(n, dtype=bool)
    for i in range(n):
        # excess[k, j] = c(i,j) - c(i,k) - c(k,j)
        excess = c[i][None, :] - c[i][:, None] - c
        mask = distinct.copy()
        mask[i, :] = False
        mask[:, i] = False
        hits = (excess > atol) & mask
        count += int(np.count_nonzero(hits))
        if hits.any():
            masked = np.where(hits, excess, -np.inf)
            k, j = np.unravel_index(int(np.argmax(masked)), masked.shape)
            if masked[k, j] > worst:
                worst = float(masked[k, j])
                worst_triplet = (i, int(k), int(j))
    return TriangleReport(count, worst, worst_triplet)


def diagnose(matrix, rel_tol: float = 0.05, cap: int = TRIANGLE_CAP) -> MetricDiagnostics:
    tri = triangle_report(matrix, cap) if _entries(matrix).shape[0] <= cap else None
    return MetricDiagnostics(asymmetry_report(matrix, rel_tol), tri)
