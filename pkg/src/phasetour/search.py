"""Open-path searches over a cost matrix.

A path visits every index exactly once with no return edge; its cost is the
sum of the n-1 branch costs. Three regimes: exhaustive enumeration,
nearest-neighbor with randomized tie breaking, and uniform random sampling.
"""
from __future__ import annotations

import itertools
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .costspace import CostMatrix
from .errors import InvalidArgument, InvalidPermutation, SizeError

ENUMERATION_CAP = 10
TIE_TOL = 0.02
_CHUNK = 200_000
# sub-stream key reserved for drawing random starting points
_STARTS_KEY = 0xFFFFFFFF


@dataclass
class Path:
    order: np.ndarray
    total_cost: float


@dataclass
class SearchResult:
    best: Path
    all_costs: np.ndarray
    regime: str
    seed: Optional[int] = None
    elapsed: float = 0.0
    tie_logs: Optional[list] = None
    # (start, repetition) for each NN run, aligned with all_costs
    runs: Optional[list] = None
    params: dict = field(default_factory=dict)


def _entries(matrix):
    return matrix.entries if isinstance(matrix, CostMatrix) else np.asarray(matrix, dtype=float)


def batch_costs(c: np.ndarray, orders: np.ndarray) -> np.ndarray:
    """Path costs for a (k, n) stack of orders."""
    return c[orders[:, :-1], orders[:, 1:]].sum(axis=1)


def _check_perm(order, n):
    order = np.asarray(order)
    if order.ndim != 1 or order.shape[0] != n or not np.array_equal(np.sort(order), np.arange(n)):
        raise InvalidPermutation(f"not a permutation of 0..{n - 1}: {order.tolist()}")
    return order.astype(np.intp)


def path_cost(matrix, order) -> float:
    c = _entries(matrix)
    order = _check_perm(order, c.shape[0])
    return float(batch_costs(c, order[None, :])[0])


def enumeration_estimate(n: int, paths_per_sec: float) -> float:
    return math.exp(math.lgamma(n + 1)) / paths_per_sec if n < 170 else math.inf


def _measure_rate(c: np.ndarray) -> float:
    n = c.shape[0]
    rng = np.random.default_rng(0)
    orders = rng.permuted(np.tile(np.arange(n), (20_000, 1)), axis=1)
    t0 = time.perf_counter()
    batch_costs(c, orders)
    return 20_000 / max(time.perf_counter() - t0, 1e-9)


def exhaustive_search(matrix, cap: int = ENUMERATION_CAP) -> SearchResult:
    c = _entries(matrix)
    n = c.shape[0]
    if n > cap:
        rate = _measure_rate(c)
        est = enumeration_estimate(n, rate)
        log10_paths = math.lgamma(n + 1) / math.log(10)
        log10_years = log10_paths - math.log10(rate * 3.15576e7)
        years = f"{10 ** log10_years:.3g}" if log10_years < 15 else f"10^{log10_years:.1f}"
        raise SizeError(
            f"exhaustive search over {n} points means 10^{log10_paths:.1f} paths; "
            f"at {rate:.3g} paths/s that is about {years} years (cap n <= {cap})",
            estimate_sec=est,
        )
    t0 = time.perf_counter()
    perms = itertools.permutations(range(n))
    costs = []
    best_cost, best_order = math.inf, None
    while True:
        flat = np.fromiter(
            itertools.chain.from_iterable(itertools.islice(perms, _CHUNK)), dtype=np.intp
        )
        if flat.size == 0:
            break
        orders = flat.reshape(-1, n)
        chunk = batch_costs(c, orders)
        k = int(np.argmin(chunk))
        if chunk[k] < best_cost:
            best_cost, best_order = float(chunk[k]), orders[k].copy()
        costs.append(chunk)
    all_costs = np.concatenate(costs)
    return SearchResult(
        best=Path(best_order, best_cost),
        all_costs=all_costs,
        regime="exhaustive",
        elapsed=time.perf_counter() - t0,
    )


def nn_search(matrix, start: int, tie_tol: float = TIE_TOL, rng=None):
    """Greedy path from ``start``; each step picks uniformly among unvisited
    nodes whose branch cost is within ``tie_tol`` (relative) of the cheapest.

    Returns ``(Path, tie multiplicities per step)``.
    """
    c = _entries(matrix)
    n = c.shape[0]
    if not 0 <= start < n:
        raise InvalidArgument(f"start {start} out of range for {n} points")
    if not 0 < tie_tol < 1:
        raise InvalidArgument(f"tie_tol must lie in (0, 1), got {tie_tol}")
    if rng is None:
        rng = np.random.default_rng()
    visited = np.zeros(n, dtype=bool)
    order = np.empty(n, dtype=np.intp)
    ties = np.empty(n - 1, dtype=np.int64)
    cur = start
    order[0] = cur
    visited[cur] = True
    for step in range(n - 1):
        row = np.where(visited, np.inf, c[cur])
        cand = np.flatnonzero(row <= (1.0 + tie_tol) * row.min())
        ties[step] = cand.size
        cur = int(cand[rng.integers(cand.size)]) if cand.size > 1 else int(cand[0])
        order[step + 1] = cur
        visited[cur] = True
    return Path(order, float(batch_costs(c, order[None, :])[0])), ties


def random_sample(matrix, count: int, rng=None, seed: Optional[int] = None) -> SearchResult:
    """``count`` independent uniform permutations and their costs."""
    if count < 1:
        raise InvalidArgument("sample count must be >= 1")
    if rng is None:
        rng = np.random.default_rng(seed)
    c = _entries(matrix)
    n = c.shape[0]
    t0 = time.perf_counter()
    base = np.arange(n, dtype=np.intp)
    costs = np.empty(count)
    best_cost, best_order = math.inf, None
    per = max(1, _CHUNK * 8 // max(n, 1))
    for lo in range(0, count, per):
        k = min(per, count - lo)
        orders = rng.permuted(np.tile(base, (k, 1)), axis=1)
        chunk = batch_costs(c, orders)
        costs[lo : lo + k] = chunk
        j = int(np.argmin(chunk))
        if chunk[j] < best_cost:
            best_cost, best_order = float(chunk[j]), orders[j].copy()
    return SearchResult(
        best=Path(best_order, best_cost),
        all_costs=costs,
        regime="sample",
        seed=seed,
        elapsed=time.perf_counter() - t0,
    )


def substream(seed: int, *key: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in key)))


def random_starts(n: int, count: int, seed: int) -> list:
    """Distinct starting points drawn from the search seed (repeats only if count > n)."""
    rng = substream(seed, _STARTS_KEY)
    return sorted(int(s) for s in rng.choice(n, size=count, replace=count > n))


def multi_nn(matrix, starts="all", per_start: int = 1, tie_tol: float = TIE_TOL,
             seed: int = 0, workers: int = 1) -> SearchResult:
    """``per_start`` NN runs from each start, run r from start s using the
    sub-stream keyed (s, r) so results do not depend on scheduling."""
    c = _entries(matrix)
    n = c.shape[0]
    if per_start < 1:
        raise InvalidArgument("per_start must be >= 1")
    if isinstance(starts, str):
        if starts != "all":
            raise InvalidArgument(f"starts must be 'all' or a list of indices, got {starts!r}")
        starts = range(n)
    jobs = []
    for s in starts:
        # a start listed twice gets fresh repetition indices
        base = sum(1 for j in jobs if j[0] == s)
        jobs.extend((int(s), base + r) for r in range(per_start))
    jobs.sort()

    def run(job):
        s, r = job
        return nn_search(c, s, tie_tol, substream(seed, s, r))

    t0 = time.perf_counter()
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            out = list(pool.map(run, jobs))
    else:
        out = [run(j) for j in jobs]
    costs = np.array([p.total_cost for p, _ in out])
    k = int(np.argmin(costs))
    return SearchResult(
        best=out[k][0],
        all_costs=costs,
        regime="nn",
        seed=seed,
        elapsed=time.perf_counter() - t0,
        tie_logs=[t for _, t in out],
        runs=jobs,
        params={"tie_tol": tie_tol, "per_start": per_start},
    )
