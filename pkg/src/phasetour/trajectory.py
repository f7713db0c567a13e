"""Cubic point-to-point trajectories in phase space.

Each axis follows ``x(t) = a0 + a1 t + a2 t^2 + a3 t^3`` matching position
and velocity at both ends. All axes share one duration, chosen as the
shortest one whose peak acceleration meets the bound.

The array kernels (``cubic_terms``, ``peak_accel``, ``scale_durations``,
``energy_from_terms``) operate on stacks of endpoint pairs so the cost
matrix builder and the single-pair API run identical arithmetic.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgument, UnattainableConstraint
from .grid import as_coords

DT_START = 1e-3
DT_GROWTH = 1.5
DT_CEILING = 1e6
MAX_BISECTIONS = 200


@dataclass(frozen=True)
class AccelBound:
    a_max: float = 2.0
    tol: float = 0.02

    def __post_init__(self):
        if not self.a_max > 0:
            raise InvalidArgument(f"a_max must be positive, got {self.a_max}")
        if not 0 < self.tol < 1:
            raise InvalidArgument(f"tol must lie in (0, 1), got {self.tol}")


@dataclass(frozen=True, eq=False)
class CubicTraj:
    """``coeffs`` has one row ``(a0, a1, a2, a3)`` per position axis."""

    coeffs: np.ndarray
    dt: float
    start: np.ndarray
    end: np.ndarray

    @property
    def n_axes(self) -> int:
        return self.coeffs.shape[0]


def _split(p):
    c = as_coords(p)
    h = c.shape[0] // 2
    return c, c[:h], c[h:]


def cubic_terms(x0, v0, x1, v1, dt):
    """Return ``(a2, a3)``; ``a0 = x0`` and ``a1 = v0``. Broadcasts over arrays."""
    dx = x1 - x0
    dv = v1 - v0
    b0 = dt
    b1 = dt * dt
    b2 = dt * dt * dt
    b3 = 2.0 * dt
    b4 = 3.0 * dt * dt
    a3 = (b1 * dv - b3 * (dx - v0 * b0)) / (b1 * b4 - b2 * b3)
    a2 = (dx - v0 * b0 - a3 * b2) / b1
    return a2, a3


def peak_accel(x0, v0, x1, v1, dt):
    """max over axes of |a(0)| and |a(dt)|; ``dt`` has shape (P,), positions (P, h)."""
    d = dt[:, None]
    a2, a3 = cubic_terms(x0, v0, x1, v1, d)
    acc0 = np.abs(2.0 * a2)
    acc1 = np.abs(2.0 * a2 + 6.0 * a3 * d)
    return np.maximum(acc0, acc1).max(axis=1)


def energy_from_terms(a2, a3, dt):
    """Exact integral of a(t)^2 over [0, dt], summed over the last axis."""
    return (4.0 * a2 * a2 * dt + 12.0 * a2 * a3 * dt**2 + 12.0 * a3 * a3 * dt**3).sum(axis=-1)


def scale_durations(starts: np.ndarray, ends: np.ndarray, bound: AccelBound) -> np.ndarray:
    """Shortest shared duration per pair with peak acceleration within tol of a_max.

    ``starts`` and ``ends`` are (P, m) arrays. Pairs with identical endpoints
    get duration 0. The duration is found by scanning upward geometrically
    from ``DT_START`` until the peak first drops to a_max or below, then
    bisecting the last bracket.
    """
    starts = np.asarray(starts, dtype=float)
    ends = np.asarray(ends, dtype=float)
    if starts.shape != ends.shape or starts.ndim != 2:
        raise InvalidArgument("start and end stacks must share shape (P, m)")
    h = starts.shape[1] // 2
    x0, v0, x1, v1 = starts[:, :h], starts[:, h:], ends[:, :h], ends[:, h:]
    a_max = bound.a_max
    lo_ok = (1.0 - bound.tol) * a_max
    hi_ok = (1.0 + bound.tol) * a_max

    out = np.zeros(starts.shape[0])
    moving = np.flatnonzero(np.any(starts != ends, axis=1))
    if moving.size == 0:
        return out

    # geometric scan; lo = 0 stands for the unbounded peak as dt -> 0
    idx = moving
    lo = np.zeros(idx.size)
    hi = np.full(idx.size, DT_START)
    pending = np.ones(idx.size, dtype=bool)
    peak_hi = np.empty(idx.size)
    while pending.any():
        sel = np.flatnonzero(pending)
        if hi[sel[0]] > DT_CEILING:
            raise UnattainableConstraint(
                f"peak acceleration never reaches a_max={a_max} below dt={DT_CEILING:g}"
            )
        j = idx[sel]
        pk = peak_accel(x0[j], v0[j], x1[j], v1[j], hi[sel])
        over = pk > a_max
        peak_hi[sel] = pk
        lo[sel[over]] = hi[sel[over]]
        hi[sel[over]] = hi[sel[over]] * DT_GROWTH
        pending[sel[~over]] = False

    result = hi.copy()
    active = np.flatnonzero(peak_hi < lo_ok)
    for _ in range(MAX_BISECTIONS):
        if active.size == 0:
            break
        j = idx[active]
        mid = 0.5 * (lo[active] + hi[active])
        pk = peak_accel(x0[j], v0[j], x1[j], v1[j], mid)
        ok = (pk >= lo_ok) & (pk <= hi_ok)
        result[active[ok]] = mid[ok]
        over = pk > a_max
        lo[active[over & ~ok]] = mid[over & ~ok]
        under = ~over & ~ok
        hi[active[under]] = mid[under]
        result[active[under]] = mid[under]
        active = active[~ok]
    out[idx] = result
    return out


def pair_costs(starts: np.ndarray, ends: np.ndarray, bound: AccelBound):
    """(durations, energies) of the acceleration-bounded trajectory for each pair."""
    starts = np.asarray(starts, dtype=float)
    ends = np.asarray(ends, dtype=float)
    dt = scale_durations(starts, ends, bound)
    h = starts.shape[1] // 2
    energy = np.zeros_like(dt)
    moving = dt > 0
    if moving.any():
        d = dt[moving][:, None]
        a2, a3 = cubic_terms(starts[moving, :h], starts[moving, h:], ends[moving, :h], ends[moving, h:], d)
        energy[moving] = energy_from_terms(a2, a3, d)
    return dt, energy


def solve_coeffs(p_i, p_j, dt: float) -> CubicTraj:
    ci, x0, v0 = _split(p_i)
    cj, x1, v1 = _split(p_j)
    if ci.shape != cj.shape:
        raise InvalidArgument(f"dimension mismatch: {ci.shape[0]} vs {cj.shape[0]}")
    if not dt > 0:
        raise InvalidArgument(f"dt must be positive, got {dt}")
    a2, a3 = cubic_terms(x0, v0, x1, v1, float(dt))
    coeffs = np.column_stack([x0, v0, a2, a3])
    return CubicTraj(coeffs, float(dt), ci, cj)


def _stationary(p):
    c, x, v = _split(p)
    coeffs = np.column_stack([x, v, np.zeros_like(x), np.zeros_like(x)])
    return CubicTraj(coeffs, 0.0, c, c.copy())


def scale_duration(p_i, p_j, bound: AccelBound = AccelBound()) -> CubicTraj:
    ci = as_coords(p_i)
    cj = as_coords(p_j)
    if ci.shape != cj.shape:
        raise InvalidArgument(f"dimension mismatch: {ci.shape[0]} vs {cj.shape[0]}")
    if np.array_equal(ci, cj):
        return _stationary(ci)
    dt = scale_durations(ci[None, :], cj[None, :], bound)[0]
    return solve_coeffs(ci, cj, dt)


def evaluate(traj: CubicTraj, t):
    """Positions, velocities and accelerations per axis at time ``t``."""
    if not 0.0 <= t <= traj.dt:
        raise InvalidArgument(f"t={t} outside [0, {traj.dt}]")
    a0, a1, a2, a3 = traj.coeffs.T
    x = a0 + a1 * t + a2 * t**2 + a3 * t**3
    v = a1 + 2.0 * a2 * t + 3.0 * a3 * t**2
    a = 2.0 * a2 + 6.0 * a3 * t
    return x, v, a


def sample(traj: CubicTraj, count: int):
    """Uniform samples on [0, dt]: ``(t, x, v, a)`` with x, v, a shaped (count, axes)."""
    if count < 2:
        raise InvalidArgument("need at least 2 samples")
    t = np.linspace(0.0, traj.dt, count)
    a0, a1, a2, a3 = (c[None, :] for c in traj.coeffs.T)
    tt = t[:, None]
    x = a0 + a1 * tt + a2 * tt**2 + a3 * tt**3
    v = a1 + 2.0 * a2 * tt + 3.0 * a3 * tt**2
    a = 2.0 * a2 + 6.0 * a3 * tt
    return t, x, v, a


def peak(traj: CubicTraj) -> float:
    if traj.dt == 0:
        return 0.0
    _, _, acc0 = evaluate(traj, 0.0)
    _, _, acc1 = evaluate(traj, traj.dt)
    return float(max(np.abs(acc0).max(), np.abs(acc1).max()))


def energy_cost(traj: CubicTraj) -> float:
    if traj.dt == 0:
        return 0.0
    d = np.array([[traj.dt]])
    return float(energy_from_terms(traj.coeffs[None, :, 2], traj.coeffs[None, :, 3], d)[0])


def time_cost(traj: CubicTraj) -> float:
    return float(traj.dt)
