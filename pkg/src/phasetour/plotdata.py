"""Plot-ready CSV for single trajectories and whole paths."""
from __future__ import annotations

import numpy as np

from .errors import InvalidArgument
from .search import _check_perm
from .store import csv_bytes
from .trajectory import AccelBound, sample, scale_duration


def _axis_header(n_axes, prefixes):
    return [f"{p}_{k}" for p in prefixes for k in range(n_axes)]


def trajectory_rows(p_i, p_j, bound: AccelBound, samples: int):
    traj = scale_duration(p_i, p_j, bound)
    t, x, v, a = sample(traj, samples)
    return traj, np.column_stack([t, x, v, a])


def emit_trajectory_csv(p_i, p_j, bound: AccelBound = AccelBound(), samples: int = 50) -> bytes:
    """Columns t, x_k..., v_k..., a_k... sampled uniformly on [0, dt]."""
    traj, rows = trajectory_rows(p_i, p_j, bound, samples)
    header = ["t"] + _axis_header(traj.n_axes, "xva")
    return csv_bytes(header, rows.tolist())


def emit_path_plot_data(grid, order, bound: AccelBound = AccelBound(), samples: int = 25):
    """Returns ``(segments_csv, sequence_csv)``.

    The segments table concatenates the samples of each branch trajectory,
    tagged by segment index; the sequence table lists the visiting order with
    point coordinates.
    """
    if samples < 2:
        raise InvalidArgument("need at least 2 samples per segment")
    order = _check_perm(order, len(grid))
    pts = grid.points
    h = grid.dim_m // 2
    seg_rows = []
    for k in range(len(order) - 1):
        i, j = int(order[k]), int(order[k + 1])
        _, rows = trajectory_rows(pts[i], pts[j], bound, samples)
        seg_rows.extend([k, i, j, *r] for r in rows.tolist())
    seg_header = ["segment", "from", "to", "t"] + _axis_header(h, "xva")
    seq_header = ["step", "index"] + _axis_header(h, "xv")
    seq_rows = [[s, int(idx), *pts[idx].tolist()] for s, idx in enumerate(order)]
    return csv_bytes(seg_header, seg_rows), csv_bytes(seq_header, seq_rows)
