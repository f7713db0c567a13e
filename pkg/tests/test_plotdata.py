import csv
import io

import numpy as np
import pytest

from phasetour import AccelBound, make_rect_grid, scale_duration
from phasetour.errors import InvalidPermutation
from phasetour.plotdata import emit_path_plot_data, emit_trajectory_csv


def rows(data):
    r = list(csv.reader(io.StringIO(data.decode())))
    return r[0], np.array(r[1:], dtype=float)


def test_trajectory_csv_columns_and_endpoints():
    head, body = rows(emit_trajectory_csv([0, 1], [1, 1], AccelBound(), 21))
    assert head == ["t", "x_0", "v_0", "a_0"]
    assert body.shape == (21, 4)
    dt = scale_duration([0, 1], [1, 1], AccelBound()).dt
    assert body[0, 0] == 0 and body[-1, 0] == pytest.approx(dt)
    assert body[0, 1:3] == pytest.approx([0, 1])
    assert body[-1, 1:3] == pytest.approx([1, 1], abs=1e-9)
    assert np.max(np.abs(body[:, 3])) <= 2.0 * 1.02


def test_path_plot_data():
    g = make_rect_grid(2, 3)
    order = [4, 0, 1, 2, 5, 8, 7, 6, 3]
    seg, seq = emit_path_plot_data(g, order, AccelBound(), 5)
    h, body = rows(seg)
    assert h[:4] == ["segment", "from", "to", "t"]
    assert body.shape == (8 * 5, 7)
    h, body = rows(seq)
    assert h == ["step", "index", "x_0", "v_0"]
    assert body[:, 1].astype(int).tolist() == order
    with pytest.raises(InvalidPermutation):
        emit_path_plot_data(g, [0, 1], AccelBound(), 5)
