import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from phasetour import PhasePoint, index_to_point, make_random_grid, make_rect_grid
from phasetour.errors import InvalidArgument


def test_rect_2d_n3_has_nine_points_on_minus_one_zero_one():
    g = make_rect_grid(2, 3)
    assert len(g) == 9
    assert sorted(set(g.points.ravel())) == [-1.0, 0.0, 1.0]


def test_rect_6d_n4_has_4096_points():
    assert len(make_rect_grid(6, 4)) == 4096


def test_rect_n2_is_corners():
    g = make_rect_grid(2, 2)
    assert {tuple(p) for p in g.points} == {(-1, -1), (-1, 1), (1, -1), (1, 1)}


@pytest.mark.parametrize("idx, expected", [(0, (-1, -1)), (8, (1, 1)), (4, (0, 0)), (1, (-1, 0)), (3, (0, -1))])
def test_row_major_indexing(idx, expected):
    # last axis varies fastest
    assert index_to_point(make_rect_grid(2, 3), idx).coords == expected


def test_index_out_of_range():
    with pytest.raises(IndexError):
        index_to_point(make_rect_grid(2, 3), 9)


@pytest.mark.parametrize("m, n", [(3, 3), (0, 3), (2, 1)])
def test_rect_rejects_bad_args(m, n):
    with pytest.raises(InvalidArgument):
        make_rect_grid(m, n)


def test_random_grid_rejects_small_count():
    with pytest.raises(InvalidArgument):
        make_random_grid(2, 1, seed=3)


def test_random_grid_seeded_and_bounded():
    a = make_random_grid(2, 9, seed=11)
    assert a == make_random_grid(2, 9, seed=11)
    assert a.id == make_random_grid(2, 9, seed=11).id
    assert a != make_random_grid(2, 9, seed=12)
    big = make_random_grid(6, 729, seed=5)
    assert big.points.size == 4374
    assert np.all(np.abs(big.points) <= 1)


def test_phase_point_halves():
    p = PhasePoint((0.1, 0.2, -0.3, 0.4))
    assert p.positions == (0.1, 0.2)
    assert p.velocities == (-0.3, 0.4)
    with pytest.raises(InvalidArgument):
        PhasePoint((0.0, 1.5))
    with pytest.raises(InvalidArgument):
        PhasePoint((0.0, 0.1, 0.2))


def test_grid_is_read_only():
    g = make_rect_grid(2, 3)
    with pytest.raises(ValueError):
        g.points[0, 0] = 5.0


@settings(max_examples=25, deadline=None)
@given(half=st.integers(1, 3), n=st.integers(2, 4))
def test_rect_properties(half, n):
    m = 2 * half
    g = make_rect_grid(m, n)
    assert len(g) == n**m
    assert np.all(np.abs(g.points) <= 1)
    assert g == make_rect_grid(m, n)
    for i in (0, len(g) // 2, len(g) - 1):
        assert index_to_point(g, i).coords == tuple(g.points[i])


@settings(max_examples=25, deadline=None)
@given(half=st.integers(1, 3), count=st.integers(2, 50), seed=st.integers(0, 2**63 - 1))
def test_random_properties(half, count, seed):
    g = make_random_grid(2 * half, count, seed)
    assert g.points.shape == (count, 2 * half)
    assert np.all(np.abs(g.points) <= 1)
    assert np.array_equal(g.points, make_random_grid(2 * half, count, seed).points)
