import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import cubic_by_linear_solve, dense_peak, quad_energy, sweep_min_dt
from phasetour import AccelBound, energy_cost, evaluate, scale_duration, solve_coeffs, time_cost
from phasetour.errors import InvalidArgument
from phasetour.trajectory import peak, sample

A2 = AccelBound(2.0, 0.02)
SQRT3 = math.sqrt(3.0)
FWD = (math.sqrt(21.0) - 3.0) / 2.0   # 3|1-dt| = dt^2
BACK = (math.sqrt(21.0) + 3.0) / 2.0  # dt^2 = 3(1+dt)


def residuals(traj):
    h = traj.n_axes
    x0, v0, _ = evaluate(traj, 0.0)
    x1, v1, _ = evaluate(traj, traj.dt)
    return np.concatenate([
        x0 - traj.start[:h], v0 - traj.start[h:], x1 - traj.end[:h], v1 - traj.end[h:]
    ])


def test_unit_step_coefficients():
    t = solve_coeffs((0, 0), (1, 0), 1.0)
    np.testing.assert_allclose(t.coeffs[0], [0, 0, 3, -2], atol=1e-12)


def test_stationary_solution():
    t = solve_coeffs((0.5, 0), (0.5, 0), 2.7)
    np.testing.assert_allclose(t.coeffs[0], [0.5, 0, 0, 0], atol=1e-15)


def test_figure_trajectory_boundary_conditions():
    t = solve_coeffs((-2, -1), (1.5, 1.5), 2.0)
    assert np.abs(residuals(t)).max() < 1e-9
    scaled = scale_duration((-2, -1), (1.5, 1.5), A2)
    assert np.abs(residuals(scaled)).max() < 1e-9


def test_solve_matches_linear_system():
    rng = np.random.default_rng(7)
    for _ in range(50):
        x0, v0, x1, v1 = rng.uniform(-1, 1, 4)
        dt = rng.uniform(0.1, 10)
        t = solve_coeffs((x0, v0), (x1, v1), dt)
        np.testing.assert_allclose(t.coeffs[0], cubic_by_linear_solve(x0, v0, x1, v1, dt), rtol=1e-9, atol=1e-9)


@pytest.mark.parametrize("dt", [0.0, -1.0])
def test_solve_rejects_nonpositive_dt(dt):
    with pytest.raises(InvalidArgument):
        solve_coeffs((0, 0), (1, 0), dt)


def test_solve_rejects_dimension_mismatch():
    with pytest.raises(InvalidArgument):
        solve_coeffs((0, 0), (1, 0, 0, 0), 1.0)


@pytest.mark.parametrize("p_i, p_j, expected", [
    ((0, 0), (1, 0), SQRT3),
    ((0, 1), (0, -1), 1.0),
    ((0, 1), (1, 1), FWD),
    ((1, 1), (0, 1), BACK),
])
def test_scaled_duration_closed_forms(p_i, p_j, expected):
    assert time_cost(scale_duration(p_i, p_j, A2)) == pytest.approx(expected, rel=0.02)
    # the sweep oracle reproduces the hand solution
    assert sweep_min_dt(p_i, p_j, 2.0) == pytest.approx(expected, rel=1e-4)


def test_constant_deceleration_example():
    t = scale_duration((0, 1), (0, -1), A2)
    assert energy_cost(t) == pytest.approx(4.0, rel=0.02)
    _, _, _, a = sample(t, 11)
    np.testing.assert_allclose(a[:, 0], -2.0, rtol=0.02)
    # x(t) = t - t^2 at dt = 1 exactly
    exact = solve_coeffs((0, 1), (0, -1), 1.0)
    x, v, acc = evaluate(exact, 0.5)
    assert (x[0], v[0], acc[0]) == pytest.approx((0.25, 0.0, -2.0), abs=1e-12)


def test_energy_closed_form_at_exact_duration():
    t = solve_coeffs((0, 0), (1, 0), SQRT3)
    assert energy_cost(t) == pytest.approx(4.0 / SQRT3, rel=1e-12)
    assert energy_cost(scale_duration((0, 0), (1, 0), A2)) == pytest.approx(4.0 / SQRT3, rel=0.02)


def test_degenerate_identical_endpoints():
    t = scale_duration((0.3, -0.2), (0.3, -0.2), A2)
    assert t.dt == 0.0
    assert energy_cost(t) == 0.0
    assert time_cost(t) == 0.0


def test_evaluate_at_ends_reports_boundary_acceleration():
    t = scale_duration((0, 0.5, 0.2, -1), (1, -1, 0, 0.3), A2)
    x0, v0, a0 = evaluate(t, 0.0)
    x1, v1, a1 = evaluate(t, t.dt)
    np.testing.assert_allclose(a0, 2 * t.coeffs[:, 2])
    np.testing.assert_allclose(a1, 2 * t.coeffs[:, 2] + 6 * t.coeffs[:, 3] * t.dt)
    with pytest.raises(InvalidArgument):
        evaluate(t, t.dt * 1.01)


def test_bound_validation():
    with pytest.raises(InvalidArgument):
        AccelBound(0.0)
    with pytest.raises(InvalidArgument):
        AccelBound(2.0, 1.5)


def test_custom_tolerance_band():
    tight = AccelBound(2.0, 1e-6)
    t = scale_duration((0, 0), (1, 0), tight)
    assert t.dt == pytest.approx(SQRT3, rel=1e-5)


coord = st.floats(-1, 1, allow_nan=False, allow_subnormal=False)


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 3).flatmap(lambda h: st.tuples(st.lists(coord, min_size=2 * h, max_size=2 * h),
                                                     st.lists(coord, min_size=2 * h, max_size=2 * h))),
       st.floats(0.1, 10))
def test_boundary_residuals_property(pair, dt):
    p_i, p_j = pair
    assert np.abs(residuals(solve_coeffs(p_i, p_j, dt))).max() < 1e-9


@settings(max_examples=150, deadline=None)
@given(st.integers(1, 3).flatmap(lambda h: st.tuples(st.lists(coord, min_size=2 * h, max_size=2 * h),
                                                     st.lists(coord, min_size=2 * h, max_size=2 * h))))
def test_scaled_peak_and_energy_property(pair):
    p_i, p_j = pair
    # near-coincident points drive the accelerations into underflow
    if np.max(np.abs(np.subtract(p_i, p_j))) < 1e-12:
        return
    t = scale_duration(p_i, p_j, A2)
    assert 0.98 * 2.0 <= peak(t) <= 1.02 * 2.0
    assert np.abs(residuals(t)).max() < 1e-9
    assert energy_cost(t) == pytest.approx(quad_energy(t.coeffs, t.dt), rel=1e-6, abs=1e-300)


def test_peak_is_at_an_endpoint():
    rng = np.random.default_rng(3)
    for _ in range(100):
        h = rng.integers(1, 4)
        p_i, p_j = rng.uniform(-1, 1, (2, 2 * h))
        dt = rng.uniform(0.1, 10)
        t = solve_coeffs(p_i, p_j, dt)
        assert dense_peak(p_i, p_j, dt) == pytest.approx(
            max(np.abs(evaluate(t, 0)[2]).max(), np.abs(evaluate(t, dt)[2]).max()), rel=1e-9)


def test_shared_duration_binding_axis():
    rng = np.random.default_rng(5)
    for _ in range(100):
        p_i, p_j = rng.uniform(-1, 1, (2, 6))
        t = scale_duration(p_i, p_j, A2)
        a_start = np.abs(evaluate(t, 0)[2])
        a_end = np.abs(evaluate(t, t.dt)[2])
        per_axis = np.maximum(a_start, a_end)
        k = int(np.argmax(per_axis))
        assert per_axis[k] == pytest.approx(peak(t))
        others = np.delete(per_axis, k)
        assert np.all(others < per_axis[k])
