import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mixconv.errors import EmptySeries
from mixconv.monitors import (
    Direction,
    MonitorSeries,
    check_monotone,
    derivative_identity,
    eval_H,
    eval_K,
    eval_L,
    finite_difference,
    monitor_series,
    regular_prefix,
)
from mixconv.ode import ProblemParams, ShootState, integrate


def test_pointwise_values():
    s = ShootState(0.0, 2.0, 3.0, -1.0)
    p = ProblemParams(0.5, 2.0, 3.0)
    assert eval_H(s) == pytest.approx(-1 + 2 * 2)
    assert eval_L(s, p) == pytest.approx(3 + 0.5 * 3 * 9)
    assert eval_K(s, p) == pytest.approx(2 * 2 * -1 - 9 + (6 - 0.5) * 4)


def test_series_matches_pointwise():
    traj = integrate(ProblemParams(0.8, 1.0, 1.5), -0.5)
    series = monitor_series(traj, "K")
    i = len(traj) // 3
    assert series.values[i] == pytest.approx(eval_K(traj.state(i), traj.params))


def test_unknown_monitor():
    traj = integrate(ProblemParams(1, 0, 2), 0.5)
    with pytest.raises(ValueError):
        monitor_series(traj, "Q")


def test_monotone_checks():
    t = np.arange(5.0)
    down = MonitorSeries("X", t, np.array([3.0, 2.0, 2.0, 1.0, 0.0]))
    assert check_monotone(down, Direction.NONINCREASING).ok
    assert not check_monotone(down, "NONDECREASING").ok
    bump = MonitorSeries("X", t, np.array([3.0, 2.0, 2.5, 1.0, 0.0]))
    verdict = check_monotone(bump, Direction.NONINCREASING)
    assert verdict.status == "FAIL" and verdict.first_violation == 2
    assert check_monotone(bump, Direction.NONINCREASING, slack=0.6).ok
    assert check_monotone(bump, Direction.NONINCREASING, mask=[1, 1, 0, 1, 1]).ok


def test_empty_series():
    with pytest.raises(EmptySeries):
        check_monotone(MonitorSeries("H", np.array([]), np.array([])), "NONINCREASING")


def test_finite_difference_exact_on_quartics():
    x = np.linspace(0, 1, 41)
    y = 3 * x ** 4 - x ** 3 + 2 * x
    d = finite_difference(y, x[1] - x[0])
    assert np.max(np.abs(d - (12 * x ** 3 - 3 * x ** 2 + 2))) < 1e-9


def test_h_constant_when_beta_is_one():
    traj = integrate(ProblemParams(1.0, 0.5, 2.0), -0.7)
    h = monitor_series(traj, "H").values
    assert np.max(np.abs(h - h[0])) < 1e-8


def test_regular_prefix_stops_before_blowup():
    traj = integrate(ProblemParams(1, 0, 2), -3.0)
    n = regular_prefix(traj)
    assert 0 < n < len(traj)
    assert np.all(np.abs(traj.fp[:n]) <= 4.0)
    assert regular_prefix(integrate(ProblemParams(1, 0, 2), -10.0)) == 0


@settings(max_examples=20, deadline=None)
@given(st.sampled_from([0.3, 1.0, 1.5, 2.0]), st.floats(0, 2), st.floats(0, 3), st.floats(-3, 3))
def test_derivative_identities(beta, a, b, c):
    traj = integrate(ProblemParams(beta, a, b), c)
    for name in ("H", "L", "K"):
        assert derivative_identity(traj, name).sup_error < 1e-5


@settings(max_examples=20, deadline=None)
@given(st.floats(0.2, 2.0), st.floats(0, 2), st.floats(0, 3), st.floats(-3, 3))
def test_l_nonincreasing_where_f_nonnegative(beta, a, b, c):
    traj = integrate(ProblemParams(beta, a, b), c)
    assert check_monotone(monitor_series(traj, "L"), "NONINCREASING", mask=traj.f >= 0).ok
