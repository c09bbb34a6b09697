import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mixconv.errors import IntegratorError, InvalidControls, InvalidParams
from mixconv.ode import (
    DEFAULT_CONTROLS,
    EventKind,
    IntegratorControls,
    ProblemParams,
    ShootState,
    TerminationKind,
    fixed_step_rk4,
    in_limit_one_basin,
    integrate,
    rhs,
)


@pytest.mark.parametrize("state, beta, expected", [
    (ShootState(0, 5, 1, 0), 0.7, (1, 0, 0)),
    (ShootState(0, 2, 0, 0), 1.9, (0, 0, 0)),
    (ShootState(0, 0, 2, -1), 1.0, (2, -1, -2)),
])
def test_rhs_examples(state, beta, expected):
    assert rhs(state, ProblemParams(beta, 1, 1)) == pytest.approx(expected)


@pytest.mark.parametrize("kw", [
    {"beta": 0, "a": 1, "b": 1},
    {"beta": -1, "a": 1, "b": 1},
    {"beta": 1, "a": -1, "b": 1},
    {"beta": 1, "a": 1, "b": -0.5},
    {"beta": math.nan, "a": 1, "b": 1},
    {"beta": 1, "a": 1, "b": 1, "lam": 2},
])
def test_invalid_params(kw):
    with pytest.raises(InvalidParams):
        ProblemParams(**kw)


@pytest.mark.parametrize("kw", [
    {"rtol": 0}, {"rtol": 1e-17}, {"atol": -1}, {"t_max": math.inf},
    {"limit_window": 0}, {"sample_dt": -0.1}, {"max_steps": 0},
])
def test_invalid_controls(kw):
    with pytest.raises(InvalidControls):
        integrate(ProblemParams(1, 0, 2), 0.5, DEFAULT_CONTROLS.replace(**kw))


def test_affine_exact():
    traj = integrate(ProblemParams(0.5, 3, 1), 0.0)
    assert traj.exact and traj.events == ()
    assert traj.termination.kind is TerminationKind.LIMIT and traj.termination.limit == 1
    assert np.max(np.abs(traj.f - 3 - traj.t)) < 1e-9
    assert traj.t[-1] == pytest.approx(50.0)


def test_constant_exact():
    traj = integrate(ProblemParams(1, 1, 0), 0.0)
    assert np.all(traj.f == 1.0) and np.all(traj.fp == 0.0)
    assert str(traj.termination) == "LIMIT(0)"


def test_blowup_below_bound():
    traj = integrate(ProblemParams(1, 0, 2), -10.0, DEFAULT_CONTROLS.replace(rtol=1e-12))
    term = traj.termination
    assert term.kind is TerminationKind.BLOWUP
    assert 0 < term.t_escape < 50
    assert traj.final_state.fp < -1e3 and traj.final_state.fpp < -1e3
    assert traj.events_of(EventKind.FP_ZERO)


def test_convex_concave_shot_events():
    traj = integrate(ProblemParams(1, 0, 2), 0.5)
    kinds = [e.kind for e in traj.events]
    assert EventKind.FPP_ZERO_POS_TO_NEG in kinds
    assert str(traj.termination) == "LIMIT(1)"


def test_events_are_localized():
    traj = integrate(ProblemParams(1, 0, 2), -1.0)
    for ev in traj.events:
        if ev.kind in (EventKind.FP_ONE_DOWN, EventKind.FP_ONE_UP):
            assert abs(ev.state.fp - 1) < 1e-8
        elif ev.kind is EventKind.FP_ZERO:
            assert abs(ev.state.fp) < 1e-8
        else:
            assert abs(ev.state.fpp) < 1e-8
    times = [e.t for e in traj.events]
    assert times == sorted(times)


def test_limit_one_basin_regions():
    assert in_limit_one_basin(2.0, 0.5, 0.1, 0.5)
    assert in_limit_one_basin(2.0, 1.5, -0.1, 0.5)
    assert not in_limit_one_basin(2.0, 1.5, 0.1, 0.5)
    assert not in_limit_one_basin(-1.0, 0.5, 0.1, 0.5)


def test_step_budget_exhausted():
    with pytest.raises(IntegratorError):
        integrate(ProblemParams(1, 0, 2), 0.5, DEFAULT_CONTROLS.replace(max_steps=3))


def test_horizon_without_limit():
    ctl = DEFAULT_CONTROLS.replace(t_max=2.0)
    traj = integrate(ProblemParams(1, 0, 2), -1.0, ctl)
    assert traj.termination.kind is TerminationKind.HORIZON
    assert traj.t[-1] == pytest.approx(2.0)


def test_sample_grid_is_uniform_then_closed():
    traj = integrate(ProblemParams(1, 0, 2), 0.3, DEFAULT_CONTROLS.replace(t_max=3.0, stop_on_limit=False))
    dt = traj.controls.sample_dt
    assert np.allclose(traj.t[:-1], np.arange(len(traj) - 1) * dt, atol=1e-12)
    assert traj.t[-1] == pytest.approx(3.0)


def test_arrays_read_only():
    traj = integrate(ProblemParams(1, 0, 2), 0.3)
    with pytest.raises(ValueError):
        traj.f[0] = 1.0


def test_matches_rk4_reference():
    params, c = ProblemParams(0.7, 1.0, 1.5), -0.4
    ctl = DEFAULT_CONTROLS.replace(t_max=5.0, stop_on_limit=False)
    traj = integrate(params, c, ctl)
    t_ref, y_ref = fixed_step_rk4(params, c, 1e-3, 5.0, every=2)
    n = min(len(t_ref), len(traj) - 1)
    assert np.allclose(traj.t[:n], t_ref[:n])
    assert np.max(np.abs(traj.f[:n] - y_ref[:n, 0])) < 1e-9


draws = st.tuples(
    st.floats(0.2, 2.0), st.floats(0.0, 2.0), st.floats(0.0, 3.0), st.floats(-3.0, 3.0),
)


@settings(max_examples=40, deadline=None)
@given(draws)
def test_event_sign_rules(d):
    beta, a, b, c = d
    traj = integrate(ProblemParams(beta, a, b), c)
    for ev in traj.events:
        fp = ev.state.fp
        if ev.kind is EventKind.FPP_ZERO_NEG_TO_POS:
            assert 0 < fp < 1
        elif ev.kind is EventKind.FPP_ZERO_POS_TO_NEG:
            assert fp < 0 or fp > 1


@settings(max_examples=40, deadline=None)
@given(draws)
def test_no_stationary_events(d):
    beta, a, b, c = d
    traj = integrate(ProblemParams(beta, a, b), c)
    floor = 10 * traj.controls.atol
    for ev in traj.events:
        at_rest = min(abs(ev.state.fp), abs(ev.state.fp - 1)) < floor
        assert not (at_rest and abs(ev.state.fpp) < floor)


@settings(max_examples=40, deadline=None)
@given(draws)
def test_nonnegative_trajectories_stay_bounded(d):
    beta, a, b, c = d
    traj = integrate(ProblemParams(beta, a, b), c)
    if np.all(traj.f >= 0) and np.all(traj.fp >= 0):
        assert traj.termination.kind is not TerminationKind.BLOWUP
        if c <= 0:
            assert traj.fp.max() <= max(b, 1.5) + 1e-6


@settings(max_examples=25, deadline=None)
@given(draws)
def test_terminations_are_consistent(d):
    beta, a, b, c = d
    traj = integrate(ProblemParams(beta, a, b), c)
    term = traj.termination
    if term.kind is TerminationKind.LIMIT:
        assert term.limit in (0, 1)
        if not term.certified:
            assert abs(traj.final_state.fp - term.limit) < traj.controls.limit_eps
    elif term.kind is TerminationKind.BLOWUP:
        assert math.isfinite(term.t_escape)
    assert np.all(np.diff(traj.t) > 0)
