import dataclasses

import numpy as np
import pytest

from mixconv.crocco import crocco_residual, ordering_check, to_crocco
from mixconv.errors import DomainError, GridMismatch, NotMonotone
from mixconv.ode import DEFAULT_CONTROLS, ProblemParams, integrate


@pytest.fixture(scope="module")
def profile(c_star_traj):
    return to_crocco(c_star_traj, y_min=4e-6)


def test_endpoint_identities(profile, c_star_ladder):
    assert profile.y[0] == 4.0
    assert profile.v[0] == 0.0
    assert profile.vp[0] == 1.0 / (2.0 * c_star_ladder.value)
    assert np.all(profile.vp < 0)
    assert np.all(np.diff(profile.y) < 0) and profile.y[-1] >= 4e-6


def test_residual_small(profile):
    assert crocco_residual(profile) < 1e-5


def test_residual_does_not_grow_when_tightening(ladder_params, c_star_ladder):
    loose = integrate(ladder_params, c_star_ladder.value, DEFAULT_CONTROLS.replace(rtol=1e-10))
    tight = integrate(ladder_params, c_star_ladder.value,
                      DEFAULT_CONTROLS.replace(rtol=1e-13, atol=1e-15))
    r_loose = crocco_residual(to_crocco(loose, y_min=4e-6))
    r_tight = crocco_residual(to_crocco(tight, y_min=4e-6))
    assert r_tight <= 2.0 * r_loose


def test_corrupted_sample_detected(profile):
    v = profile.v.copy()
    v[len(v) // 2] += 1e-2
    assert crocco_residual(dataclasses.replace(profile, v=v)) > 1e-3


def test_round_trip_curvature(profile, c_star_traj):
    n = len(profile)
    fpp = c_star_traj.fpp[:n]
    assert np.max(np.abs(profile.reconstruct_fpp() - fpp) / np.abs(fpp)) < 1e-6


def test_domain_error(c_star_traj):
    with pytest.raises(DomainError):
        crocco_residual(to_crocco(c_star_traj))


@pytest.mark.parametrize("params, c", [
    (ProblemParams(1, 2, 1), 0.0),
    (ProblemParams(1, 0, 2), 0.5),
    (ProblemParams(1, 0, 2), -1.0),
])
def test_not_monotone(params, c):
    with pytest.raises(NotMonotone):
        to_crocco(integrate(params, c))


def test_leading_segment():
    traj = integrate(ProblemParams(1, 0, 2), -1.0)
    prof = to_crocco(traj, leading=True)
    assert 1 < len(prof) < len(traj)
    assert np.all(traj.fpp[:len(prof)] < 0)


def test_ordering_identical(profile):
    rep = ordering_check(profile, profile)
    assert rep.W_endpoint == 0.0 and rep.w_max_abs == 0.0


def test_ordering_two_shots(ladder_params, c_star_ladder, profile):
    other = to_crocco(integrate(ladder_params, c_star_ladder.value - 0.1), leading=True)
    rep = ordering_check(profile, other)
    assert rep.W_endpoint == pytest.approx(0.2, abs=1e-12)
    assert rep.w_sign_ok
    flipped = ordering_check(other, profile)
    assert flipped.W_endpoint < 0 and not flipped.w_sign_ok


def test_grid_mismatch(profile):
    other = to_crocco(integrate(ProblemParams(0.5, 0, 2), -2.0), leading=True)
    with pytest.raises(GridMismatch):
        ordering_check(profile, other)
