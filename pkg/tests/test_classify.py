import pytest
from hypothesis import given, settings, strategies as st

from mixconv.classify import (
    Family,
    Limit,
    Shape,
    classification_record,
    classify,
    predicate_fp_above_one,
    predicate_fp_below_one,
    predicate_fp_hits_zero,
)
from mixconv.errors import ParamMismatch, WrongBranch
from mixconv.ode import DEFAULT_CONTROLS, ProblemParams, integrate


@pytest.mark.parametrize("params, c, family, shape, limit", [
    (ProblemParams(1, 0, 2), 0.5, Family.C0, Shape.CONVEX_CONCAVE, Limit.ONE),
    (ProblemParams(1, 2, 3), -4.0, Family.C1, Shape.CONCAVE, Limit.ONE),
    (ProblemParams(0.5, 3, 1), 0.0, Family.C1, Shape.AFFINE, Limit.ONE),
    (ProblemParams(1, 0, 2), -1.0, Family.C21_TO_1, Shape.CONCAVE_CONVEX, Limit.ONE),
    (ProblemParams(1, 0, 2), -3.0, Family.C22, Shape.CONCAVE, Limit.BLOWUP),
    (ProblemParams(1, 1, 0), 0.0, Family.C1P, Shape.CONSTANT, Limit.ZERO),
    (ProblemParams(0.5, 1, 0.5), -2.0, Family.C0P2, Shape.CONCAVE, Limit.BLOWUP),
    (ProblemParams(0.5, 1, 0.5), -0.3, Family.C0P1, Shape.CONCAVE_CONVEX, Limit.ONE),
    (ProblemParams(0.5, 1, 0.5), 0.3, Family.C1P, Shape.CONVEX, Limit.ONE),
    (ProblemParams(0.5, 1, 0.5), 2.0, Family.C2P, Shape.CONVEX_CONCAVE, Limit.ONE),
])
def test_examples(params, c, family, shape, limit):
    label = classify(integrate(params, c))
    assert (label.family, label.shape, label.limit) == (family, shape, limit)


def test_c_star_shot_is_concave_limit_zero(c_star_traj):
    label = classify(c_star_traj)
    assert label.family is Family.C21_TO_0
    assert label.shape is Shape.CONCAVE and label.limit is Limit.ZERO


def test_horizon_is_unresolved():
    traj = integrate(ProblemParams(1, 0, 2), -1.0, DEFAULT_CONTROLS.replace(t_max=1.0))
    label = classify(traj)
    assert label.family is Family.UNRESOLVED and label.limit is Limit.UNKNOWN


def test_branch_mismatch():
    traj = integrate(ProblemParams(1, 0, 2), 0.5)
    assert classify(traj, branch="b>=1").family is Family.C0
    with pytest.raises(ParamMismatch):
        classify(traj, branch="b<1")


def test_predicates():
    blow = integrate(ProblemParams(1, 0, 2), -3.0)
    ok = integrate(ProblemParams(1, 0, 2), -1.0)
    assert predicate_fp_hits_zero(blow) and not predicate_fp_hits_zero(ok)
    assert predicate_fp_below_one(ok)
    assert not predicate_fp_below_one(integrate(ProblemParams(1, 0, 2), 0.0))
    with pytest.raises(WrongBranch):
        predicate_fp_below_one(integrate(ProblemParams(1, 1, 0.5), 0.1))
    with pytest.raises(WrongBranch):
        predicate_fp_above_one(ok)


def test_record_keys():
    rec = classification_record(integrate(ProblemParams(1, 0, 2), -1.0))
    assert set(rec) == {"family", "shape", "limit", "events", "termination"}
    assert rec["termination"] == "LIMIT(1)"
    assert all(set(e) == {"kind", "t"} for e in rec["events"])


PRIMED = {Family.C0P1, Family.C0P2, Family.C1P, Family.C2P}
UNPRIMED = {Family.C0, Family.C1, Family.C21_TO_0, Family.C21_TO_1, Family.C22}


@settings(max_examples=60, deadline=None)
@given(st.floats(0.2, 1.0), st.floats(0, 2), st.floats(0, 3), st.floats(-4, 3))
def test_label_invariants(beta, a, b, c):
    label = classify(integrate(ProblemParams(beta, a, b), c))
    if b < 1:
        assert label.family not in UNPRIMED
    else:
        assert label.family not in PRIMED
    if label.family is Family.C1 and label.shape is not Shape.AFFINE:
        assert label.shape is Shape.CONCAVE and label.limit is Limit.ONE
    if label.family is Family.C22:
        assert label.limit is Limit.BLOWUP
    if label.family is Family.C21_TO_0:
        assert label.shape is Shape.CONCAVE and label.limit is Limit.ZERO
