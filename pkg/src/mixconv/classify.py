"""Regime labels for shooting trajectories.

Labels are read off the event log and the termination verdict only; no
trajectory is ever re-integrated here.  For b >= 1 the families are
C0 (c > 0), C1 (concave, f' -> 1 from above), C21 (f' crosses 1, stays
positive; limit 0 or 1) and C22 (f' reaches 0, then blow-up).  For b < 1
the primed families C0P1/C0P2 (c < 0) and C1P/C2P (c >= 0) play the
same roles.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .errors import ParamMismatch, WrongBranch
from .ode import EventKind, TerminationKind, Trajectory


class Family(str, Enum):
    C0 = "C0"
    C1 = "C1"
    C21_TO_0 = "C21_TO_0"
    C21_TO_1 = "C21_TO_1"
    C22 = "C22"
    C0P1 = "C0P1"
    C0P2 = "C0P2"
    C1P = "C1P"
    C2P = "C2P"
    UNRESOLVED = "UNRESOLVED"


class Shape(str, Enum):
    CONCAVE = "CONCAVE"
    CONVEX = "CONVEX"
    CONCAVE_CONVEX = "CONCAVE_CONVEX"
    CONVEX_CONCAVE = "CONVEX_CONCAVE"
    AFFINE = "AFFINE"
    CONSTANT = "CONSTANT"
    NONE = "NONE"


class Limit(str, Enum):
    ZERO = "ZERO"
    ONE = "ONE"
    BLOWUP = "BLOWUP"
    UNKNOWN = "UNKNOWN"


@dataclass(frozen=True)
class RegimeLabel:
    family: Family
    shape: Shape
    limit: Limit

    def __str__(self) -> str:
        return f"{self.family.value}/{self.shape.value}/{self.limit.value}"


_FPP_KINDS = (EventKind.FPP_ZERO_NEG_TO_POS, EventKind.FPP_ZERO_POS_TO_NEG)


def predicate_fp_hits_zero(traj: Trajectory) -> bool:
    """True iff f' reaches zero: an FP_ZERO event, or blow-up with f' < 0."""
    if traj.events_of(EventKind.FP_ZERO):
        return True
    return traj.termination.kind is TerminationKind.BLOWUP and traj.final_state.fp < 0


def predicate_fp_below_one(traj: Trajectory) -> bool:
    """True iff f' drops below 1 (b >= 1 only)."""
    if traj.params.b < 1:
        raise WrongBranch(f"f' < 1 crossing is defined for b >= 1, got b={traj.params.b!r}")
    return bool(traj.events_of(EventKind.FP_ONE_DOWN))


def predicate_fp_above_one(traj: Trajectory) -> bool:
    """True iff f' rises above 1 (b < 1 only)."""
    if traj.params.b >= 1:
        raise WrongBranch(f"f' > 1 crossing is defined for b < 1, got b={traj.params.b!r}")
    return bool(traj.events_of(EventKind.FP_ONE_UP))


def limit_of(traj: Trajectory) -> Limit:
    term = traj.termination
    if term.kind is TerminationKind.BLOWUP:
        return Limit.BLOWUP
    if term.kind is TerminationKind.LIMIT:
        return Limit.ONE if term.limit == 1 else Limit.ZERO
    return Limit.UNKNOWN


def _initial_curvature_sign(traj: Trajectory) -> int:
    c = traj.c
    if c != 0:
        return 1 if c > 0 else -1
    b, beta = traj.params.b, traj.params.beta
    # f'''(0) = -beta b (b - 1) decides the sign of f'' right after t = 0.
    third = -beta * b * (b - 1.0)
    return 1 if third > 0 else (-1 if third < 0 else 0)


def shape_of(traj: Trajectory) -> Shape:
    if traj.exact:
        return Shape.AFFINE if traj.params.b == 1 else Shape.CONSTANT
    s0 = _initial_curvature_sign(traj)
    flips = traj.events_of(*_FPP_KINDS)
    if not flips:
        return Shape.CONCAVE if s0 < 0 else Shape.CONVEX
    if len(flips) == 1:
        if s0 < 0 and flips[0].kind is EventKind.FPP_ZERO_NEG_TO_POS:
            return Shape.CONCAVE_CONVEX
        if s0 > 0 and flips[0].kind is EventKind.FPP_ZERO_POS_TO_NEG:
            return Shape.CONVEX_CONCAVE
    return Shape.NONE


def _fp_positive(traj: Trajectory) -> bool:
    return not predicate_fp_hits_zero(traj) and bool((traj.fp > 0).all())


def classify(traj: Trajectory, branch: str | None = None) -> RegimeLabel:
    """Label a trajectory with its shooting family, shape and limit.

    ``branch`` ("b>=1" or "b<1") optionally asserts which family system the
    caller expects; a disagreement with the trajectory's b raises
    PARAM_MISMATCH.
    """
    b = traj.params.b
    natural = "b>=1" if b >= 1 else "b<1"
    if branch is not None:
        if branch not in ("b>=1", "b<1"):
            raise ValueError(f"branch must be 'b>=1' or 'b<1', got {branch!r}")
        if branch != natural:
            raise ParamMismatch(f"trajectory has b={b!r}, which belongs to branch {natural}")

    limit = limit_of(traj)
    shape = shape_of(traj)
    c = traj.c
    flips = traj.events_of(*_FPP_KINDS)
    first_flip = flips[0].state.fp if flips else None
    hits_zero = predicate_fp_hits_zero(traj)
    down = traj.events_of(EventKind.FP_ONE_DOWN)
    up = traj.events_of(EventKind.FP_ONE_UP)
    family = Family.UNRESOLVED

    if natural == "b>=1":
        if c > 0:
            if shape is Shape.CONVEX_CONCAVE and limit is Limit.ONE:
                family = Family.C0
        elif hits_zero and limit is Limit.BLOWUP:
            family = Family.C22
        elif limit is Limit.ONE and not flips and not down:
            family = Family.C1
        elif (limit is Limit.ONE and down and shape is Shape.CONCAVE_CONVEX
              and 0 < first_flip < 1 and down[0].t <= flips[0].t):
            family = Family.C21_TO_1
        elif limit is Limit.ZERO and shape is Shape.CONCAVE and _fp_positive(traj):
            family = Family.C21_TO_0
    else:
        if c < 0:
            if hits_zero and limit is Limit.BLOWUP:
                family = Family.C0P2
            elif limit is Limit.ONE and shape is Shape.CONCAVE_CONVEX and 0 < first_flip < 1:
                family = Family.C0P1
            elif limit is Limit.ZERO and shape is Shape.CONCAVE and _fp_positive(traj):
                family = Family.C0P1
        elif traj.exact:
            family = Family.C1P
        elif limit is Limit.ONE and shape is Shape.CONVEX and not flips and not up:
            family = Family.C1P
        elif limit is Limit.ONE and up and shape is Shape.CONVEX_CONCAVE and first_flip > 1:
            family = Family.C2P
    return RegimeLabel(family, shape, limit)


def classification_record(traj: Trajectory, label: RegimeLabel | None = None) -> dict:
    """JSON-ready classification record."""
    label = label or classify(traj)
    return {
        "family": label.family.value,
        "shape": label.shape.value,
        "limit": label.limit.value,
        "events": [{"kind": e.kind.value, "t": e.t} for e in traj.events],
        "termination": str(traj.termination),
    }
