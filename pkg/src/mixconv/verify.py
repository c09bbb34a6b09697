"""Regime-ladder verification suites.

Each suite samples shots on deterministic grids, classifies them, and
compares against the expected family, shape and limit of every regime.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .classify import Family, Limit, Shape, classify
from .errors import MixconvError
from .ode import DEFAULT_CONTROLS, IntegratorControls, ProblemParams, integrate
from .shooting import (
    find_c_star,
    find_c_upper,
    lower_bound_c_star,
    sufficient_condition_limit_one,
    sweep,
)

PASS, FAIL, SKIP = "PASS", "FAIL", "SKIP"

# Sampled grids include the critical values themselves, where default
# tolerances leave f'' noise large enough to fake sign changes.
VERIFY_CONTROLS = DEFAULT_CONTROLS.replace(rtol=1e-12, atol=1e-14)


@dataclass(frozen=True)
class Case:
    description: str
    params: dict
    status: str
    details: dict = field(default_factory=dict)

    def as_record(self) -> dict:
        return {"description": self.description, "params": self.params,
                "status": self.status, "details": self.details}


@dataclass(frozen=True)
class VerifyReport:
    suite: str
    params: dict
    cases: tuple[Case, ...]

    @property
    def exit_code(self) -> int:
        return 5 if any(c.status == FAIL for c in self.cases) else 0

    @property
    def passed(self) -> bool:
        return self.exit_code == 0

    def as_record(self) -> dict:
        return {"suite": self.suite, "params": self.params,
                "cases": [c.as_record() for c in self.cases], "exit_code": self.exit_code}


def _case(desc, params, ok, invariant, **numbers) -> Case:
    details = dict(numbers)
    if not ok:
        details["invariant"] = invariant
    return Case(desc, params.as_dict(), PASS if ok else FAIL, details)


def _skip(desc, params, reason) -> Case:
    return Case(desc, params.as_dict(), SKIP, {"reason": reason})


def _region(params, desc, grid, family, shape, limit, controls, jobs, invariant) -> Case:
    entries = sweep(params, grid, controls, jobs)
    bad = []
    for e in entries:
        if e.label is None:
            bad.append({"c": e.c, "error": e.error})
        elif (e.label.family, e.label.shape, e.label.limit) != (family, shape, limit):
            bad.append({"c": e.c, "label": str(e.label), "termination": e.termination})
    unresolved = sum(1 for e in entries if e.label is not None and e.label.family is Family.UNRESOLVED)
    return _case(desc, params, not bad, invariant, n=len(entries), unresolved=unresolved,
                 expected=f"{family.value}/{shape.value}/{limit.value}", offending=bad)


def _interior(lo, hi, n):
    return [lo + (hi - lo) * k / (n + 1) for k in range(1, n + 1)]


def _critical_case(desc, params, fn):
    try:
        return fn(), None
    except MixconvError as exc:
        return None, Case(desc, params.as_dict(), FAIL,
                          {"invariant": exc.code, "error": str(exc)})


def suite_theorem4(params: ProblemParams, controls: IntegratorControls = VERIFY_CONTROLS,
                   jobs: int = 1) -> VerifyReport:
    """beta in (0, 1], b > 1: blow-up / concave-convex / concave / convex-concave ladder."""
    beta, a, b = params.beta, params.a, params.b
    name = "theorem4"
    if not (0 < beta <= 1 and b > 1):
        return VerifyReport(name, params.as_dict(),
                            (_skip("regime ladder", params, "needs beta in (0, 1] and b > 1"),))
    cases = []
    cs, err = _critical_case("critical values", params, lambda: find_c_star(params))
    if err:
        return VerifyReport(name, params.as_dict(), (err,))
    cu, err = _critical_case("critical values", params, lambda: find_c_upper(params))
    if err:
        return VerifyReport(name, params.as_dict(), (err,))
    c_star, c_up = cs.value, cu.value
    bound = lower_bound_c_star(params)
    cases.append(_case(
        "critical values ordered: lower bound <= c_star < c_upper <= -a(b-1) <= 0", params,
        bound <= c_star < c_up <= -a * (b - 1) + 1e-12 and -a * (b - 1) <= 0,
        "ORDERING", c_star=c_star, c_upper=c_up, lower_bound=bound,
    ))
    traj = integrate(params, c_star, controls)
    label = classify(traj)
    fmax = float(np.max(traj.f))
    cap = math.sqrt(a * a + 2 * b) + 1e-6
    cases.append(_case(
        "c_star shot is concave, bounded, with f' -> 0", params,
        label.shape is Shape.CONCAVE and label.limit is Limit.ZERO and fmax <= cap,
        "CSTAR_SHOT", c=c_star, label=str(label), max_f=fmax, bound=cap,
    ))
    below = [c_star - 2.0 + 2.0 * k / 8 for k in range(8)]
    cases.append(_region(params, "c < c_star blows up after f' vanishes", below,
                         Family.C22, Shape.CONCAVE, Limit.BLOWUP, controls, jobs, "REGION_C22"))
    cases.append(_region(params, "c_star < c < c_upper is concave-convex with f' -> 1",
                         _interior(c_star, c_up, 8), Family.C21_TO_1, Shape.CONCAVE_CONVEX,
                         Limit.ONE, controls, jobs, "REGION_C21"))
    cases.append(_region(params, "c_upper <= c <= 0 is concave with f' -> 1",
                         list(np.linspace(c_up, 0.0, 8)), Family.C1, Shape.CONCAVE, Limit.ONE,
                         controls, jobs, "REGION_C1"))
    cases.append(_region(params, "c > 0 is convex-concave with f' -> 1",
                         [2.0 * k / 8 for k in range(1, 9)], Family.C0, Shape.CONVEX_CONCAVE,
                         Limit.ONE, controls, jobs, "REGION_C0"))
    span = -(c_star - 1.0)
    grid = [c_star - 1.0 + span * (k + 0.5) / 10 for k in range(10)]
    entries = sweep(params, grid, controls, jobs)
    zero = [e.c for e in entries if e.label is not None and e.label.limit is Limit.ZERO]
    cases.append(_case("no other shot has f' -> 0", params, not zero, "UNIQUE_ZERO_LIMIT",
                       n=len(grid), offending=zero))
    return VerifyReport(name, params.as_dict(), tuple(cases))


def _b_zero_cases(params: ProblemParams, controls, jobs) -> list[Case]:
    p0 = ProblemParams(params.beta, params.a, 0.0)
    cases = [_region(p0, "b = 0: c < 0 blows up", [-2.0, -1.5, -1.0, -0.5],
                     Family.C0P2, Shape.CONCAVE, Limit.BLOWUP, controls, jobs, "B0_NEGATIVE")]
    label = classify(integrate(p0, 0.0, controls))
    cases.append(_case("b = 0: c = 0 is the constant solution", p0,
                       label.shape is Shape.CONSTANT and label.limit is Limit.ZERO,
                       "B0_CONSTANT", label=str(label)))
    cu, err = _critical_case("b = 0: split point", p0, lambda: find_c_upper(p0))
    if err:
        return cases + [err]
    cases.append(_case("b = 0: split point is at least a", p0, cu.value >= p0.a,
                       "B0_SPLIT", c_upper=cu.value, a=p0.a))
    cases.append(_region(p0, "b = 0: 0 < c <= split is convex", _interior(0.0, cu.value, 4)
                         + [cu.value], Family.C1P, Shape.CONVEX, Limit.ONE, controls, jobs,
                         "B0_CONVEX"))
    cases.append(_region(p0, "b = 0: c > split is convex-concave",
                         [cu.value + 0.5 * k for k in range(1, 5)], Family.C2P,
                         Shape.CONVEX_CONCAVE, Limit.ONE, controls, jobs, "B0_CONVEX_CONCAVE"))
    return cases


def suite_theorem5(params: ProblemParams, controls: IntegratorControls = VERIFY_CONTROLS,
                   jobs: int = 1) -> VerifyReport:
    """beta in (0, 1], 0 < b < 1, plus the b = 0 special cases for the same beta and a."""
    beta, a, b = params.beta, params.a, params.b
    name = "theorem5"
    if not (0 < beta <= 1 and 0 < b < 1):
        return VerifyReport(name, params.as_dict(),
                            (_skip("regime ladder", params, "needs beta in (0, 1] and 0 < b < 1"),))
    cs, err = _critical_case("critical values", params, lambda: find_c_star(params))
    if err:
        return VerifyReport(name, params.as_dict(), (err,))
    cu, err = _critical_case("critical values", params, lambda: find_c_upper(params))
    if err:
        return VerifyReport(name, params.as_dict(), (err,))
    c_star, c_up = cs.value, cu.value
    cases = [_case("critical values ordered: c_star < 0 <= a(1-b) <= c_upper", params,
                   c_star < 0 <= a * (1 - b) <= c_up, "ORDERING", c_star=c_star, c_upper=c_up)]
    cases.append(_region(params, "c < c_star blows up after f' vanishes",
                         [c_star - 2.0 + 2.0 * k / 8 for k in range(8)], Family.C0P2,
                         Shape.CONCAVE, Limit.BLOWUP, controls, jobs, "REGION_C0P2"))
    label = classify(integrate(params, c_star, controls))
    cases.append(_case("c_star shot is concave with f' -> 0", params,
                       label.shape is Shape.CONCAVE and label.limit is Limit.ZERO,
                       "CSTAR_SHOT", c=c_star, label=str(label)))
    cases.append(_region(params, "c_star < c < 0 is concave-convex with f' -> 1",
                         _interior(c_star, 0.0, 8), Family.C0P1, Shape.CONCAVE_CONVEX, Limit.ONE,
                         controls, jobs, "REGION_C0P1"))
    cases.append(_region(params, "0 <= c <= c_upper is convex with f' -> 1",
                         list(np.linspace(0.0, c_up, 8)), Family.C1P, Shape.CONVEX, Limit.ONE,
                         controls, jobs, "REGION_C1P"))
    cases.append(_region(params, "c > c_upper is convex-concave with f' -> 1",
                         [c_up + 0.25 * k for k in range(1, 9)], Family.C2P, Shape.CONVEX_CONCAVE,
                         Limit.ONE, controls, jobs, "REGION_C2P"))
    cases.extend(_b_zero_cases(params, controls, jobs))
    return VerifyReport(name, params.as_dict(), tuple(cases))


def suite_beta_gt_1(params: ProblemParams, controls: IntegratorControls = VERIFY_CONTROLS,
                    jobs: int = 1) -> VerifyReport:
    """Partial results for beta > 1; checks that do not apply are reported as SKIP."""
    beta, a, b = params.beta, params.a, params.b
    name = "beta-gt-1"
    if beta <= 1:
        return VerifyReport(name, params.as_dict(), (_skip("beta > 1 checks", params, "needs beta > 1"),))
    cases = []

    desc = "shots meeting 2ac >= b^2 - (2b - beta) a^2 reach f' -> 1"
    if beta <= 2 and a > 0:
        c_min = (b * b - (2 * b - beta) * a * a) / (2 * a)
        grid = [c_min + 0.5 * k for k in range(1, 6)]
        entries = sweep(params, grid, controls, jobs)
        bad = [{"c": e.c, "termination": e.termination, "error": e.error} for e in entries
               if not sufficient_condition_limit_one(params, e.c)
               or e.label is None or e.label.limit is not Limit.ONE]
        cases.append(_case(desc, params, not bad, "SUFFICIENT_LIMIT_ONE", c_min=c_min, offending=bad))
    else:
        cases.append(_skip(desc, params, "needs beta in (1, 2] and a > 0"))

    desc = "c_star exists and its shot has f' -> 0"
    if 0 < b <= beta / (beta - 1):
        cs, err = _critical_case(desc, params, lambda: find_c_star(params))
        if err:
            cases.append(err)
        else:
            traj = integrate(params, cs.value, controls)
            label = classify(traj)
            cases.append(_case(desc, params, label.limit is Limit.ZERO, "CSTAR_LIMIT_ZERO",
                               c_star=cs.value, label=str(label)))
    else:
        cases.append(_skip(desc, params, "needs 0 < b <= beta/(beta-1)"))

    desc = "with a = 0 no shot c <= 0 stays concave with f' -> 1"
    if a == 0 and b >= 1:
        grid = list(np.linspace(lower_bound_c_star(params) - 1.0, 0.0, 15))
        entries = sweep(params, grid, controls, jobs)
        bad = [e.c for e in entries if e.label is not None and e.label.family is Family.C1]
        cases.append(_case(desc, params, not bad, "C1_EMPTY", n=len(grid), offending=bad))
    else:
        cases.append(_skip(desc, params, "needs a = 0 and b >= 1"))
    return VerifyReport(name, params.as_dict(), tuple(cases))


SUITES = {
    "theorem4": suite_theorem4,
    "theorem5": suite_theorem5,
    "beta-gt-1": suite_beta_gt_1,
}


def run_suite(name: str, params: ProblemParams, controls: IntegratorControls = VERIFY_CONTROLS,
              jobs: int = 1) -> VerifyReport:
    try:
        suite = SUITES[name]
    except KeyError:
        raise ValueError(f"unknown suite {name!r}; choose from {sorted(SUITES)}") from None
    return suite(params, controls, jobs)
