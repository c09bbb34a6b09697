"""Critical shooting values by bracketed bisection.

``c_star`` separates blow-up shots from global ones and carries the unique
solution with f' -> 0; ``c_upper`` bounds the set of shots whose solution
keeps the convexity of its start (concave for b >= 1, convex for b < 1).
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

from .classify import (
    RegimeLabel,
    classify,
    predicate_fp_above_one,
    predicate_fp_below_one,
    predicate_fp_hits_zero,
)
from .errors import BracketFailure, MixconvError, PreconditionError
from .ode import (
    DEFAULT_CONTROLS,
    IntegratorControls,
    ProblemParams,
    TerminationKind,
    Trajectory,
    integrate,
)

# Near-critical shots are sensitive: tighter tolerances, and a limit test
# strict enough that slow separation from the critical shot is still seen.
SHOOTING_CONTROLS = IntegratorControls(rtol=1e-12, atol=1e-14, limit_eps=1e-9, sample_dt=0.05)
MAX_RETRIES = 3


@dataclass(frozen=True)
class CriticalValue:
    which: str
    value: float
    bracket_lo: float
    bracket_hi: float
    tol: float
    iterations: int
    predicate: str

    def as_record(self) -> dict:
        return {
            "which": self.which,
            "value": self.value,
            "bracket": [self.bracket_lo, self.bracket_hi],
            "tol": self.tol,
            "iterations": self.iterations,
            "predicate": self.predicate,
        }


def lower_bound_c_star(params: ProblemParams) -> float:
    """Lower bound for every shot whose f' stays positive.

    Any such c satisfies c >= -a b - sqrt((2b + a^2)(beta + d) d) with
    d = max(b, 3/2).
    """
    a, b, beta = params.a, params.b, params.beta
    d = max(b, 1.5)
    return -a * b - math.sqrt((2.0 * b + a * a) * (beta + d) * d)


def _decided(traj: Trajectory, predicate: Callable[[Trajectory], bool]) -> bool | None:
    if predicate(traj):
        return True
    if traj.termination.kind is TerminationKind.HORIZON:
        return None
    return False


def _evaluate(params: ProblemParams, c: float, controls: IntegratorControls,
              predicate: Callable[[Trajectory], bool]) -> bool:
    ctl = controls
    for _ in range(MAX_RETRIES + 1):
        verdict = _decided(integrate(params, c, ctl), predicate)
        if verdict is not None:
            return verdict
        ctl = ctl.replace(t_max=2.0 * ctl.t_max)
    raise BracketFailure(
        f"shot c={c!r} still undecided at t_max={ctl.t_max / 2!r} after {MAX_RETRIES} retries"
    )


def _bisect(on_low_side: Callable[[float], bool], lo: float, hi: float, tol: float):
    if not on_low_side(lo):
        raise BracketFailure(f"lower bracket end c={lo!r} is not on the low side")
    if on_low_side(hi):
        raise BracketFailure(f"upper bracket end c={hi!r} is on the low side")
    iterations = 0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if not lo < mid < hi:
            break
        if on_low_side(mid):
            lo = mid
        else:
            hi = mid
        iterations += 1
    return lo, hi, iterations


def _check_tol(tol: float) -> None:
    if not (tol > 0 and math.isfinite(tol)):
        raise PreconditionError(f"tol must be positive, got {tol!r}")


def find_c_star(params: ProblemParams, controls: IntegratorControls = SHOOTING_CONTROLS,
                tol: float = 1e-10) -> CriticalValue:
    """Boundary of the blow-up set: shots below it make f' vanish."""
    _check_tol(tol)
    beta, b = params.beta, params.b
    if b <= 0:
        raise PreconditionError("c_star needs b > 0 (for b = 0 every c < 0 blows up)")
    if beta > 1 and b > beta / (beta - 1):
        raise PreconditionError(
            f"no existence guarantee for beta={beta!r} > 1 with b={b!r} > beta/(beta-1)"
        )
    lo = lower_bound_c_star(params) - 1.0
    hi = 0.0
    lo, hi, it = _bisect(lambda c: _evaluate(params, c, controls, predicate_fp_hits_zero),
                         lo, hi, tol)
    return CriticalValue("C_STAR", hi, lo, hi, tol, it, "predicate_fp_hits_zero")


def find_c_upper(params: ProblemParams, controls: IntegratorControls = SHOOTING_CONTROLS,
                 tol: float = 1e-10) -> CriticalValue:
    """Boundary of the shots keeping their initial convexity (b >= 1: concave)."""
    _check_tol(tol)
    beta, a, b = params.beta, params.a, params.b
    if not 0 < beta <= 1:
        raise PreconditionError(f"c_upper is only characterized for beta in (0, 1], got {beta!r}")
    if b == 1:
        return CriticalValue("C_UPPER", 0.0, 0.0, 0.0, tol, 0, "exact: b == 1")
    if b > 1:
        c_star = find_c_star(params, controls, tol)
        lo, hi = c_star.value, 0.0 - a * (b - 1.0)
        lo, hi, it = _bisect(lambda c: _evaluate(params, c, controls, predicate_fp_below_one),
                             lo, hi, tol)
        return CriticalValue("C_UPPER", hi, lo, hi, tol, it, "predicate_fp_below_one")

    def above(c):
        return _evaluate(params, c, controls, predicate_fp_above_one)

    lo = a * (1.0 - b)
    hi = lo + 1.0
    for _ in range(60):
        if above(hi):
            break
        hi = lo + 2.0 * (hi - lo)
    else:
        raise BracketFailure(f"no shot with f' crossing 1 upward found up to c={hi!r}")
    lo, hi, it = _bisect(lambda c: not above(c), lo, hi, tol)
    return CriticalValue("C_UPPER", lo, lo, hi, tol, it, "predicate_fp_above_one")


def sufficient_condition_limit_one(params: ProblemParams, c: float) -> bool:
    """2ac >= b^2 - (2b - beta) a^2, which forces f' -> 1 for beta in (1, 2], a > 0."""
    beta, a, b = params.beta, params.a, params.b
    if not 1 < beta <= 2:
        raise PreconditionError(f"condition only applies for beta in (1, 2], got {beta!r}")
    if a <= 0:
        raise PreconditionError("condition only applies for a > 0")
    return 2.0 * a * c >= b * b - (2.0 * b - beta) * a * a


@dataclass(frozen=True)
class SweepEntry:
    c: float
    label: RegimeLabel | None
    termination: str | None
    error: str | None = None


def _sweep_one(args) -> SweepEntry:
    params, c, controls = args
    try:
        traj = integrate(params, c, controls)
        return SweepEntry(c, classify(traj), str(traj.termination))
    except MixconvError as exc:
        return SweepEntry(c, None, None, f"{exc.code}: {exc}")


def sweep(params: ProblemParams, c_grid: Sequence[float],
          controls: IntegratorControls = DEFAULT_CONTROLS, jobs: int = 1) -> list[SweepEntry]:
    """Integrate and classify every shot of a sorted grid, preserving order."""
    grid = [float(c) for c in c_grid]
    if any(b < a for a, b in zip(grid, grid[1:])):
        raise ValueError("c_grid must be sorted in increasing order")
    work = [(params, c, controls) for c in grid]
    if jobs > 1 and len(work) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_sweep_one, work))
    return [_sweep_one(w) for w in work]
