"""Crocco-type change of variables on concave, increasing segments.

Where f' > 0 and f'' < 0, y = f'^2 is strictly decreasing in t, so f can be
written as v(y).  Then v' = 1/(2 f'') and

    v'' = v v'^2 / sqrt(y) + 2 beta (sqrt(y) - 1) v'^3.

Profiles keep the trajectory's time order: y runs from b^2 downward.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.interpolate import PchipInterpolator

from .errors import DomainError, GridMismatch, NotMonotone
from .monitors import finite_difference
from .ode import ProblemParams, Trajectory

Y_MIN = 1e-6


@dataclass(frozen=True, eq=False)
class CroccoProfile:
    params: ProblemParams
    c: float
    t: np.ndarray
    y: np.ndarray
    v: np.ndarray
    vp: np.ndarray
    dt: float

    def __len__(self) -> int:
        return len(self.y)

    def reconstruct_fpp(self) -> np.ndarray:
        return 1.0 / (2.0 * self.vp)


def to_crocco(traj: Trajectory, y_min: float = 0.0, leading: bool = False) -> CroccoProfile:
    """Map a trajectory to (y, v, v').

    Every sample must have f' > 0 and f'' < 0, else NOT_MONOTONE.  With
    ``leading`` only the longest such prefix is used (it must be nonempty).
    Samples with y < ``y_min`` are dropped from the tail.
    """
    fp, fpp = traj.fp, traj.fpp
    good = (fp > 0) & (fpp < 0)
    if leading:
        bad = np.flatnonzero(~good)
        n = int(bad[0]) if bad.size else len(good)
    else:
        if not good.all():
            i = int(np.flatnonzero(~good)[0])
            raise NotMonotone(
                f"f'={fp[i]!r}, f''={fpp[i]!r} at t={traj.t[i]!r}: y = f'^2 is not strictly decreasing"
            )
        n = len(good)
    if n < 2:
        raise NotMonotone("trajectory has no concave increasing segment starting at t = 0")
    y = fp[:n] ** 2
    keep = int(np.searchsorted(-y, -y_min, side="right")) if y_min > 0 else n
    sl = slice(0, keep)
    return CroccoProfile(
        params=traj.params,
        c=traj.c,
        t=traj.t[sl].copy(),
        y=y[sl],
        v=traj.f[sl].copy(),
        vp=1.0 / (2.0 * fpp[sl]),
        dt=traj.controls.sample_dt,
    )


def crocco_rhs(y, v, vp, beta):
    sy = np.sqrt(y)
    return v * vp ** 2 / sy + 2.0 * beta * (sy - 1.0) * vp ** 3


def crocco_residual(profile: CroccoProfile, params: ProblemParams | None = None,
                    y_min: float = Y_MIN) -> float:
    """Sup of |v''_numeric - rhs| / (1 + |rhs|) over the uniform-grid samples.

    v'' is obtained as (d v'/dt) / (dy/dt) with fourth-order differences in t.
    """
    params = params or profile.params
    if len(profile) and float(np.min(profile.y)) < y_min:
        raise DomainError(f"profile reaches y={float(np.min(profile.y))!r} below y_min={y_min!r}")
    k = np.arange(len(profile))
    uniform = np.abs(profile.t - k * profile.dt) <= 1e-9 * np.maximum(1.0, profile.t)
    n = int(np.argmin(uniform)) if not uniform.all() else len(uniform)
    if n < 5:
        raise DomainError("need at least 5 uniformly spaced samples")
    y, v, vp = profile.y[:n], profile.v[:n], profile.vp[:n]
    vpp = finite_difference(vp, profile.dt) / finite_difference(y, profile.dt)
    rhs = crocco_rhs(y, v, vp, params.beta)
    return float(np.max(np.abs(vpp - rhs) / (1.0 + np.abs(rhs))))


@dataclass(frozen=True)
class OrderingReport:
    w_sign_ok: bool
    W_endpoint: float
    w_max_abs: float
    y_range: tuple[float, float]

    def as_record(self) -> dict:
        return {
            "w_sign_ok": self.w_sign_ok,
            "W_endpoint": self.W_endpoint,
            "w_max_abs": self.w_max_abs,
            "y_range": list(self.y_range),
        }


def _interp(profile: CroccoProfile, values: np.ndarray) -> PchipInterpolator:
    y = profile.y[::-1]
    vals = values[::-1]
    uniq = np.concatenate([[True], np.diff(y) > 0])
    return PchipInterpolator(y[uniq], vals[uniq])


def ordering_check(p1: CroccoProfile, p2: CroccoProfile, n_grid: int = 2001) -> OrderingReport:
    """Compare two profiles of the same problem on a common uniform y grid.

    w = v1 - v2 and W = 1/v1' - 1/v2'.  W at y = b^2 equals 2 (c1 - c2).
    """
    if p1.params != p2.params:
        raise GridMismatch(f"profiles belong to different problems: {p1.params} vs {p2.params}")
    if len(p1) < 2 or len(p2) < 2:
        raise GridMismatch("each profile needs at least two samples")
    top = p1.params.b ** 2
    lo = max(float(p1.y.min()), float(p2.y.min()))
    if not lo < top:
        raise GridMismatch("profiles share no y interval")
    grid = np.linspace(lo, top, n_grid)
    w_prime = _interp(p1, p1.vp)(grid) - _interp(p2, p2.vp)(grid)
    w = _interp(p1, p1.v)(grid) - _interp(p2, p2.v)(grid)
    W_end = 1.0 / p1.vp[0] - 1.0 / p2.vp[0]
    return OrderingReport(bool(np.all(w_prime < 0)), float(W_end), float(np.max(np.abs(w))), (lo, top))
