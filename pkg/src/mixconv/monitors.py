"""Auxiliary functions H, L, K evaluated along trajectories.

Along any solution

    H = f'' + f (f'-1),                     H' = (1 - beta) f' (f'-1)
    L = 3 f''^2 + beta (2 f' - 3) f'^2,     L' = -6 f f''^2
    K = 2 f f'' - f'^2 + (2 f' - beta) f^2, K' = 2 (2 - beta) f f'^2

so their finite-difference derivatives on a sampled trajectory give an
integrator-independent consistency check.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import EmptySeries
from .ode import ProblemParams, ShootState, Trajectory

MONITOR_NAMES = ("H", "L", "K")


def eval_H(state: ShootState) -> float:
    return state.fpp + state.f * (state.fp - 1.0)


def eval_L(state: ShootState, params: ProblemParams) -> float:
    return 3.0 * state.fpp ** 2 + params.beta * (2.0 * state.fp - 3.0) * state.fp ** 2


def eval_K(state: ShootState, params: ProblemParams) -> float:
    f, fp, fpp = state.f, state.fp, state.fpp
    return 2.0 * f * fpp - fp ** 2 + (2.0 * fp - params.beta) * f ** 2


@dataclass(frozen=True, eq=False)
class MonitorSeries:
    name: str
    t: np.ndarray
    values: np.ndarray

    def __len__(self) -> int:
        return len(self.values)


def _values(name: str, f, fp, fpp, beta):
    if name == "H":
        return fpp + f * (fp - 1.0)
    if name == "L":
        return 3.0 * fpp ** 2 + beta * (2.0 * fp - 3.0) * fp ** 2
    if name == "K":
        return 2.0 * f * fpp - fp ** 2 + (2.0 * fp - beta) * f ** 2
    raise ValueError(f"unknown monitor {name!r}; expected one of {MONITOR_NAMES}")


def _closed_form_derivative(name: str, f, fp, fpp, beta):
    if name == "H":
        return (1.0 - beta) * fp * (fp - 1.0)
    if name == "L":
        return -6.0 * f * fpp ** 2
    if name == "K":
        return 2.0 * (2.0 - beta) * f * fp ** 2
    raise ValueError(f"unknown monitor {name!r}; expected one of {MONITOR_NAMES}")


def monitor_series(traj: Trajectory, name: str) -> MonitorSeries:
    values = _values(name, traj.f, traj.fp, traj.fpp, traj.params.beta)
    return MonitorSeries(name, traj.t, np.asarray(values))


class Direction(str, Enum):
    NONINCREASING = "NONINCREASING"
    NONDECREASING = "NONDECREASING"


@dataclass(frozen=True)
class MonotoneVerdict:
    ok: bool
    first_violation: int | None = None

    def __bool__(self) -> bool:
        return self.ok

    @property
    def status(self) -> str:
        return "PASS" if self.ok else "FAIL"


def check_monotone(series: MonitorSeries, direction: Direction | str,
                   slack: float = 1e-8, mask=None) -> MonotoneVerdict:
    """Check every consecutive pair of ``series`` against ``direction``.

    With ``mask``, only pairs whose two samples are both selected count.
    The reported index is that of the second sample of the offending pair.
    """
    if len(series) == 0:
        raise EmptySeries(f"monitor series {series.name!r} is empty")
    if slack < 0:
        raise ValueError("slack must be nonnegative")
    direction = Direction(direction)
    v = np.asarray(series.values, dtype=float)
    step = np.diff(v)
    if direction is Direction.NONDECREASING:
        step = -step
    bad = step > slack
    if mask is not None:
        m = np.asarray(mask, dtype=bool)
        bad &= m[:-1] & m[1:]
    idx = np.flatnonzero(bad)
    if idx.size:
        return MonotoneVerdict(False, int(idx[0]) + 1)
    return MonotoneVerdict(True)


def finite_difference(values, dt: float) -> np.ndarray:
    """Fourth-order derivative on a uniform grid.

    Five-point centered stencil inside, five-point one-sided stencils on the
    first and last two samples.  Needs at least five samples.
    """
    y = np.asarray(values, dtype=float)
    n = len(y)
    if n < 5:
        raise ValueError("need at least 5 samples for the 4th-order stencil")
    d = np.empty(n)
    d[2:-2] = (y[:-4] - 8.0 * y[1:-3] + 8.0 * y[3:-1] - y[4:]) / (12.0 * dt)
    d[0] = (-25 * y[0] + 48 * y[1] - 36 * y[2] + 16 * y[3] - 3 * y[4]) / (12.0 * dt)
    d[1] = (-3 * y[0] - 10 * y[1] + 18 * y[2] - 6 * y[3] + y[4]) / (12.0 * dt)
    d[-1] = (25 * y[-1] - 48 * y[-2] + 36 * y[-3] - 16 * y[-4] + 3 * y[-5]) / (12.0 * dt)
    d[-2] = (3 * y[-1] + 10 * y[-2] - 18 * y[-3] + 6 * y[-4] - y[-5]) / (12.0 * dt)
    return d


def regular_prefix(traj: Trajectory, cap: float = 4.0) -> int:
    """Number of leading samples on the uniform grid with |f'|, |f''| <= cap.

    Finite differences are meaningless near a finite escape time, so the
    identity checks stop at the first sample where the state grows past
    ``cap`` or where the grid stops being uniform (the closing sample).
    """
    dt = traj.controls.sample_dt
    k = np.arange(len(traj.t))
    uniform = np.abs(traj.t - k * dt) <= 1e-9 * np.maximum(1.0, traj.t)
    tame = (np.abs(traj.fp) <= cap) & (np.abs(traj.fpp) <= cap)
    ok = uniform & tame
    bad = np.flatnonzero(~ok)
    return int(bad[0]) if bad.size else len(traj.t)


@dataclass(frozen=True)
class IdentityCheck:
    name: str
    sup_error: float
    n_samples: int


def derivative_identity(traj: Trajectory, name: str, cap: float = 4.0) -> IdentityCheck:
    """Sup-norm gap between the differenced monitor and its closed-form derivative."""
    n = regular_prefix(traj, cap)
    if n < 5:
        return IdentityCheck(name, 0.0, n)
    f, fp, fpp = traj.f[:n], traj.fp[:n], traj.fpp[:n]
    beta = traj.params.beta
    numeric = finite_difference(_values(name, f, fp, fpp, beta), traj.controls.sample_dt)
    exact = _closed_form_derivative(name, f, fp, fpp, beta)
    return IdentityCheck(name, float(np.max(np.abs(numeric - exact))), n)
