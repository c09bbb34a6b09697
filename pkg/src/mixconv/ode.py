"""Shooting trajectories of f''' + f f'' + beta f'(f'-1) = 0.

The third-order equation is integrated as the first-order system
y = (f, f', f'') from y(0) = (a, b, c) with a Dormand-Prince 5(4) pair,
proportional-integral step control and the pair's native quartic dense
output.  Sign changes of f', f'-1 and f'' are localized on the dense output
and recorded as events; blow-up and convergence of f' are detected on the
fly so that each trajectory ends with a verdict.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import NamedTuple

import numpy as np
from scipy.optimize import brentq

from .errors import IntegratorError, InvalidControls, InvalidParams

__all__ = [
    "ProblemParams",
    "ShootState",
    "IntegratorControls",
    "EventKind",
    "Event",
    "TerminationKind",
    "Termination",
    "Trajectory",
    "rhs",
    "integrate",
    "fixed_step_rk4",
    "in_limit_one_basin",
    "DEFAULT_CONTROLS",
]


@dataclass(frozen=True)
class ProblemParams:
    """Boundary-value problem instance: f(0)=a, f'(0)=b, f'(inf)=lam."""

    beta: float
    a: float
    b: float
    lam: int = 1

    def __post_init__(self):
        for name in ("beta", "a", "b"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise InvalidParams(f"{name} must be finite, got {value!r}")
        if self.beta <= 0:
            raise InvalidParams(f"beta must be positive, got {self.beta!r}")
        if self.a < 0 or self.b < 0:
            raise InvalidParams(f"a and b must be nonnegative, got a={self.a!r}, b={self.b!r}")
        if self.lam not in (0, 1):
            raise InvalidParams(f"lam must be 0 or 1, got {self.lam!r}")

    def as_dict(self) -> dict:
        return {"beta": self.beta, "a": self.a, "b": self.b, "lambda": self.lam}


class ShootState(NamedTuple):
    t: float
    f: float
    fp: float
    fpp: float


@dataclass(frozen=True)
class IntegratorControls:
    """Tolerances, horizon and detection thresholds for :func:`integrate`.

    ``limit_eps``/``limit_window`` drive the dwell test for f' -> lambda.
    ``certify`` additionally accepts f' -> 1 once the state sits inside an
    invariant region from which convergence to 1 is guaranteed (see
    :func:`in_limit_one_basin`); it must also persist for ``limit_window``.
    """

    rtol: float = 1e-10
    atol: float = 1e-12
    t_max: float = 50.0
    blowup_bound: float = 1e8
    h_min: float = 1e-13
    limit_eps: float = 1e-3
    limit_window: float = 5.0
    sample_dt: float = 0.002
    stop_on_limit: bool = True
    certify: bool = True
    max_steps: int = 2_000_000

    def validate(self) -> "IntegratorControls":
        positive = ("rtol", "atol", "t_max", "blowup_bound", "h_min",
                    "limit_eps", "limit_window", "sample_dt")
        for name in positive:
            value = getattr(self, name)
            if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
                raise InvalidControls(f"{name} must be a positive finite number, got {value!r}")
        if self.rtol < 10 * np.finfo(float).eps:
            raise InvalidControls(f"rtol={self.rtol!r} is below 10 * machine epsilon")
        if self.max_steps < 1:
            raise InvalidControls("max_steps must be at least 1")
        return self

    def replace(self, **changes) -> "IntegratorControls":
        from dataclasses import replace

        return replace(self, **changes)


DEFAULT_CONTROLS = IntegratorControls()


class EventKind(str, Enum):
    FP_ZERO = "FP_ZERO"
    FP_ONE_DOWN = "FP_ONE_DOWN"
    FP_ONE_UP = "FP_ONE_UP"
    FPP_ZERO_NEG_TO_POS = "FPP_ZERO_NEG_TO_POS"
    FPP_ZERO_POS_TO_NEG = "FPP_ZERO_POS_TO_NEG"


class Event(NamedTuple):
    kind: EventKind
    t: float
    state: ShootState


class TerminationKind(str, Enum):
    HORIZON = "HORIZON"
    BLOWUP = "BLOWUP"
    LIMIT = "LIMIT"


@dataclass(frozen=True)
class Termination:
    kind: TerminationKind
    t_escape: float | None = None
    limit: int | None = None
    certified: bool = False

    def __str__(self) -> str:
        if self.kind is TerminationKind.LIMIT:
            return f"LIMIT({self.limit})"
        if self.kind is TerminationKind.BLOWUP:
            return f"BLOWUP({self.t_escape!r})"
        return "HORIZON"


@dataclass(frozen=True, eq=False)
class Trajectory:
    params: ProblemParams
    c: float
    t: np.ndarray
    f: np.ndarray
    fp: np.ndarray
    fpp: np.ndarray
    events: tuple[Event, ...]
    termination: Termination
    controls: IntegratorControls = field(default=DEFAULT_CONTROLS)
    n_steps: int = 0
    last_step: float = math.inf
    exact: bool = False

    def __post_init__(self):
        for name in ("t", "f", "fp", "fpp"):
            arr = np.asarray(getattr(self, name), dtype=float)
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)

    def __len__(self) -> int:
        return len(self.t)

    def state(self, i: int) -> ShootState:
        return ShootState(float(self.t[i]), float(self.f[i]), float(self.fp[i]), float(self.fpp[i]))

    @property
    def samples(self) -> list[ShootState]:
        return [self.state(i) for i in range(len(self))]

    @property
    def final_state(self) -> ShootState:
        return self.state(-1)

    def events_of(self, *kinds: EventKind) -> list[Event]:
        return [e for e in self.events if e.kind in kinds]


def rhs(state: ShootState, params: ProblemParams) -> tuple[float, float, float]:
    """Derivative of (f, f', f'') along the similarity equation."""
    _, f, fp, fpp = state
    return fp, fpp, -f * fpp - params.beta * fp * (fp - 1.0)


def in_limit_one_basin(f: float, fp: float, fpp: float, beta: float) -> bool:
    """True when the state lies in a forward-invariant region where f' -> 1.

    For beta <= 1 the regions are {0 < f' < 1, 0 <= f'' <= f (1 - f')} and
    {f' > 1, f (1 - f') <= f'' <= 0}, on which H = f'' + f (f'-1) is monotone.
    For any beta > 0 the narrower regions with the slope f/2 in place of f,
    restricted to f**2 > 4 beta (resp. 4 beta f'), are invariant as well:
    on the slanted face G = f'' + (f0/2)(f'-1) one has
    G' = (f'-1) [(f0/2)(f - f0/2) - beta f'] > 0.
    """
    if beta <= 1.0:
        if 0.0 < fp < 1.0 and 0.0 <= fpp <= f * (1.0 - fp):
            return True
        if fp > 1.0 and f * (1.0 - fp) <= fpp <= 0.0:
            return True
    if f > 0.0:
        m = 0.5 * f
        if fp > 1.0 and -m * (fp - 1.0) <= fpp <= 0.0 and f * f > 4.0 * beta * fp:
            return True
        if 0.0 < fp < 1.0 and 0.0 <= fpp <= m * (1.0 - fp) and f * f > 4.0 * beta:
            return True
    return False


# Dormand-Prince 5(4) tableau with the 4th-order continuous extension.
_C2, _C3, _C4, _C5 = 1 / 5, 3 / 10, 4 / 5, 8 / 9
_A21 = 1 / 5
_A31, _A32 = 3 / 40, 9 / 40
_A41, _A42, _A43 = 44 / 45, -56 / 15, 32 / 9
_A51, _A52, _A53, _A54 = 19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729
_A61, _A62, _A63, _A64, _A65 = 9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656
_B1, _B3, _B4, _B5, _B6 = 35 / 384, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84
_E1, _E3, _E4, _E5, _E6, _E7 = (
    -71 / 57600, 71 / 16695, -71 / 1920, 17253 / 339200, -22 / 525, 1 / 40,
)
_P = (
    (1.0, -8048581381 / 2820520608, 8663915743 / 2820520608, -12715105075 / 11282082432),
    (0.0, 0.0, 0.0, 0.0),
    (0.0, 131558114200 / 32700410799, -68118460800 / 10900136933, 87487479700 / 32700410799),
    (0.0, -1754552775 / 470086768, 14199869525 / 1410260304, -10690763975 / 1880347072),
    (0.0, 127303824393 / 49829197408, -318862633887 / 49829197408, 701980252875 / 199316789632),
    (0.0, -282668133 / 205662961, 2019193451 / 616988883, -1453857185 / 822651844),
    (0.0, 40617522 / 29380423, -110615467 / 29380423, 69997945 / 29380423),
)

_SAFETY = 0.9
_PI_BETA = 0.04
_EXPO = 0.2 - 0.75 * _PI_BETA
_FAC_MIN, _FAC_MAX = 0.2, 10.0
_PROBES = (1 / 3, 2 / 3)
_EVENT_XTOL = 1e-11
_FPP_DEADBAND = 10.0


class _Dense:
    """Quartic interpolant on one accepted step."""

    __slots__ = ("t0", "h", "y0", "q")

    def __init__(self, t0, h, y0, ks):
        self.t0 = t0
        self.h = h
        self.y0 = y0
        q = []
        for j in range(3):
            row = []
            for m in range(4):
                s = 0.0
                for k, p in zip(ks, _P):
                    if p[m]:
                        s += k[j] * p[m]
                row.append(s)
            q.append(row)
        self.q = q

    def __call__(self, theta: float, j: int) -> float:
        q = self.q[j]
        return self.y0[j] + self.h * theta * (q[0] + theta * (q[1] + theta * (q[2] + theta * q[3])))

    def state(self, theta: float) -> tuple[float, float, float]:
        return self(theta, 0), self(theta, 1), self(theta, 2)


def _exact_trajectory(params: ProblemParams, c: float, controls: IntegratorControls) -> Trajectory:
    # (b, c) = (1, 0) gives f = a + t and (0, 0) gives f = a; both stay at f'' = 0.
    n = int(math.floor(controls.t_max / controls.sample_dt + 1e-9))
    t = np.arange(n + 1) * controls.sample_dt
    if t[-1] < controls.t_max - 1e-12:
        t = np.append(t, controls.t_max)
    t[-1] = min(t[-1], controls.t_max)
    b = params.b
    return Trajectory(
        params=params,
        c=c,
        t=t,
        f=params.a + b * t,
        fp=np.full_like(t, b),
        fpp=np.zeros_like(t),
        events=(),
        termination=Termination(TerminationKind.LIMIT, limit=int(b), certified=True),
        controls=controls,
        n_steps=0,
        last_step=controls.t_max,
        exact=True,
    )


def _sign(x: float) -> int:
    return 1 if x > 0 else (-1 if x < 0 else 0)


def integrate(params: ProblemParams, c: float,
              controls: IntegratorControls = DEFAULT_CONTROLS) -> Trajectory:
    """Integrate the shot f_c from (0, a, b, c) until blow-up, limit or horizon."""
    controls.validate()
    c = float(c)
    if not math.isfinite(c):
        raise InvalidParams(f"shooting parameter must be finite, got {c!r}")
    if c == 0.0 and params.b in (0.0, 1.0):
        return _exact_trajectory(params, c, controls)

    beta = params.beta
    rtol, atol = controls.rtol, controls.atol
    t_max = controls.t_max
    dt = controls.sample_dt
    eps = controls.limit_eps
    window = controls.limit_window

    def deriv(y):
        f, fp, fpp = y
        return (fp, fpp, -f * fpp - beta * fp * (fp - 1.0))

    def err_norm(e, y, ynew):
        s = 0.0
        for j in range(3):
            sc = atol + rtol * max(abs(y[j]), abs(ynew[j]))
            s += (e[j] / sc) ** 2
        return math.sqrt(s / 3.0)

    t = 0.0
    y = (float(params.a), float(params.b), c)
    k1 = deriv(y)

    # Hairer's starting step heuristic.
    d0 = err_norm(y, (0.0, 0.0, 0.0), y)
    d1 = err_norm(k1, (0.0, 0.0, 0.0), y)
    h0 = 1e-6 if (d0 < 1e-5 or d1 < 1e-5) else 0.01 * d0 / d1
    y1 = tuple(y[j] + h0 * k1[j] for j in range(3))
    k1b = deriv(y1)
    d2 = err_norm(tuple(k1b[j] - k1[j] for j in range(3)), (0.0, 0.0, 0.0), y) / h0
    if max(d1, d2) <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** 0.2
    h = min(100 * h0, h1, t_max)

    ts = [0.0]
    fs = [y[0]]
    fps = [y[1]]
    fpps = [y[2]]
    next_k = 1

    events: list[Event] = []
    # Sign trackers for f', f'-1, f''.  A quantity that starts at exactly zero
    # takes its sign from the first nonzero value without emitting an event,
    # except f'(0) = 1 which the shooting sets treat as a crossing at t = 0.
    # Values inside the integration error floor carry no reliable sign.
    floors = (atol, atol, _FPP_DEADBAND * atol)
    last_sign = [_sign(y[1]) if abs(y[1]) > floors[0] else 0, _sign(y[1] - 1.0) if abs(y[1] - 1.0) > floors[1] else 0,
                 _sign(y[2]) if abs(y[2]) > floors[2] else 0]
    if params.b == 1.0:
        kind = EventKind.FP_ONE_DOWN if c < 0 else EventKind.FP_ONE_UP
        events.append(Event(kind, 0.0, ShootState(0.0, *y)))
        last_sign[1] = -1 if c < 0 else 1

    dwell: list[tuple[float, float] | None] = [None, None]
    cert_start: float | None = None
    termination: Termination | None = None
    limit_verdict: Termination | None = None
    facold = 1e-4
    rejected = False
    n_steps = 0
    last_step = math.inf

    def check_limit(tc, yc):
        nonlocal cert_start
        f_, fp_, fpp_ = yc
        for lam in (0, 1):
            dev = abs(fp_ - lam)
            if dev < eps and abs(fpp_) < eps:
                if dwell[lam] is None:
                    dwell[lam] = (tc, dev)
                elif tc - dwell[lam][0] >= window and dev <= dwell[lam][1]:
                    return Termination(TerminationKind.LIMIT, limit=lam)
            else:
                dwell[lam] = None
        if controls.certify:
            if in_limit_one_basin(f_, fp_, fpp_, beta):
                if cert_start is None:
                    cert_start = tc
                elif tc - cert_start >= window:
                    return Termination(TerminationKind.LIMIT, limit=1, certified=True)
            else:
                cert_start = None
        return None

    check_limit(0.0, y)

    while True:
        if t >= t_max:
            termination = limit_verdict or Termination(TerminationKind.HORIZON)
            break
        if n_steps >= controls.max_steps:
            raise IntegratorError(f"step budget of {controls.max_steps} exhausted at t={t!r}")
        if h < controls.h_min:
            termination = Termination(TerminationKind.BLOWUP, t_escape=t)
            break
        hs = min(h, t_max - t)
        f0, p0, q0 = y
        k2 = deriv((f0 + hs * _A21 * k1[0], p0 + hs * _A21 * k1[1], q0 + hs * _A21 * k1[2]))
        k3 = deriv(tuple(y[j] + hs * (_A31 * k1[j] + _A32 * k2[j]) for j in range(3)))
        k4 = deriv(tuple(y[j] + hs * (_A41 * k1[j] + _A42 * k2[j] + _A43 * k3[j]) for j in range(3)))
        k5 = deriv(tuple(y[j] + hs * (_A51 * k1[j] + _A52 * k2[j] + _A53 * k3[j] + _A54 * k4[j])
                         for j in range(3)))
        k6 = deriv(tuple(y[j] + hs * (_A61 * k1[j] + _A62 * k2[j] + _A63 * k3[j] + _A64 * k4[j]
                                      + _A65 * k5[j]) for j in range(3)))
        ynew = tuple(y[j] + hs * (_B1 * k1[j] + _B3 * k3[j] + _B4 * k4[j] + _B5 * k5[j] + _B6 * k6[j])
                     for j in range(3))
        k7 = deriv(ynew)
        e = tuple(hs * (_E1 * k1[j] + _E3 * k3[j] + _E4 * k4[j] + _E5 * k5[j] + _E6 * k6[j]
                        + _E7 * k7[j]) for j in range(3))
        err = err_norm(e, y, ynew)

        if not err <= 1.0:  # also catches NaN from overflow
            if math.isfinite(err):
                h = hs / min(1 / _FAC_MIN, err ** _EXPO / _SAFETY)
            else:
                h = hs * _FAC_MIN
            rejected = True
            continue

        n_steps += 1
        fac = err ** _EXPO / facold ** _PI_BETA
        fac = max(1 / _FAC_MAX, min(1 / _FAC_MIN, fac / _SAFETY))
        h_next = hs / fac
        if rejected:
            h_next = min(h_next, hs)
        facold = max(err, 1e-4)
        rejected = False

        dense = _Dense(t, hs, y, (k1, k2, k3, k4, k5, k6, k7))
        t_new = t + hs if hs < t_max - t else t_max

        # Samples on the uniform grid falling in (t, t_new].
        while True:
            tk = next_k * dt
            if tk > t_new:
                break
            theta = (tk - t) / hs
            yk = dense.state(theta)
            ts.append(tk)
            fs.append(yk[0])
            fps.append(yk[1])
            fpps.append(yk[2])
            next_k += 1

        # Event localization on the dense output.
        step_events = []
        thetas = (0.0,) + _PROBES + (1.0,)
        vals = [y] + [dense.state(th) for th in _PROBES] + [ynew]
        for qi in range(3):
            j = 2 if qi == 2 else 1
            level = 1.0 if qi == 1 else 0.0
            for seg in range(1, len(thetas)):
                v = vals[seg][j] - level
                s_new = 0 if abs(v) <= floors[qi] else _sign(v)
                if s_new == 0 or s_new == last_sign[qi]:
                    if s_new != 0:
                        last_sign[qi] = s_new
                    continue
                if last_sign[qi] == 0:
                    last_sign[qi] = s_new
                    continue
                lo, hi = thetas[seg - 1], thetas[seg]
                g = lambda th, j=j, level=level: dense(th, j) - level
                glo, ghi = g(lo), g(hi)
                if glo == 0.0:
                    th_star = lo
                elif _sign(glo) == _sign(ghi):
                    th_star = hi
                else:
                    th_star = brentq(g, lo, hi, xtol=max(_EVENT_XTOL / hs, 4e-16), maxiter=80)
                te = t + th_star * hs
                st = ShootState(te, *dense.state(th_star))
                if qi == 0:
                    kind = EventKind.FP_ZERO
                elif qi == 1:
                    kind = EventKind.FP_ONE_UP if s_new > 0 else EventKind.FP_ONE_DOWN
                else:
                    kind = EventKind.FPP_ZERO_NEG_TO_POS if s_new > 0 else EventKind.FPP_ZERO_POS_TO_NEG
                step_events.append(Event(kind, te, st))
                last_sign[qi] = s_new
        step_events.sort(key=lambda ev: ev.t)
        events.extend(step_events)

        t, y, k1 = t_new, ynew, k7
        h = h_next
        last_step = hs

        if max(abs(y[1]), abs(y[2])) >= controls.blowup_bound:
            termination = Termination(TerminationKind.BLOWUP, t_escape=t)
            break
        if limit_verdict is None:
            limit_verdict = check_limit(t, y)
            if limit_verdict is not None and controls.stop_on_limit:
                termination = limit_verdict
                break

    # Close the sample grid with the exact final state.
    if ts[-1] < t - 1e-12:
        ts.append(t)
        fs.append(y[0])
        fps.append(y[1])
        fpps.append(y[2])
    else:
        ts[-1], fs[-1], fps[-1], fpps[-1] = t, y[0], y[1], y[2]
    if len(ts) == 1:
        ts[0], fs[0], fps[0], fpps[0] = 0.0, float(params.a), float(params.b), c

    return Trajectory(
        params=params,
        c=c,
        t=np.array(ts),
        f=np.array(fs),
        fp=np.array(fps),
        fpp=np.array(fpps),
        events=tuple(events),
        termination=termination,
        controls=controls,
        n_steps=n_steps,
        last_step=last_step,
    )


def fixed_step_rk4(params: ProblemParams, c: float, h: float, t_end: float,
                   every: int = 1) -> tuple[np.ndarray, np.ndarray]:
    """Classical fixed-step RK4 reference solution.

    Returns times and an (n, 3) array of (f, f', f''), keeping every
    ``every``-th step.  Intended as an independent check on :func:`integrate`.
    """
    beta = params.beta
    n = int(round(t_end / h))

    def deriv(f, p, q):
        return p, q, -f * q - beta * p * (p - 1.0)

    f, p, q = float(params.a), float(params.b), float(c)
    out_t = [0.0]
    out_y = [(f, p, q)]
    for i in range(1, n + 1):
        a1, a2, a3 = deriv(f, p, q)
        b1, b2, b3 = deriv(f + 0.5 * h * a1, p + 0.5 * h * a2, q + 0.5 * h * a3)
        c1, c2, c3 = deriv(f + 0.5 * h * b1, p + 0.5 * h * b2, q + 0.5 * h * b3)
        d1, d2, d3 = deriv(f + h * c1, p + h * c2, q + h * c3)
        f += h / 6 * (a1 + 2 * b1 + 2 * c1 + d1)
        p += h / 6 * (a2 + 2 * b2 + 2 * c2 + d2)
        q += h / 6 * (a3 + 2 * b3 + 2 * c3 + d3)
        if i % every == 0:
            out_t.append(i * h)
            out_y.append((f, p, q))
    return np.array(out_t), np.array(out_y)
