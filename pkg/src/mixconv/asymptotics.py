"""Tail-law fits for near-critical trajectories.

EXP:   f' ~ l A exp(-l t)                       (f' -> 0)
GAUSS: f' - 1 ~ A t^(beta-1) exp(-t^2/2 - l t)  (f' -> 1 along a slant asymptote)

Windows are value bands on the decaying quantity, not time intervals.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .classify import Limit, Shape, limit_of, shape_of
from .errors import WindowTooShort, WrongClass
from .ode import ProblemParams, Trajectory

BAND = (1e-12, 1e-3)
MIN_SAMPLES = 20
EXP_ACCEPT = 0.02


@dataclass(frozen=True)
class TailFit:
    model: str
    A: float
    l: float
    window: tuple[float, float]
    max_rel_residual: float
    n_samples: int
    l_direct: float | None = None
    accepted: bool | None = None

    def as_record(self) -> dict:
        return {
            "model": self.model,
            "A": self.A,
            "l": self.l,
            "window": list(self.window),
            "residual": self.max_rel_residual,
        }


def _band(t, values, band):
    t = np.asarray(t, dtype=float)
    values = np.asarray(values, dtype=float)
    inside = (values >= band[0]) & (values <= band[1])
    idx = np.flatnonzero(inside)
    if idx.size < MIN_SAMPLES:
        raise WindowTooShort(f"only {idx.size} samples in band {band}, need {MIN_SAMPLES}")
    # first contiguous run only
    breaks = np.flatnonzero(np.diff(idx) > 1)
    stop = breaks[0] + 1 if breaks.size else idx.size
    idx = idx[:stop]
    if idx.size < MIN_SAMPLES:
        raise WindowTooShort(f"only {idx.size} contiguous samples in band {band}, need {MIN_SAMPLES}")
    return idx


def _line(x, y):
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (intercept + slope * x)
    return slope, intercept, float(np.max(np.abs(np.expm1(resid))))


def fit_exp_samples(t, fp, f=None, band=BAND) -> TailFit:
    """Fit f' = l A exp(-l t) on the samples with f' inside ``band``."""
    t = np.asarray(t, dtype=float)
    fp = np.asarray(fp, dtype=float)
    idx = _band(t, fp, band)
    tw = t[idx]
    slope, intercept, resid = _line(tw, np.log(fp[idx]))
    l = -slope
    A = float(np.exp(intercept) / l)
    l_direct = accepted = None
    if f is not None:
        l_direct = float(np.asarray(f, dtype=float)[idx[-1]])
        accepted = bool(abs(l - l_direct) <= EXP_ACCEPT * abs(l_direct))
    return TailFit("EXP", A, float(l), (float(tw[0]), float(tw[-1])), resid, idx.size,
                   l_direct, accepted)


def fit_exp_tail(traj: Trajectory, band=BAND) -> TailFit:
    if limit_of(traj) is not Limit.ZERO:
        raise WrongClass(f"exponential tail needs limit ZERO, got {traj.termination}")
    return fit_exp_samples(traj.t, traj.fp, traj.f, band)


def exp_self_consistency(traj: Trajectory, fit: TailFit) -> dict:
    """Max relative misfit of the f', f and f'' laws sharing one (A, l)."""
    lo, hi = fit.window
    m = (traj.t >= lo) & (traj.t <= hi)
    t = traj.t[m]
    decay = fit.A * np.exp(-fit.l * t)
    f_model = fit.l - decay
    fp_model = fit.l * decay
    fpp_model = -fit.l ** 2 * decay
    return {
        "f": float(np.max(np.abs(traj.f[m] - f_model) / np.abs(f_model))),
        "fp": float(np.max(np.abs(traj.fp[m] - fp_model) / np.abs(fp_model))),
        "fpp": float(np.max(np.abs(traj.fpp[m] - fpp_model) / np.abs(fpp_model))),
    }


def linearized_decay_rate(limit_f: float, beta: float) -> float:
    """Decay rate of f' near a rest state f = limit_f, f' = 0.

    Small f' obeys u'' + limit_f u' - beta u = 0, whose decaying root is
    (limit_f + sqrt(limit_f^2 + 4 beta)) / 2.
    """
    return 0.5 * (limit_f + np.sqrt(limit_f ** 2 + 4.0 * beta))


def fit_gauss_samples(t, fp_minus_one, beta: float, band=BAND) -> TailFit:
    """Fit f' - 1 = A t^(beta-1) exp(-t^2/2 - l t) on the band samples."""
    t = np.asarray(t, dtype=float)
    g = np.asarray(fp_minus_one, dtype=float)
    idx = _band(t, g, band)
    tw = t[idx]
    if tw[0] <= 0:
        raise WindowTooShort("Gaussian window must lie in t > 0")
    z = np.log(g[idx]) + 0.5 * tw ** 2 - (beta - 1.0) * np.log(tw)
    slope, intercept, resid = _line(-tw, z)
    return TailFit("GAUSS", float(np.exp(intercept)), float(slope),
                   (float(tw[0]), float(tw[-1])), resid, idx.size)


def fit_gauss_tail(traj: Trajectory, params: ProblemParams | None = None, band=BAND) -> TailFit:
    params = params or traj.params
    if limit_of(traj) is not Limit.ONE or shape_of(traj) is not Shape.CONCAVE:
        raise WrongClass(
            f"Gaussian tail needs a concave trajectory with limit ONE, got {traj.termination}"
        )
    return fit_gauss_samples(traj.t, traj.fp - 1.0, params.beta, band)
