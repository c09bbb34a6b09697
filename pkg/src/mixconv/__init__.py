"""Shooting-method analysis of f''' + f f'' + beta f'(f' - 1) = 0 on [0, inf)."""

from .classify import Family, Limit, RegimeLabel, Shape, classify
from .errors import MixconvError
from .ode import (
    DEFAULT_CONTROLS,
    Event,
    EventKind,
    IntegratorControls,
    ProblemParams,
    Termination,
    TerminationKind,
    Trajectory,
    integrate,
)
from .shooting import CriticalValue, find_c_star, find_c_upper, sweep

__all__ = [
    "CriticalValue",
    "DEFAULT_CONTROLS",
    "Event",
    "EventKind",
    "Family",
    "IntegratorControls",
    "Limit",
    "MixconvError",
    "ProblemParams",
    "RegimeLabel",
    "Shape",
    "Termination",
    "TerminationKind",
    "Trajectory",
    "classify",
    "find_c_star",
    "find_c_upper",
    "integrate",
    "sweep",
]
