"""Exception hierarchy shared by the solver, classifier and CLI."""


class MixconvError(Exception):
    """Base class; ``code`` is the stable machine-readable error name."""

    code = "ERROR"


class InvalidControls(MixconvError):
    code = "INVALID_CONTROLS"


class InvalidParams(MixconvError):
    code = "INVALID_PARAMS"


class IntegratorError(MixconvError):
    code = "INTEGRATOR_ERROR"


class ParamMismatch(MixconvError):
    code = "PARAM_MISMATCH"


class WrongBranch(MixconvError):
    code = "WRONG_BRANCH"


class EmptySeries(MixconvError):
    code = "EMPTY_SERIES"


class BracketFailure(MixconvError):
    code = "BRACKET_FAILURE"


class PreconditionError(MixconvError):
    code = "PRECONDITION"


class NotMonotone(MixconvError):
    code = "NOT_MONOTONE"


class DomainError(MixconvError):
    code = "DOMAIN"


class GridMismatch(MixconvError):
    code = "GRID_MISMATCH"


class WrongClass(MixconvError):
    code = "WRONG_CLASS"


class WindowTooShort(MixconvError):
    code = "WINDOW_TOO_SHORT"
