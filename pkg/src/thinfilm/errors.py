"""Exception hierarchy shared by all solver modules."""


class ThinFilmError(Exception):
    """Base class for all errors raised by this package."""


class InvalidParamsError(ThinFilmError, ValueError):
    """Flux parameters outside the admissible range."""


class InvalidStateError(ThinFilmError, ValueError):
    """State outside the closed quadrant h, b >= 0."""


class BoundaryStateError(ThinFilmError, ValueError):
    """Operation requires an interior state but got a boundary one."""


class DegenerateParameterError(ThinFilmError, ValueError):
    """Parameter combination makes the requested inversion singular."""


class InvalidDataError(ThinFilmError, ValueError):
    """Riemann data violating the one-zero-component assumption."""


class WrongCaseError(ThinFilmError, ValueError):
    """Operation applied to data of a different solution case."""


class InvalidShockError(ThinFilmError, ValueError):
    """Shock endpoint states do not lie on a common ray b/h = const."""


class NotADeltaError(ThinFilmError, ValueError):
    """Data does not admit an overcompressive singular front."""


class RangeError(ThinFilmError, ValueError):
    """Similarity coordinate outside the wave it was sampled from."""


class NoInteractionError(ThinFilmError, ValueError):
    """The two fronts never collide (speeds ordered the wrong way)."""


class UnreachableCaseError(ThinFilmError, ValueError):
    """Perturbed data requesting a wave pattern impossible in the state space."""


class UnsupportedCaseError(ThinFilmError, ValueError):
    """Perturbed data outside the enumerated interaction patterns."""


class EventBudgetError(ThinFilmError, RuntimeError):
    """Front-tracking event cascade exceeded its budget."""


class SchemeFailureError(ThinFilmError, RuntimeError):
    """Finite-volume update produced NaNs or lost positivity."""
