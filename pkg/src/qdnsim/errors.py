"""Exception types raised by the simulator.

Reservation errors (CapacityExceededError, InfeasibleReservationError,
DeadlockError) indicate a broken protocol invariant: compliant runs must
never raise them, and the engine aborts loudly if one fires.
"""


class QdnError(Exception):
    """Base class for simulator errors."""


class GenerationError(QdnError):
    """Topology generation could not meet its calibration target."""


class NoRouteError(QdnError):
    """No path exists between the requested endpoints."""


class CapacityExceededError(QdnError):
    """A reservation would push a memory pool past its capacity."""


class InfeasibleReservationError(QdnError):
    """Demand still exceeds capacity after every session was cut once."""


class DeadlockError(QdnError):
    """Stored sharings alone exceed a receive pool; no progress possible."""


class MetricUndefinedError(QdnError):
    """A metric was requested on input where it has no defined value."""


class ConfigError(QdnError):
    """A run configuration is malformed or inconsistent."""
