"""Exception hierarchy for strobe_core.

Input problems derive from ValueError as well, so callers that only know
about ValueError still catch them.
"""


class StrobeError(Exception):
    """Base class for all strobe errors."""


class PoleError(StrobeError, ValueError):
    """Detuning evaluated within the guard band of a polarizability pole."""


class DomainError(StrobeError, ValueError):
    """Input outside the domain where a closed form is defined."""


class RangeError(StrobeError, ValueError):
    """Input outside the validity window of an approximate model."""


class GridError(StrobeError, ValueError):
    """Time grid too coarse for the strobe windows, or pulses not whole periods."""


class DegenerateError(StrobeError, ValueError):
    """Records too short or with zero variance."""


class ConfigError(StrobeError, ValueError):
    """Scenario or parameter file problem.

    Attributes:
        key: The offending configuration key, when known.
    """

    def __init__(self, message: str, key: str | None = None) -> None:
        super().__init__(message)
        self.key = key


class NumericalError(StrobeError):
    """Numerical failure inside the simulator."""


class NegativeNoiseWarning(UserWarning):
    """Extracted oscillator noise fell below zero (shot-noise miscalibration)."""
