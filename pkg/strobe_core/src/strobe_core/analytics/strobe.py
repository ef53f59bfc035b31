"""Stroboscopic duty-cycle factors.

A probe that is on for a fraction D of every oscillator period keeps
``b = 1 + sinc(pi D)`` of the signal of the measured quadrature and leaves a
residual back-action fraction ``c = (1 - sinc(pi D)) / (1 + sinc(pi D))``.
"""

import math

from pydantic import BaseModel, ConfigDict, Field

from strobe_core.errors import DomainError

# Below this |x| the Taylor series replaces sin(x)/x.
SERIES_THRESHOLD = 1e-4


class StrobeProfile(BaseModel):
    """Duty-cycle factors for one probe duty D."""

    model_config = ConfigDict(frozen=True)

    duty: float = Field(gt=0.0, le=1.0)
    sinc_pd: float
    b: float = Field(ge=1.0, le=2.0)
    c: float = Field(ge=0.0, le=1.0)

    def __str__(self) -> str:
        return f"StrobeProfile(D={self.duty:g}, C={self.c:.6g}, B={self.b:.6g})"


def sinc(x: float) -> float:
    """Unnormalized sinc, sin(x)/x with sinc(0) = 1."""
    if abs(x) < SERIES_THRESHOLD:
        x2 = x * x
        return 1.0 - x2 / 6.0 + x2 * x2 / 120.0
    return math.sin(x) / x


def one_minus_sinc(x: float) -> float:
    """1 - sinc(x) without cancellation for small x."""
    if abs(x) < SERIES_THRESHOLD:
        x2 = x * x
        return x2 / 6.0 - x2 * x2 / 120.0
    return 1.0 - math.sin(x) / x


def strobe_profile(duty: float) -> StrobeProfile:
    """Compute the back-action coupling c(D) and signal factor b(D).

    Args:
        duty: Fraction of each period with the probe on, in (0, 1].

    Returns:
        The profile; c -> 0 and b -> 2 as D -> 0, c = b = 1 at D = 1.

    Raises:
        DomainError: If duty is outside (0, 1].
    """
    if math.isnan(duty) or not 0.0 < duty <= 1.0:
        raise DomainError(f"duty must be in (0, 1], got {duty!r}")
    x = math.pi * duty
    s = sinc(x)
    c = one_minus_sinc(x) / (1.0 + s)
    return StrobeProfile(
        duty=duty,
        sinc_pd=s,
        b=min(max(1.0 + s, 1.0), 2.0),
        c=min(max(c, 0.0), 1.0),
    )


def ground_state_x_variance(profile: StrobeProfile) -> float:
    """Variance of the strobe-averaged quadrature in the ground state, b^2/8."""
    return profile.b**2 / 8.0
