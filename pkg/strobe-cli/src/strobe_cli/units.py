"""Frequency arguments with unit suffixes."""

import argparse
import math
import re

FREQUENCY_UNITS = {"hz": 1.0, "khz": 1e3, "mhz": 1e6, "ghz": 1e9}

_FREQUENCY = re.compile(
    r"^\s*(?P<value>[-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)"
    r"\s*(?P<unit>[a-zA-Z]*)\s*$"
)


def parse_frequency(text: str) -> float:
    """Convert ``380kHz``, ``-1.6 GHz`` or a bare number of Hz to rad/s.

    Raises:
        ValueError: For an unparsable value or an unknown unit.
    """
    match = _FREQUENCY.match(text)
    if not match:
        raise ValueError(f"not a frequency: {text!r}")
    unit = match["unit"].lower() or "hz"
    if unit not in FREQUENCY_UNITS:
        raise ValueError(
            f"Unknown frequency unit {match['unit']!r}. Available: Hz, kHz, MHz, GHz"
        )
    return 2.0 * math.pi * float(match["value"]) * FREQUENCY_UNITS[unit]


def frequency_arg(text: str) -> float:
    """argparse type for frequencies."""
    try:
        return parse_frequency(text)
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e)) from e
