"""
constants.py: physical-constant presets and named bodies.

SI values are CODATA 2018 (hbar, c, kB exact by definition of the SI; G measured).
"""

from dataclasses import dataclass
from typing import Dict, Optional, Tuple

from .errors import PreconditionError
from .validation import validate_positive


@dataclass(frozen=True)
class PhysicalConstants:
    hbar: float
    c: float
    G: float
    kB: float

    def __post_init__(self):
        if not validate_positive(self.hbar, self.c, self.G, self.kB):
            raise PreconditionError(f"physical constants must be positive: {self!r}")


PRESETS: Dict[str, PhysicalConstants] = {
    "si": PhysicalConstants(hbar=1.054571817e-34, c=299792458.0, G=6.67430e-11, kB=1.380649e-23),
    "natural": PhysicalConstants(hbar=1.0, c=1.0, G=1.0, kB=1.0),
}

SI = PRESETS["si"]
NATURAL = PRESETS["natural"]

# name -> (mass kg, mean radius m)
BODIES: Dict[str, Tuple[float, float]] = {
    "earth": (5.972e24, 6.371e6),
    "sun": (1.989e30, 6.96e8),
}


def resolve_units(name: Optional[str]) -> PhysicalConstants:
    """Return the preset for `name` (case-insensitive); None means natural units."""
    key = (name or "natural").strip().lower()
    try:
        return PRESETS[key]
    except KeyError:
        raise PreconditionError(f"unknown units preset {name!r}; choose from {', '.join(PRESETS)}") from None


def resolve_body(name: str) -> Tuple[float, float]:
    try:
        return BODIES[name.strip().lower()]
    except KeyError:
        raise PreconditionError(f"unknown body {name!r}; choose from {', '.join(BODIES)}") from None
