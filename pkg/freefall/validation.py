"""
validation.py: Input validation utilities for freefall
"""

import math
import re
from typing import Optional, Sequence

_ASSIGNMENT = re.compile(r"^\s*([A-Za-z_][A-Za-z0-9_]*)\s*=\s*(\S.*)$")


def validate_finite(*values: float) -> bool:
    try:
        return all(math.isfinite(float(v)) for v in values)
    except (TypeError, ValueError):
        return False


def validate_positive(*values: float) -> bool:
    # strictly positive and finite
    return validate_finite(*values) and all(float(v) > 0.0 for v in values)


def validate_point(x: Sequence[float]) -> bool:
    return len(x) == 4 and validate_finite(*x)


def validate_assignment(text: Optional[str]) -> bool:
    # name=value, as passed to --set
    return bool(text and _ASSIGNMENT.match(text))


def split_assignment(text: str) -> tuple[str, str]:
    m = _ASSIGNMENT.match(text or "")
    if not m:
        raise ValueError(f"expected name=value, got {text!r}")
    return m.group(1), m.group(2).strip()


def validate_sweep(lo: float, hi: float, steps: int) -> bool:
    if not validate_positive(lo, hi):
        return False
    if not lo < hi:
        return False
    return isinstance(steps, int) and steps >= 2


def validate_range(lo: float, hi: float, steps: int) -> bool:
    # like validate_sweep but a single-point range is allowed
    if not validate_positive(lo, hi) or lo > hi:
        return False
    if lo == hi:
        return isinstance(steps, int) and steps >= 1
    return isinstance(steps, int) and steps >= 2


def validate_trials(trials: int) -> bool:
    return isinstance(trials, int) and not isinstance(trials, bool) and trials >= 1


def validate_units(name: Optional[str]) -> bool:
    return (name or "").lower() in ("si", "natural")
