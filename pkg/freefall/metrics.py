"""
metrics.py: Builders for the built-in metric spec texts.

Each builder returns a string that `parse_metric_spec` accepts; `metric print`
re-emits it through `format_metric_spec`. Signature is (+,-,-,-) throughout.
"""

import math
import os
from typing import Callable, Dict, Optional, Tuple

import numpy as np

from .errors import MetricSpecError, PreconditionError
from .exprparse import MetricSpec, parse_metric_spec


def build_minkowski() -> str:
    return "\n".join(
        [
            "# Minkowski spacetime, Cartesian chart",
            "coords = t,x,y,z",
            "g[0][0] = 1",
            "g[1][1] = -1",
            "g[2][2] = -1",
            "g[3][3] = -1",
        ]
    ) + "\n"


def build_spherical_minkowski() -> str:
    return "\n".join(
        [
            "# Minkowski spacetime, spherical chart",
            "coords = t,r,theta,phi",
            "g[0][0] = 1",
            "g[1][1] = -1",
            "g[2][2] = -r^2",
            "g[3][3] = -r^2*sin(theta)^2",
        ]
    ) + "\n"


def build_schwarzschild(rs: float = 1.0) -> str:
    return "\n".join(
        [
            "# Schwarzschild exterior, Schwarzschild chart (valid for r > rs)",
            "coords = t,r,theta,phi",
            f"param rs = {float(rs)!r}",
            "g[0][0] = 1 - rs/r",
            "g[1][1] = -1/(1 - rs/r)",
            "g[2][2] = -r^2",
            "g[3][3] = -r^2*sin(theta)^2",
        ]
    ) + "\n"


def build_rindler(a: float = 1.0) -> str:
    return "\n".join(
        [
            "# Rindler wedge of a uniformly accelerated observer (valid for 1 + a*x > 0)",
            "coords = t,x,y,z",
            f"param a = {float(a)!r}",
            "g[0][0] = (1 + a*x)^2",
            "g[1][1] = -1",
            "g[2][2] = -1",
            "g[3][3] = -1",
        ]
    ) + "\n"


def build_gullstrand_painleve(rs: float = 1.0) -> str:
    # ingoing Painleve-Gullstrand time; only off-diagonal entry is g[0][1]
    return "\n".join(
        [
            "# Schwarzschild exterior, ingoing Painleve-Gullstrand chart",
            "coords = t,r,theta,phi",
            f"param rs = {float(rs)!r}",
            "g[0][0] = 1 - rs/r",
            "g[0][1] = -sqrt(rs/r)",
            "g[1][1] = -1",
            "g[2][2] = -r^2",
            "g[3][3] = -r^2*sin(theta)^2",
        ]
    ) + "\n"


BUILTIN_METRICS: Dict[str, Callable[[], str]] = {
    "minkowski": build_minkowski,
    "spherical-minkowski": build_spherical_minkowski,
    "schwarzschild": build_schwarzschild,
    "rindler": build_rindler,
    "gullstrand-painleve": build_gullstrand_painleve,
}

# Sampling boxes (lo, hi) per coordinate, inside the valid chart for the
# default parameters and away from coordinate singularities.
CHART_BOXES: Dict[str, Tuple[Tuple[float, float], ...]] = {
    "minkowski": ((-5.0, 5.0), (-5.0, 5.0), (-5.0, 5.0), (-5.0, 5.0)),
    "spherical-minkowski": ((-5.0, 5.0), (0.5, 10.0), (0.3, math.pi - 0.3), (0.0, 2 * math.pi)),
    "schwarzschild": ((-5.0, 5.0), (1.5, 10.0), (0.3, math.pi - 0.3), (0.0, 2 * math.pi)),
    "rindler": ((-5.0, 5.0), (-0.5, 5.0), (-5.0, 5.0), (-5.0, 5.0)),
    "gullstrand-painleve": ((-5.0, 5.0), (1.5, 10.0), (0.3, math.pi - 0.3), (0.0, 2 * math.pi)),
}


def builtin_spec_text(name: str) -> str:
    try:
        return BUILTIN_METRICS[name]()
    except KeyError:
        raise MetricSpecError(
            f"unknown built-in metric {name!r}; choose from {', '.join(BUILTIN_METRICS)}"
        ) from None


def load_metric(source: str) -> MetricSpec:
    """Resolve a built-in metric name or a path to a metric-spec file."""
    if source in BUILTIN_METRICS:
        return parse_metric_spec(builtin_spec_text(source))
    if os.path.isfile(source):
        with open(source, "r", encoding="utf-8") as fh:
            return parse_metric_spec(fh.read())
    raise MetricSpecError(f"{source!r} is neither a built-in metric nor a readable spec file")


def sample_chart_points(name: str, count: int, rng: Optional[np.random.Generator] = None) -> np.ndarray:
    """Uniform random points inside the chart box of a built-in metric, shape (count, 4)."""
    if name not in CHART_BOXES:
        raise PreconditionError(f"no chart box for metric {name!r}")
    rng = rng if rng is not None else np.random.default_rng(0)
    box = np.array(CHART_BOXES[name])
    return box[:, 0] + (box[:, 1] - box[:, 0]) * rng.random((count, 4))
