"""
geometry.py: Freely-falling frames from a metric spec.

Index layout of every array returned here:

    g[mu, nu]                 g_{mu nu}
    e[alpha, mu]              e^alpha_mu      (Lorentz row, coordinate column)
    einv[alpha, mu]           e_alpha^mu
    omega[mu, nu, lam]        Omega_{mu nu}^lam = 1/2 [e_alpha^lam d_mu e^alpha_nu - (mu <-> nu)]
    spin[mu, alpha, beta]     Gamma_mu^{alpha beta}
    christoffel[lam, mu, nu]  Gamma^lam_{mu nu}

Conventions: eta = diag(+1, -1, -1, -1). The spin connection is built as

    S^{mu nu lam} = Omega^{mu nu lam} - Omega^{nu lam mu} + Omega^{lam mu nu}
    Gamma_mu^{nu lam} = g_{mu sigma} S^{sigma nu lam}          (no factor 1/2)
    Gamma_mu^{alpha beta} = e^alpha_nu e^beta_lam Gamma_mu^{nu lam}

with all Omega indices moved by g. This normalization and sign make the tetrad
postulate

    d_mu e^alpha_nu - Gamma^lam_{mu nu} e^alpha_lam + Gamma_mu^alpha_beta e^beta_nu = 0,
    Gamma_mu^alpha_beta = eta_{beta gamma} Gamma_mu^{alpha gamma},

hold identically, and `tetrad_postulate_residual` checks it numerically.

The tetrad gauge is fixed: diagonal metrics get the diagonal square-root
tetrad, anything else a hyperbolic Cholesky factorization (time row first with
+, the spatial Schur complement with -). In that case e[alpha, mu] is upper
triangular (e^alpha_mu = 0 for alpha > mu), so e^T is the lower-triangular
factor L of g = L eta L^T. Derivatives are central differences
with h_mu = step * max(1, |x_mu|).
"""

import logging
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Tuple, Union

import numpy as np

from .errors import DegenerateChartError, FreefallError, PreconditionError, SignatureError
from .exprparse import MetricSpec
from .validation import validate_point

ETA = np.diag([1.0, -1.0, -1.0, -1.0])
DEFAULT_STEP = 1e-5
DET_FLOOR = 1e-12

Step = Union[float, Sequence[float], None]


@dataclass(frozen=True)
class Point:
    x: Tuple[float, float, float, float]

    def __post_init__(self):
        if not validate_point(self.x):
            raise PreconditionError(f"a point needs 4 finite coordinates, got {self.x!r}")

    @classmethod
    def of(cls, p: Union["Point", Sequence[float]]) -> "Point":
        if isinstance(p, Point):
            return p
        return cls(tuple(float(v) for v in p))

    def array(self) -> np.ndarray:
        return np.array(self.x, dtype=float)


def _describe(x: np.ndarray) -> str:
    return "(" + ", ".join(f"{v:.6g}" for v in x) + ")"


def tetrad_from_metric(g: np.ndarray, where: str = "") -> np.ndarray:
    """Factor g = e^T eta e; raises on degenerate or non-Lorentzian g."""
    diag = np.diag(g)
    if abs(np.linalg.det(g)) < DET_FLOOR:
        raise DegenerateChartError(f"degenerate metric (|det g| < {DET_FLOOR}) at {where}: diag(g) = {_describe(diag)}")
    g00 = g[0, 0]
    schur = g[1:, 1:] - np.outer(g[0, 1:], g[0, 1:]) / g00 if g00 > 0 else None
    if g00 <= 0 or np.any(np.linalg.eigvalsh(schur) >= 0):
        raise SignatureError(
            f"metric is not Lorentzian (+,-,-,-) at {where}: diag(g) = {_describe(diag)}"
        )
    off_diagonal = g - np.diag(diag)
    if not np.any(off_diagonal):
        return np.diag(np.sqrt(np.abs(diag)))
    e = np.zeros((4, 4))
    e[0] = g[0] / np.sqrt(g00)
    e[1:, 1:] = np.linalg.cholesky(-schur).T
    return e


class FrameField:
    """Evaluators for g, e and e^{-1} of one metric spec."""

    def __init__(self, spec: MetricSpec):
        self.spec = spec
        self.eta = ETA

    def metric(self, x: Sequence[float]) -> np.ndarray:
        return self.spec.metric_at(x)

    def vierbein(self, x: Sequence[float]) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        where = ", ".join(f"{n}={v:.6g}" for n, v in zip(self.spec.coords, x))
        return tetrad_from_metric(self.metric(x), where)

    def inverse_vierbein(self, x: Sequence[float]) -> np.ndarray:
        # einv[alpha, mu] = e_alpha^mu, i.e. e @ einv.T == 1
        return np.linalg.inv(self.vierbein(x)).T


def frame_field(spec: MetricSpec) -> FrameField:
    return FrameField(spec)


def step_sizes(x: np.ndarray, step: Step = None) -> np.ndarray:
    if step is None:
        step = DEFAULT_STEP
    if np.ndim(step) == 0:
        return float(step) * np.maximum(1.0, np.abs(x))
    h = np.asarray(step, dtype=float)
    if h.shape != (4,) or np.any(h <= 0):
        raise PreconditionError(f"step must be a positive scalar or 4 positive values, got {step!r}")
    return h


def _central_difference(fn: Callable[[np.ndarray], np.ndarray], x: np.ndarray, h: np.ndarray, coords) -> np.ndarray:
    """d[mu, ...] = (fn(x + h_mu) - fn(x - h_mu)) / (2 h_mu)."""
    rows = []
    for mu in range(4):
        shift = np.zeros(4)
        shift[mu] = h[mu]
        try:
            plus = fn(x + shift)
            minus = fn(x - shift)
        except FreefallError as exc:
            exc.add_note(f"while differencing along {coords[mu]!r} with stencil offset +/-{h[mu]!r}")
            raise
        rows.append((plus - minus) / (2.0 * h[mu]))
    return np.stack(rows)


@dataclass(frozen=True)
class ConnectionBundle:
    point: Point
    step: np.ndarray
    metric: np.ndarray
    vierbein: np.ndarray
    omega: np.ndarray
    spin: np.ndarray
    christoffel: np.ndarray


def vierbein_at(spec: MetricSpec, p) -> np.ndarray:
    return FrameField(spec).vierbein(Point.of(p).array())


def _vierbein_derivative(frame: FrameField, x: np.ndarray, h: np.ndarray) -> np.ndarray:
    # de[mu, alpha, nu] = d_mu e^alpha_nu
    return _central_difference(frame.vierbein, x, h, frame.spec.coords)


def _omega(e: np.ndarray, de: np.ndarray) -> np.ndarray:
    einv = np.linalg.inv(e).T
    c = np.einsum("al,man->mnl", einv, de)
    return 0.5 * (c - c.transpose(1, 0, 2))


def _spin_from_omega(omega: np.ndarray, g: np.ndarray, e: np.ndarray) -> np.ndarray:
    ginv = np.linalg.inv(g)
    omega_up = np.einsum("ma,nb,abl->mnl", ginv, ginv, omega)
    s_up = omega_up - np.einsum("nlm->mnl", omega_up) + np.einsum("lmn->mnl", omega_up)
    gamma_coord = np.einsum("ms,snl->mnl", g, s_up)
    return np.einsum("an,bl,mnl->mab", e, e, gamma_coord)


def _christoffel(g: np.ndarray, dg: np.ndarray) -> np.ndarray:
    # dg[mu, rho, sigma] = d_mu g_{rho sigma}
    ginv = np.linalg.inv(g)
    lowered = 0.5 * (np.einsum("mrn->rmn", dg) + np.einsum("nrm->rmn", dg) - dg)
    gamma = np.einsum("lr,rmn->lmn", ginv, lowered)
    return 0.5 * (gamma + gamma.transpose(0, 2, 1))


def _prepare(frame: FrameField, p, step: Step):
    point = Point.of(p)
    x = point.array()
    e = frame.vierbein(x)
    return point, x, e, step_sizes(x, step)


def anholonomity_at(frame: FrameField, p, step: Step = None) -> np.ndarray:
    _, x, e, h = _prepare(frame, p, step)
    return _omega(e, _vierbein_derivative(frame, x, h))


def spin_connection_at(frame: FrameField, p, step: Step = None) -> np.ndarray:
    _, x, e, h = _prepare(frame, p, step)
    omega = _omega(e, _vierbein_derivative(frame, x, h))
    return _spin_from_omega(omega, frame.metric(x), e)


def christoffel_at(frame: FrameField, p, step: Step = None) -> np.ndarray:
    point = Point.of(p)
    x = point.array()
    g = frame.metric(x)
    if abs(np.linalg.det(g)) < DET_FLOOR:
        raise DegenerateChartError(f"singular metric at {_describe(x)}")
    dg = _central_difference(frame.metric, x, step_sizes(x, step), frame.spec.coords)
    return _christoffel(g, dg)


def connection_bundle(frame: FrameField, p, step: Step = None) -> ConnectionBundle:
    point, x, e, h = _prepare(frame, p, step)
    g = frame.metric(x)
    de = _vierbein_derivative(frame, x, h)
    dg = _central_difference(frame.metric, x, h, frame.spec.coords)
    omega = _omega(e, de)
    logging.debug("connection bundle at %s with steps %s", point.x, h.tolist())
    return ConnectionBundle(
        point=point,
        step=h,
        metric=g,
        vierbein=e,
        omega=omega,
        spin=_spin_from_omega(omega, g, e),
        christoffel=_christoffel(g, dg),
    )


def _postulate_residual(e: np.ndarray, de: np.ndarray, christoffel: np.ndarray, spin: np.ndarray) -> np.ndarray:
    spin_mixed = np.einsum("mag,bg->mab", spin, ETA)
    return de - np.einsum("lmn,al->man", christoffel, e) + np.einsum("mab,bn->man", spin_mixed, e)


def tetrad_postulate_residual(frame: FrameField, p, step: Step = None) -> float:
    point, x, e, h = _prepare(frame, p, step)
    de = _vierbein_derivative(frame, x, h)
    g = frame.metric(x)
    dg = _central_difference(frame.metric, x, h, frame.spec.coords)
    spin = _spin_from_omega(_omega(e, de), g, e)
    residual = _postulate_residual(e, de, _christoffel(g, dg), spin)
    return float(np.max(np.abs(residual)))


def bundle_residual(frame: FrameField, bundle: ConnectionBundle) -> float:
    """Tetrad-postulate residual reusing an already computed bundle."""
    x = bundle.point.array()
    de = _vierbein_derivative(frame, x, bundle.step)
    return float(np.max(np.abs(_postulate_residual(bundle.vierbein, de, bundle.christoffel, bundle.spin))))


def metric_reconstruction_error(frame: FrameField, p) -> float:
    x = Point.of(p).array()
    g = frame.metric(x)
    e = frame.vierbein(x)
    return float(np.max(np.abs(e.T @ ETA @ e - g)) / np.max(np.abs(g)))


def inverse_error(frame: FrameField, p) -> float:
    x = Point.of(p).array()
    e = frame.vierbein(x)
    einv = frame.inverse_vierbein(x)
    eye = np.eye(4)
    return float(max(np.max(np.abs(e @ einv.T - eye)), np.max(np.abs(einv.T @ e - eye))))


def spin_antisymmetry_error(spin: np.ndarray) -> float:
    return float(np.max(np.abs(spin + spin.transpose(0, 2, 1))))
