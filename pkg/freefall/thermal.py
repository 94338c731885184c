"""
thermal.py: Fourier analysis of the accelerated-observer Doppler chirp, and
Unruh/Hawking temperatures.

An observer at rest at radius R sees the freely falling vacua pass with
acceleration a; a zero-point wave e^{i omega t} then arrives as the chirp

    e^{i phi(t)},    phi(t) = (omega c / a) e^{a t / c}

whose Fourier amplitude is, with x = Omega c / a,

    F(Omega) = (c/a) e^{-pi x / 2} Gamma(i x) e^{-i x log(omega c / a)}

and |F|^2 Omega a / (2 pi c) = 1 / (e^{2 pi x} - 1): a Bose-Einstein factor at
the Unruh temperature T_U = hbar a / (2 pi c kB).

Two printed slips are corrected here. The inner exponent of the chirp is real
(e^{a t/c}, not e^{i a t/c}); only that reproduces the Gamma(i x) right-hand
side. The damping prefactor is e^{-pi Omega c / 2a}: with
|Gamma(i x)|^2 = pi / (x sinh(pi x)) it gives
|F|^2 = (c/a)^2 2 pi / (x (e^{2 pi x} - 1)), the stated Planck result.

The numeric path substitutes u = e^{at/c}, rotates the u contour onto the
imaginary axis and evaluates the remaining Gamma integral by a small-y series
plus adaptive quadrature. A direct time-domain evaluation is kept as a
diagnostic only; the t-integral converges only conditionally.
"""

import cmath
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np
from scipy import integrate

from .constants import PhysicalConstants, resolve_body
from .errors import ChirpRangeError, ConvergenceError, FreefallError, PreconditionError
from .gamma import complex_gamma
from .validation import validate_positive, validate_range, validate_sweep

MAX_EXPONENT = 700.0


@dataclass(frozen=True)
class ChirpParams:
    omega: float = 1.0
    a: float = 1.0
    c: float = 1.0

    def __post_init__(self):
        if not validate_positive(self.omega, self.a, self.c):
            raise PreconditionError(f"omega, a and c must be positive and finite: {self!r}")

    @property
    def beta(self) -> float:
        # omega c / a, the phase at t = 0
        return self.omega * self.c / self.a

    def x_of(self, Omega: float) -> float:
        return Omega * self.c / self.a

    def Omega_of(self, x: float) -> float:
        return x * self.a / self.c


@dataclass(frozen=True)
class QuadratureControls:
    epsilon: float = 0.05  # split point between series and quadrature
    series_terms: int = 25
    epsabs: float = 1e-13
    epsrel: float = 1e-12
    limit: int = 200  # quad subintervals per piece
    max_error: float = 1e-8  # accepted absolute error estimate on the Gamma integral

    def __post_init__(self):
        if not validate_positive(self.epsilon, self.epsabs, self.epsrel, self.max_error):
            raise PreconditionError(f"quadrature controls must be positive: {self!r}")
        if self.series_terms < 1 or self.limit < 1:
            raise PreconditionError(f"series_terms and limit must be >= 1: {self!r}")


@dataclass(frozen=True)
class SpectrumSample:
    x: float
    power_numeric: float
    power_analytic: float
    planck: float
    rel_err_quad: float
    identity_err: float
    converged: bool = True
    error: str = ""


def _exponent(t: float, p: ChirpParams) -> float:
    arg = p.a * t / p.c
    if arg > MAX_EXPONENT:
        raise ChirpRangeError(f"a t / c = {arg!r} exceeds {MAX_EXPONENT}", f"t={t!r}")
    return arg


def chirp_phase(t: float, p: ChirpParams) -> float:
    return p.beta * math.exp(_exponent(t, p))


def instantaneous_frequency(t: float, p: ChirpParams) -> float:
    return p.omega * math.exp(_exponent(t, p))


def planck_factor(x: float) -> float:
    return 1.0 / math.expm1(2 * math.pi * x)


def _require_frequency(Omega: float) -> None:
    if not validate_positive(Omega):
        raise PreconditionError(f"Omega must be > 0 (Omega = 0 is the pole of Gamma), got {Omega!r}")


def _rotation_prefactor(x: float, p: ChirpParams) -> complex:
    return (p.c / p.a) * math.exp(-0.5 * math.pi * x) * cmath.exp(-1j * x * math.log(p.beta))


def fourier_amplitude_analytic(Omega: float, p: ChirpParams) -> complex:
    _require_frequency(Omega)
    x = p.x_of(Omega)
    return _rotation_prefactor(x, p) * complex_gamma(1j * x)


def _quad(fn, lo: float, hi: float, ctrl: QuadratureControls):
    # full_output keeps QUADPACK diagnostics out of the (global) warnings machinery
    out = integrate.quad(fn, lo, hi, epsabs=ctrl.epsabs, epsrel=ctrl.epsrel, limit=ctrl.limit, full_output=1)
    value, err = out[0], out[1]
    if len(out) > 3:
        logging.debug("quad on [%r, %r]: %s", lo, hi, out[3])
        if err > ctrl.max_error:
            raise ConvergenceError(f"quadrature on [{lo!r}, {hi!r}] did not converge: {out[3]}", estimate=err)
    return value, err


def gamma_integral(x: float, ctrl: QuadratureControls = QuadratureControls()) -> complex:
    """Gamma(i x) = Int_0^inf y^{i x - 1} e^{-y} dy, split at y = epsilon."""
    s = 1j * x
    eps = ctrl.epsilon
    eps_s = cmath.exp(s * math.log(eps))
    series = 0j
    weight = 1.0  # (-1)^n eps^n / n!
    for n in range(ctrl.series_terms):
        series += weight * eps_s / (n + s)
        weight *= -eps / (n + 1)
    truncation = abs(weight) / abs(ctrl.series_terms + s)

    def real_part(y):
        return math.exp(-y) * math.cos(x * math.log(y)) / y

    def imag_part(y):
        return math.exp(-y) * math.sin(x * math.log(y)) / y

    pieces = [(eps, 1.0), (1.0, math.inf)] if eps < 1.0 else [(eps, math.inf)]
    tail = 0j
    error = truncation
    for lo, hi in pieces:
        re, re_err = _quad(real_part, lo, hi, ctrl)
        im, im_err = _quad(imag_part, lo, hi, ctrl)
        tail += complex(re, im)
        error += re_err + im_err
    logging.debug("gamma integral x=%r eps=%r: error estimate %.3g", x, eps, error)
    if error > ctrl.max_error:
        raise ConvergenceError(f"Gamma integral at x={x!r} missed the error budget", estimate=error)
    return series + tail


def fourier_amplitude_numeric(Omega: float, p: ChirpParams, ctrl: QuadratureControls = QuadratureControls()) -> complex:
    _require_frequency(Omega)
    x = p.x_of(Omega)
    return _rotation_prefactor(x, p) * gamma_integral(x, ctrl)


def _complex_quad(fn, lo: float, hi: float, limit: int) -> complex:
    re = integrate.quad(lambda t: fn(t).real, lo, hi, limit=limit, epsabs=1e-13, epsrel=1e-11, full_output=1)[0]
    im = integrate.quad(lambda t: fn(t).imag, lo, hi, limit=limit, epsabs=1e-13, epsrel=1e-11, full_output=1)[0]
    return complex(re, im)


def fourier_amplitude_windowed(Omega: float, p: ChirpParams, tail_phase: float = 400.0, limit: int = 2000) -> complex:
    """Direct time-domain estimate of F(Omega); a diagnostic, not an acceptance gate.

    t < 0: the constant-phase tail is summed in the Abel sense, Int e^{i Omega t} = 1/(i Omega),
    and only e^{i Omega t}(e^{i phi} - 1) is integrated numerically. 0 <= t <= T: plain
    quadrature up to phi(T) = tail_phase. t > T: one integration by parts.
    """
    _require_frequency(Omega)
    scale = p.c / p.a
    t_low = min(0.0, scale * math.log(1e-16 / p.beta))
    t_high = scale * math.log(max(tail_phase / p.beta, 1.0))

    def damped(t):
        theta = chirp_phase(t, p)
        return cmath.exp(1j * Omega * t) * complex(-2.0 * math.sin(0.5 * theta) ** 2, math.sin(theta))

    def chirp(t):
        return cmath.exp(1j * (Omega * t + chirp_phase(t, p)))

    left = 1.0 / (1j * Omega) + _complex_quad(damped, t_low, 0.0, limit)
    middle = _complex_quad(chirp, 0.0, t_high, limit) if t_high > 0 else 0j
    slope = Omega + chirp_phase(t_high, p) / scale
    tail = 1j * chirp(t_high) / slope
    return left + middle + tail


def _sample(x: float, p: ChirpParams, ctrl: QuadratureControls) -> SpectrumSample:
    Omega = p.Omega_of(x)
    planck = planck_factor(x)
    analytic = abs(fourier_amplitude_analytic(Omega, p)) ** 2
    identity = analytic * Omega * p.a / (2 * math.pi * p.c)
    identity_err = abs(identity - planck) / planck
    try:
        numeric = abs(fourier_amplitude_numeric(Omega, p, ctrl)) ** 2
    except FreefallError as exc:
        logging.debug("spectrum row x=%r flagged: %s", x, exc)
        return SpectrumSample(x, math.nan, analytic, planck, math.nan, identity_err, False, str(exc))
    return SpectrumSample(x, numeric, analytic, planck, abs(numeric - analytic) / analytic, identity_err)


def spectrum_sweep(
    p: ChirpParams,
    xmin: float,
    xmax: float,
    steps: int,
    ctrl: QuadratureControls = QuadratureControls(),
    workers: Optional[int] = None,
) -> List[SpectrumSample]:
    """Rows on a uniform x grid, ordered by x; failed rows are flagged, not raised."""
    if not validate_sweep(xmin, xmax, steps):
        raise PreconditionError(f"need 0 < xmin < xmax and steps >= 2, got {xmin!r}, {xmax!r}, {steps!r}")
    grid = np.linspace(xmin, xmax, steps)
    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(lambda x: _sample(float(x), p, ctrl), grid))
    else:
        rows = [_sample(float(x), p, ctrl) for x in grid]
    logging.debug("spectrum sweep: %d rows, %d flagged", len(rows), sum(not r.converged for r in rows))
    return rows


def spectrum_temperature(samples: Sequence[SpectrumSample], p: ChirpParams, k: PhysicalConstants) -> float:
    """Temperature of the Bose-Einstein factor read off the analytic spectrum.

    Each row gives n = |F|^2 Omega a / (2 pi c) and hbar Omega / (kB T) = log(1 + 1/n);
    1/T is fitted by least squares through the origin.
    """
    if not samples:
        raise PreconditionError("no spectrum samples to fit")
    x = np.array([s.x for s in samples])
    occupation = np.array([s.power_analytic for s in samples]) * x * p.a**2 / (2 * math.pi * p.c**2)
    energy = k.hbar * x * p.a / (p.c * k.kB)  # hbar Omega / kB
    inverse_temperature = np.log1p(1.0 / occupation)
    return float(np.sum(energy**2) / np.sum(energy * inverse_temperature))


# ---------------------------------------------------------------------------
# Temperatures


@dataclass(frozen=True)
class ProfileRow:
    R: float
    T: float
    ratio_to_hawking: float
    interior: bool


def unruh_temperature(a: float, k: PhysicalConstants) -> float:
    if not validate_positive(a):
        raise PreconditionError(f"acceleration must be > 0, got {a!r}")
    return k.hbar * a / (2 * math.pi * k.c * k.kB)


def surface_gravity(M: float, R: float, k: PhysicalConstants) -> float:
    if not validate_positive(M, R):
        raise PreconditionError(f"mass and radius must be > 0, got {M!r}, {R!r}")
    return k.G * M / R**2


def schwarzschild_radius(M: float, k: PhysicalConstants) -> float:
    if not validate_positive(M):
        raise PreconditionError(f"mass must be > 0, got {M!r}")
    return 2 * k.G * M / k.c**2


def hawking_temperature(M: float, k: PhysicalConstants) -> float:
    """Unruh temperature of the falling vacua at the horizon R = r_S."""
    return unruh_temperature(surface_gravity(M, schwarzschild_radius(M, k), k), k)


def hawking_temperature_closed_form(M: float, k: PhysicalConstants) -> float:
    if not validate_positive(M):
        raise PreconditionError(f"mass must be > 0, got {M!r}")
    return k.hbar * k.c**3 / (8 * math.pi * k.G * M * k.kB)


def temperature_profile(M: float, Rmin: float, Rmax: float, steps: int, k: PhysicalConstants) -> List[ProfileRow]:
    """T_U(R) = hbar G M / (2 pi c R^2 kB) on a uniform R grid; rows inside r_S are flagged."""
    if not validate_positive(M):
        raise PreconditionError(f"mass must be > 0, got {M!r}")
    if not validate_range(Rmin, Rmax, steps):
        raise PreconditionError(f"need 0 < Rmin <= Rmax and enough steps to span them, got {Rmin!r}, {Rmax!r}, {steps!r}")
    r_s = schwarzschild_radius(M, k)
    t_h = hawking_temperature(M, k)
    rows = []
    for R in np.linspace(Rmin, Rmax, steps):
        R = float(R)
        T = unruh_temperature(surface_gravity(M, R, k), k)
        rows.append(ProfileRow(R, T, T / t_h, R < r_s))
    return rows


def surface_temperature(body: str, k: PhysicalConstants) -> float:
    M, R = resolve_body(body)
    return unruh_temperature(surface_gravity(M, R, k), k)
