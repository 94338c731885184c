"""
lingrav.py: The quadratic spin-2 action of a freely falling Minkowski box.

    A^h = -1/(8 kappa) Int d^4x h_ab eps^{cade} eps_c^{bfg} d_d d_f h_eg

is studied on real plane waves h_ab(x) = A_ab cos(k.x). Substituting
d_d d_f -> -k_d k_f gives, per unit volume and per amplitude,

    T^{eg}(A, k) = eps^{cade} eps_c^{bfg} k_d k_f A_ab          (kinetic_apply)
    Q(A, k)      = -1/(8 kappa) * A_ab * (-1) * T^{ab}           (action_density)

The -1 of the substitution is carried explicitly in Q and nowhere else. The
cos^2 time average (a factor 1/2) is left out: Q is a per-amplitude quadratic
form, and only its zeros and ratios are meaningful.

Indices inside the double-epsilon contraction are moved with eta, never with
a curved metric. eps^{0123} = +1, hence eps_{0123} = -1.
"""

import itertools
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from .constants import PhysicalConstants
from .errors import PreconditionError
from .geometry import ETA
from .validation import validate_finite, validate_positive, validate_trials

GAUGE_TOLERANCE = 1e-10
BIANCHI_TOLERANCE = 1e-12
ON_SHELL_TOLERANCE = 1e-12


def _permutation_sign(perm: Tuple[int, ...]) -> int:
    sign = 1
    perm = list(perm)
    for i in range(len(perm)):
        while perm[i] != i:
            j = perm[i]
            perm[i], perm[j] = perm[j], perm[i]
            sign = -sign
    return sign


class EpsilonTensor:
    """Rank-4 Levi-Civita symbol with eps^{0123} = +1."""

    def __init__(self):
        upper = np.zeros((4, 4, 4, 4))
        for perm in itertools.permutations(range(4)):
            upper[perm] = _permutation_sign(perm)
        self.upper = upper
        self.lower = np.einsum("ai,bj,ck,dl,ijkl->abcd", ETA, ETA, ETA, ETA, upper)
        # eps_c^{bfg}: first index lowered
        self.first_lowered = np.einsum("ci,ibfg->cbfg", ETA, upper)

    def __getitem__(self, idx):
        return self.upper[idx]

    def double_contraction(self) -> np.ndarray:
        """D^{ade}_{bfg} = eps^{cade} eps_{cbfg}, shape (4,)*6 ordered (a, d, e, b, f, g)."""
        return np.einsum("cade,cbfg->adebfg", self.upper, self.lower)


EPSILON = EpsilonTensor()


def delta_determinant(a: int, d: int, e: int, b: int, f: int, g: int) -> float:
    """-det of the 3x3 Kronecker-delta matrix; the sign comes from det(eta) = -1."""
    rows = (a, d, e)
    cols = (b, f, g)
    m = np.array([[1.0 if r == c else 0.0 for c in cols] for r in rows])
    return -float(round(np.linalg.det(m)))


def epsilon_delta_identity() -> float:
    """Worst deviation between eps^{cade} eps_{cbfg} and the delta determinant."""
    contracted = EPSILON.double_contraction()
    worst = 0.0
    for idx in itertools.product(range(4), repeat=6):
        worst = max(worst, abs(contracted[idx] - delta_determinant(*idx)))
    return worst


@dataclass(frozen=True)
class PolarizationMode:
    A: np.ndarray
    k: np.ndarray

    def __post_init__(self):
        A = np.asarray(self.A, dtype=float)
        k = np.asarray(self.k, dtype=float)
        if A.shape != (4, 4) or k.shape != (4,):
            raise PreconditionError(f"mode needs a 4x4 amplitude and a 4-covector, got {A.shape} and {k.shape}")
        if not validate_finite(*A.ravel(), *k):
            raise PreconditionError("mode components must be finite")
        if not np.array_equal(A, A.T):
            raise PreconditionError("amplitude A must be exactly symmetric")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "k", k)

    def scale(self) -> float:
        # natural size of T = eps eps k k A
        return float(np.max(np.abs(self.k)) ** 2 * np.max(np.abs(self.A)))


@dataclass(frozen=True)
class Coupling:
    kappa: float = 8 * math.pi

    def __post_init__(self):
        if not validate_positive(self.kappa):
            raise PreconditionError(f"kappa must be positive, got {self.kappa!r}")

    @classmethod
    def from_constants(cls, k: PhysicalConstants) -> "Coupling":
        return cls(8 * math.pi * k.G / k.c**3)


def pure_gauge(k: np.ndarray, xi: np.ndarray) -> np.ndarray:
    k = np.asarray(k, dtype=float)
    xi = np.asarray(xi, dtype=float)
    return np.outer(k, xi) + np.outer(xi, k)


def kinetic_apply(mode: PolarizationMode) -> np.ndarray:
    t = np.einsum("cade,cbfg,d,f,ab->eg", EPSILON.upper, EPSILON.first_lowered, mode.k, mode.k, mode.A)
    t = 0.5 * (t + t.T)
    if not np.array_equal(t, t.T):
        raise ArithmeticError("kinetic operator output lost symmetry")
    return t


def action_density(mode: PolarizationMode, c: Coupling = Coupling()) -> float:
    t = kinetic_apply(mode)
    return float(-1.0 / (8.0 * c.kappa) * np.einsum("ab,ab->", mode.A, -t))


def divergence(mode: PolarizationMode) -> np.ndarray:
    """k_e T^{eg}; vanishes identically (linearized Bianchi identity)."""
    return mode.k @ kinetic_apply(mode)


# ---------------------------------------------------------------------------
# Randomized verification


def trial_seed(seed: int, trial: int) -> int:
    return int(np.random.SeedSequence([seed, trial]).generate_state(1)[0])


def random_mode(rng: np.random.Generator) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(A, k, xi) with components uniform in [-1, 1], A symmetrized."""
    k = rng.uniform(-1.0, 1.0, 4)
    xi = rng.uniform(-1.0, 1.0, 4)
    raw = rng.uniform(-1.0, 1.0, (4, 4))
    return 0.5 * (raw + raw.T), k, xi


def random_tt_mode(rng: np.random.Generator, gauge: bool = False) -> PolarizationMode:
    """Null k = (|v|, v) with a transverse-traceless amplitude, optionally plus pure gauge."""
    v = rng.uniform(-1.0, 1.0, 3)
    n = v / np.linalg.norm(v)
    helper = np.eye(3)[np.argmin(np.abs(n))]
    e1 = np.cross(n, helper)
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(n, e1)
    plus, cross = rng.uniform(-1.0, 1.0, 2)
    A = np.zeros((4, 4))
    A[1:, 1:] = plus * (np.outer(e1, e1) - np.outer(e2, e2)) + cross * (np.outer(e1, e2) + np.outer(e2, e1))
    k = np.concatenate(([np.linalg.norm(v)], v))
    if gauge:
        A = A + pure_gauge(k, rng.uniform(-1.0, 1.0, 4))
    return PolarizationMode(0.5 * (A + A.T), k)


@dataclass(frozen=True)
class TrialResult:
    trial: int
    seed: int
    residual_gauge: float
    residual_bianchi: float
    passed: bool
    # (A, k, xi) of a failing trial; None when it passed
    mode: Optional[Tuple[np.ndarray, np.ndarray, np.ndarray]] = field(default=None, compare=False, repr=False)


@dataclass
class GaugeReport:
    seed: int
    rows: List[TrialResult] = field(default_factory=list)

    @property
    def passed(self) -> int:
        return sum(1 for r in self.rows if r.passed)

    @property
    def failed(self) -> int:
        return len(self.rows) - self.passed

    @property
    def worst_gauge(self) -> float:
        return max((r.residual_gauge for r in self.rows), default=0.0)

    @property
    def worst_bianchi(self) -> float:
        return max((r.residual_bianchi for r in self.rows), default=0.0)

    def failures(self) -> List[TrialResult]:
        return [r for r in self.rows if not r.passed]


def check_mode(A: np.ndarray, k: np.ndarray, xi: np.ndarray, c: Coupling = Coupling()) -> Tuple[float, float]:
    """(gauge residual, Bianchi residual) of one mode, both scale-normalized."""
    gauge = pure_gauge(k, xi)
    base = PolarizationMode(A, k)
    pure = PolarizationMode(gauge, k)
    shifted = PolarizationMode(A + gauge, k)

    q_scale = max(base.scale(), shifted.scale()) / (8.0 * c.kappa)
    if q_scale == 0.0:
        return 0.0, 0.0
    q_base = action_density(base, c)
    q_shift = action_density(shifted, c)
    q_pure = action_density(pure, c)
    nullity = abs(q_pure) / (pure.scale() / (8.0 * c.kappa)) if pure.scale() > 0 else 0.0
    shift = abs(q_shift - q_base) / max(abs(q_base), abs(q_shift), q_scale)

    bianchi_scale = base.scale() * float(np.max(np.abs(k)))
    bianchi = float(np.max(np.abs(divergence(base)))) / bianchi_scale if bianchi_scale > 0 else 0.0
    return max(nullity, shift), bianchi


def _run_trial(seed: int, trial: int, c: Coupling) -> TrialResult:
    s = trial_seed(seed, trial)
    A, k, xi = random_mode(np.random.default_rng(s))
    gauge, bianchi = check_mode(A, k, xi, c)
    ok = gauge <= GAUGE_TOLERANCE and bianchi <= BIANCHI_TOLERANCE
    return TrialResult(trial, s, gauge, bianchi, ok, None if ok else (A, k, xi))


def gauge_orbit_check(trials: int, seed: int, c: Coupling = Coupling(), workers: Optional[int] = None) -> GaugeReport:
    """Randomized gauge-invariance and transversality check; deterministic for a seed."""
    if not validate_trials(trials):
        raise PreconditionError(f"trials must be >= 1, got {trials!r}")
    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(lambda t: _run_trial(seed, t, c), range(trials)))
    else:
        rows = [_run_trial(seed, t, c) for t in range(trials)]
    report = GaugeReport(seed, rows)
    logging.debug(
        "gauge orbit check: %d/%d passed, worst gauge %.3g, worst bianchi %.3g",
        report.passed,
        trials,
        report.worst_gauge,
        report.worst_bianchi,
    )
    return report


def on_shell_check(trials: int, seed: int, gauge: bool = True) -> float:
    """Worst max|T| / scale over random null-k transverse-traceless modes."""
    if not validate_trials(trials):
        raise PreconditionError(f"trials must be >= 1, got {trials!r}")
    worst = 0.0
    for trial in range(trials):
        mode = random_tt_mode(np.random.default_rng(trial_seed(seed, trial)), gauge=gauge)
        worst = max(worst, float(np.max(np.abs(kinetic_apply(mode)))) / mode.scale())
    return worst
