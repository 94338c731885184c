import cmath
import math

import numpy as np
import pytest
from scipy import special

from freefall.errors import PoleError
from freefall.gamma import complex_gamma, complex_log_gamma


def test_factorial_values():
    assert complex_gamma(1) == pytest.approx(1.0, rel=1e-13)
    assert complex_gamma(5) == pytest.approx(24.0, rel=1e-13)
    assert complex_gamma(0.5) == pytest.approx(math.sqrt(math.pi), rel=1e-13)


def test_modulus_on_imaginary_axis():
    assert abs(complex_gamma(1j)) ** 2 == pytest.approx(math.pi / math.sinh(math.pi), rel=1e-12)
    assert abs(complex_gamma(1j)) ** 2 == pytest.approx(0.2719, abs=1e-4)


@pytest.mark.parametrize("z", [0, -1, -7, complex(-3, 0)])
def test_poles(z):
    with pytest.raises(PoleError):
        complex_gamma(z)


def test_reflection_identity_on_imaginary_axis():
    for x in np.geomspace(0.05, 50, 200):
        g = complex_gamma(1j * x)
        assert abs(g) ** 2 * x * math.sinh(math.pi * x) / math.pi == pytest.approx(1.0, rel=1e-12)


def test_against_scipy():
    rng = np.random.default_rng(0)
    for _ in range(300):
        z = complex(rng.uniform(-6, 8), rng.uniform(-50, 50))
        ours = complex_gamma(z)
        theirs = complex(special.gamma(z))
        assert abs(ours - theirs) <= 1e-12 * abs(theirs)


def test_log_gamma_is_a_logarithm():
    for z in (0.5 + 3j, 2.0, 10 - 40j):
        assert cmath.exp(complex_log_gamma(z)) == pytest.approx(complex(special.gamma(z)), rel=1e-12)


def test_conjugate_symmetry():
    z = 0.3 + 2.7j
    assert complex_gamma(z.conjugate()) == pytest.approx(complex_gamma(z).conjugate(), rel=1e-14)
