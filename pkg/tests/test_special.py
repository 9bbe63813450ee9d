import mpmath as mp
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.optimize import brentq

from nfchan.errors import ValidationError
from nfchan.special import (
    bessel_j0,
    erfi,
    quad_phase_integral,
    quad_phase_integral_quadrature,
    quad_phase_power_erfi,
    sinc,
)


@pytest.mark.parametrize("x, expected", [(0.0, 1.0), (1.0, 0.0), (0.5, 0.63661977236758134), (-2.0, 0.0)])
def test_sinc_values(x, expected):
    assert sinc(x) == pytest.approx(expected, abs=1e-15)


@given(st.floats(-1e3, 1e3, allow_nan=False))
def test_sinc_even(x):
    assert sinc(x) == sinc(-x)


def test_j0_at_zero():
    assert bessel_j0(0.0) == 1.0


def test_j0_first_zero():
    root = brentq(bessel_j0, 2.0, 3.0, xtol=1e-15)
    assert root == pytest.approx(2.40482555769577277, abs=1e-12)


@pytest.mark.parametrize("x", [0.5, 10.0, 123.456, 2500.25, 9999.5])
def test_j0_against_arbitrary_precision(x):
    ref = float(mp.besselj(0, mp.mpf(x)))
    assert abs(bessel_j0(x) - ref) <= 1e-12


@given(st.floats(0, 1e4))
def test_j0_even(x):
    assert bessel_j0(-x) == bessel_j0(x)


@pytest.mark.parametrize("z", [0.3 + 0.7j, -2 + 1.5j, 4.0 - 3.0j, 0.01j])
def test_erfi_against_arbitrary_precision(z):
    ref = complex(mp.erfi(mp.mpc(z.real, z.imag)))
    assert abs(erfi(z) - ref) <= 1e-13 * max(1.0, abs(ref))


def test_quad_unit_integrand():
    assert quad_phase_integral(0.0, 0.0, 0.7) == 1.0


@pytest.mark.parametrize("b, L", [(3.0, 1.0), (-17.0, 0.4), (2 * np.pi, 1.0)])
def test_quad_linear_phase_is_sinc(b, L):
    v = quad_phase_integral(0.0, b, L)
    assert v.imag == 0.0
    assert v.real == pytest.approx(sinc(L * b / (2 * np.pi)), abs=1e-15)


def test_quad_curvature_against_quadrature():
    cf = quad_phase_integral(100.0, 0.0, 1.0)
    qd = quad_phase_integral_quadrature(100.0, 0.0, 1.0)
    assert abs(cf - qd) <= 1e-9
    # arbitrary-precision reference for the same value
    assert abs(cf - (0.122293353279292522 + 0.105583456233064483j)) <= 1e-12


def test_quad_rejects_non_positive_length():
    with pytest.raises(ValidationError):
        quad_phase_integral(1.0, 1.0, 0.0)


abL = st.tuples(st.floats(-2000, 2000), st.floats(-2000, 2000), st.floats(1e-3, 3.0))


@given(abL)
def test_quad_bounded_by_one(args):
    assert abs(quad_phase_integral(*args)) <= 1.0 + 1e-12


@given(abL)
def test_quad_conjugate_symmetry(args):
    a, b, L = args
    lhs = quad_phase_integral(a, -b, L)
    rhs = np.conj(quad_phase_integral(-a, b, L))
    assert abs(lhs - rhs) <= 1e-12


def test_closed_form_matches_quadrature_on_random_grid():
    rng = np.random.default_rng(7)
    a = rng.uniform(-800, 800, 40)
    b = rng.uniform(-800, 800, 40)
    L = rng.uniform(0.02, 1.5, 40)
    for ai, bi, Li in zip(a, b, L):
        cf = quad_phase_integral(ai, bi, Li)
        qd = quad_phase_integral_quadrature(ai, bi, Li)
        assert abs(cf - qd) <= 1e-8 * abs(qd), (ai, bi, Li)


@pytest.mark.parametrize("a, b, L", [(40.0, 0.0, 0.64), (-25.0, 30.0, 0.5), (300.0, -120.0, 0.3)])
def test_literal_erfi_power_matches(a, b, L):
    # the literal erfi power form cancels catastrophically, so it only serves as a cross-check
    ref = abs(quad_phase_integral_quadrature(a, b, L)) ** 2
    assert quad_phase_power_erfi(a, b, L) == pytest.approx(ref, rel=1e-5)
