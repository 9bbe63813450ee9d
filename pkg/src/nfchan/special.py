"""Scalar special functions used by the closed-form expressions.

``quad_phase_integral`` has two independent evaluation routes: a closed form
built on the Faddeeva function (scaled complementary error function) and a
piecewise adaptive Gauss-Kronrod quadrature. Tests use the second as the
oracle for the first.
"""

from __future__ import annotations

import numpy as np
from scipy import integrate, special

from .errors import ValidationError


def sinc(x):
    """Normalized sinc, sin(pi x)/(pi x)."""
    return np.sinc(x)


def bessel_j0(x):
    return special.j0(x)


def _erfc_right(z: np.ndarray, exp_mz2: np.ndarray) -> np.ndarray:
    # erfc(z) = exp(-z^2) w(jz); well conditioned for Re z >= 0
    return exp_mz2 * special.wofz(1j * z)


def erf_complex(z, exp_mz2=None):
    """erf of complex argument through the Faddeeva kernel.

    ``exp_mz2`` may carry a precomputed ``exp(-z**2)`` when the caller knows
    it more accurately than squaring ``z`` would give (e.g. a pure phase).
    """
    z = np.asarray(z, dtype=complex)
    if exp_mz2 is None:
        exp_mz2 = np.exp(-(z * z))
    right = z.real >= 0
    zr = np.where(right, z, -z)
    val = 1.0 - _erfc_right(zr, exp_mz2)
    val = np.where(right, val, -val)
    # 1 - erfc cancels near the origin, where the series is accurate instead
    small = np.abs(z) < 1.0
    return np.where(small, special.erf(np.where(small, z, 0.0)), val)


def erfi(z):
    """Imaginary error function erfi(z) = -j erf(jz)."""
    z = np.asarray(z, dtype=complex)
    return -1j * erf_complex(1j * z)


_GL_NODES = np.polynomial.legendre.leggauss(32)


def quad_phase_integral(a: float, b: float, L: float) -> complex:
    """(1/L) * integral over [-L/2, L/2] of exp(j (a y^2 + b y)) dy, closed form.

    With s = sqrt(-j a) and t = y + b/(2a) the integral is
    sqrt(pi)/(2 s) exp(-j b^2/(4a)) [erf(s t2) - erf(s t1)]. When both end
    points lie on the same side of the stationary point the erf difference
    is rewritten as a difference of erfc terms, and the large common phase
    b^2/(4a) is folded into the end-point phases a y^2 + b y, which are exact.
    Two degenerate corners avoid the erf route: a phase excursion below one
    radian (Gauss-Legendre, exact to rounding there) and a negligible a L^2
    (first-order expansion in a).
    """
    if not L > 0:
        raise ValidationError("L must be positive")
    a = float(a)
    b = float(b)
    if a == 0.0:
        return complex(np.sinc(b * L / (2.0 * np.pi)))
    h = L / 2.0
    if abs(b) * h + abs(a) * h * h <= 1.0:
        # nearly constant integrand: the erfc difference would cancel
        x, w = _GL_NODES
        y = h * x
        return complex(0.5 * np.sum(w * np.exp(1j * (a * y * y + b * y))))
    if abs(a) * L * L < 1e-9:
        # first order in a; the stationary point is out of floating-point reach
        bh = b * h
        m2 = 2.0 * (h * h * np.sin(bh) / b + 2.0 * h * np.cos(bh) / b**2 - 2.0 * np.sin(bh) / b**3) / L
        return complex(np.sinc(b * L / (2.0 * np.pi)) + 1j * a * m2)
    s = np.sqrt(complex(0.0, -a))
    shift = b / (2.0 * a)
    y1, y2 = -L / 2.0, L / 2.0
    z1, z2 = s * (y1 + shift), s * (y2 + shift)
    p1 = np.exp(1j * (a * y1 * y1 + b * y1))
    p2 = np.exp(1j * (a * y2 * y2 + b * y2))
    pref = np.sqrt(np.pi) / (2.0 * s * L)
    if z1.real >= 0 and z2.real >= 0:
        val = p1 * special.wofz(1j * z1) - p2 * special.wofz(1j * z2)
    elif z1.real < 0 and z2.real < 0:
        val = p2 * special.wofz(-1j * z2) - p1 * special.wofz(-1j * z1)
    else:
        # stationary point inside the interval, so |b^2/(4a)| <= |a| L^2 / 4
        common = np.exp(-1j * b * shift / 2.0)
        val = common * (erf_complex(z2) - erf_complex(z1))
    return complex(pref * val)


def quad_phase_integral_quadrature(a: float, b: float, L: float, tol: float = 1e-13) -> complex:
    """Same integral by adaptive Gauss-Kronrod on sub-intervals of bounded phase change."""
    if not L > 0:
        raise ValidationError("L must be positive")
    a = float(a)
    b = float(b)
    lo, hi = -L / 2.0, L / 2.0
    max_slope = abs(b) + 2.0 * abs(a) * (L / 2.0)
    n_pieces = int(np.clip(np.ceil(max_slope * L / np.pi), 1, 200_000))
    edges = np.linspace(lo, hi, n_pieces + 1)

    def re(y):
        return np.cos(a * y * y + b * y)

    def im(y):
        return np.sin(a * y * y + b * y)

    total_re = 0.0
    total_im = 0.0
    for x0, x1 in zip(edges[:-1], edges[1:]):
        total_re += integrate.quad(re, x0, x1, epsabs=tol * L / n_pieces, epsrel=tol, limit=200)[0]
        total_im += integrate.quad(im, x0, x1, epsabs=tol * L / n_pieces, epsrel=tol, limit=200)[0]
    return complex(total_re, total_im) / L


def quad_phase_power_erfi(a: float, b: float, L: float) -> float:
    """|quad_phase_integral|^2 written with erfi and the sqrt(j a) branch.

    For a > 0 this is pi/(4 a L^2) |erfi(sqrt(j/(4a)) (2 a y + b))|_{-L/2}^{L/2}|^2,
    which reduces to pi/(a L^2) |erfi(sqrt(j a) L/2)|^2 when b = 0. Negative a is
    folded through complex conjugation of the integrand.
    """
    if not L > 0:
        raise ValidationError("L must be positive")
    if a == 0.0:
        return float(np.sinc(b * L / (2.0 * np.pi)) ** 2)
    if a < 0:
        a, b = -a, -b
    root = np.sqrt(1j / (4.0 * a))
    hi = erfi(root * (2.0 * a * (L / 2.0) + b))
    lo = erfi(root * (2.0 * a * (-L / 2.0) + b))
    return float(np.pi / (4.0 * a * L * L) * abs(hi - lo) ** 2)
