import math

import numpy as np
import pytest
import scipy.special as sp
from hypothesis import given, strategies as st

from oracles import bessel_zero_bisect, laguerre_series, legendre_rodrigues, quad_radial_norm
from rotframe.specfun import (
    BracketError,
    HydrogenParams,
    NormalizationError,
    RootBracket,
    assoc_laguerre,
    assoc_legendre,
    bessel_j,
    bessel_jp,
    bessel_k,
    bessel_k_logderiv,
    bessel_kp,
    bessel_zero,
    find_root,
    hydrogen_radial,
    hydrogen_wavefunction,
    nu_radial,
    nu_wavefunction,
    spherical_harmonic,
)


@given(st.integers(0, 12), st.integers(0, 9), st.floats(0, 40))
def test_laguerre_matches_series(k, a, x):
    ref = laguerre_series(k, a, x)
    assert assoc_laguerre(k, a, x) == pytest.approx(ref, rel=1e-9, abs=1e-9 * max(1.0, abs(ref)))


@pytest.mark.parametrize("l", range(7))
def test_legendre_matches_rodrigues(l):
    u = np.linspace(-1, 1, 41)
    for m in range(l + 1):
        np.testing.assert_allclose(assoc_legendre(l, m, u), legendre_rodrigues(l, m, u), rtol=1e-10, atol=1e-10)


def test_legendre_domain():
    with pytest.raises(ValueError):
        assoc_legendre(2, 1, 1.5)
    with pytest.raises(ValueError):
        assoc_legendre(1, 2, 0.3)


@pytest.mark.parametrize("l", range(5))
def test_spherical_harmonic_matches_scipy(l):
    th = np.linspace(0.1, 3.0, 7)
    ph = np.linspace(-2.0, 5.0, 7)
    for m in range(-l, l + 1):
        np.testing.assert_allclose(spherical_harmonic(l, m, th, ph), sp.sph_harm_y(l, m, th, ph), atol=1e-13)


def test_spherical_harmonics_orthonormal():
    x, w = np.polynomial.legendre.leggauss(30)
    th = np.arccos(x)
    ph = np.linspace(0, 2 * np.pi, 32, endpoint=False)
    T, P = np.meshgrid(th, ph, indexing="ij")
    W = np.outer(w, np.full(len(ph), 2 * np.pi / len(ph)))
    ys = {(l, m): spherical_harmonic(l, m, T, P) for l in range(4) for m in range(-l, l + 1)}
    for a, ya in ys.items():
        for b, yb in ys.items():
            ip = np.sum(W * np.conj(ya) * yb)
            assert abs(ip - (a == b)) < 1e-12


@pytest.mark.parametrize("M", [0, 1, 2, 5, 10])
def test_bessel_j_matches_scipy(M):
    x = np.concatenate([np.linspace(0, 8, 50), np.linspace(8.01, 60, 50)])
    np.testing.assert_allclose(bessel_j(M, x), sp.jv(M, x), rtol=1e-11, atol=1e-14)
    np.testing.assert_allclose(bessel_jp(M, x), sp.jvp(M, x), rtol=1e-10, atol=1e-13)


@pytest.mark.parametrize("M", [0, 1, 2, 5, 10])
def test_bessel_k_matches_scipy(M):
    x = np.geomspace(0.02, 80, 60)
    np.testing.assert_allclose(bessel_k(M, x), sp.kv(M, x), rtol=1e-12)
    np.testing.assert_allclose(bessel_kp(M, x), sp.kvp(M, x), rtol=1e-12)


@pytest.mark.parametrize("M", [0, 1, 3])
def test_bessel_k_logderiv_beyond_underflow(M):
    # scaled kve avoids the underflow that K itself hits past x ~ 700
    for x in (0.5, 20.0, 300.0, 2000.0):
        kve = lambda n: sp.kve(n, x)  # noqa: E731
        ref = -x * kve(1) / kve(0) if M == 0 else -0.5 * x * (kve(M - 1) + kve(M + 1)) / kve(M)
        assert bessel_k_logderiv(M, x) == pytest.approx(ref, rel=1e-12)


def test_bessel_k_domain():
    with pytest.raises(ValueError):
        bessel_k(0, 0.0)
    with pytest.raises(ValueError):
        bessel_k(-1, 1.0)


def test_find_root_and_brackets():
    r = find_root(math.cos, RootBracket.of(math.cos, 1.0, 2.0))
    assert r == pytest.approx(math.pi / 2, abs=1e-13)
    r = find_root(lambda x: x**3 - 2, RootBracket.of(lambda x: x**3 - 2, 0.0, 5.0))
    assert r == pytest.approx(2 ** (1 / 3), abs=1e-12)
    with pytest.raises(BracketError):
        RootBracket.of(math.cos, 0.0, 1.0)
    with pytest.raises(BracketError):
        RootBracket(2.0, 1.0, -1.0, 1.0)


@given(st.floats(-50, 50), st.floats(0.01, 20))
def test_find_root_brackets_linear_roots(c, width):
    f = lambda x: 3.0 * (x - c)  # noqa: E731
    r = find_root(f, RootBracket.of(f, c - width, c + 0.37 * width))
    assert abs(r - c) < 1e-12 * max(1.0, abs(c))


def test_bessel_zero_reference_values():
    assert bessel_zero(0, 1) == pytest.approx(2.4048255577, abs=1e-9)
    assert bessel_zero(1, 1) == pytest.approx(3.8317059702, abs=1e-9)


@pytest.mark.parametrize("M", [0, 1, 3, 7, 10])
def test_bessel_zero_matches_bisection(M):
    for a in (1, 2, 5, 10):
        assert bessel_zero(M, a) == pytest.approx(bessel_zero_bisect(M, a), abs=1e-11)
        np.testing.assert_allclose(sp.jn_zeros(M, a)[-1], bessel_zero(M, a), atol=1e-11)


def test_bessel_zero_interlacing():
    for M in range(11):
        for a in range(1, 11):
            x = bessel_zero(M, a)
            assert x < bessel_zero(M, a + 1)
            assert x < bessel_zero(M + 1, a) < bessel_zero(M, a + 1)


def test_bessel_zero_arguments():
    with pytest.raises(ValueError):
        bessel_zero(0, 0)


@pytest.mark.parametrize("n,l", [(1, 0), (2, 0), (2, 1), (3, 2), (4, 1)])
def test_hydrogen_radial_normalised(n, l):
    p = HydrogenParams(alpha=0.7, m=1.3)
    norm = quad_radial_norm(lambda r: hydrogen_radial(p, n, l, r), 60 * n * n * p.a_kappa)
    assert norm == pytest.approx(1.0, abs=1e-8)


def test_hydrogen_ground_state_closed_form():
    p = HydrogenParams(alpha=1.0)
    r = np.linspace(0.01, 10, 30)
    np.testing.assert_allclose(hydrogen_radial(p, 1, 0, r), 2 * np.exp(-r), rtol=1e-13)
    psi = hydrogen_wavefunction(p, 2, 1, 0, r, 0.3, 1.1)
    ref = r / math.sqrt(24) * np.exp(-r / 2) * math.sqrt(3 / (4 * math.pi)) * math.cos(0.3)
    np.testing.assert_allclose(psi, ref, rtol=1e-12)
    with pytest.raises(ValueError):
        hydrogen_wavefunction(p, 2, 2, 0, r, 0.3, 1.1)


def _zero_field_coeffs(nr, l, alpha=1.0, m=1.0):
    n = nr + l + 1
    E = -(alpha**2) * m / (2 * n * n)
    return -2 * m * E, 2 * m * alpha


@pytest.mark.parametrize("nr,l", [(0, 0), (1, 0), (0, 1), (2, 1), (1, 2)])
def test_nu_radial_reduces_to_hydrogen(nr, l):
    H0, H1 = _zero_field_coeffs(nr, l)
    r = np.linspace(0.05, 30, 80)
    nu = nu_radial(H0, H1, nr, r)
    h = hydrogen_radial(HydrogenParams(alpha=1.0), nr + l + 1, l, r)
    sign = np.sign(nu[0] * h[0])
    np.testing.assert_allclose(sign * nu, h, atol=1e-12)


@pytest.mark.parametrize("nr,H1,H2", [(0, 2.3, -2.0), (1, 1.7, -0.1), (2, 3.0, -6.2)])
def test_nu_radial_solves_its_equation(nr, H1, H2):
    # chi'' + (-H0 + H1/r + H2/r^2) chi = 0 with H0 fixed by the quantisation rule
    sqrt_H0 = H1 / (1 + 2 * nr + math.sqrt(1 - 4 * H2))
    H0 = sqrt_H0**2
    chi = lambda r: r * nu_radial(H0, H1, nr, r)  # noqa: E731
    r = np.linspace(0.3, 12, 60)
    h = 1e-3
    d2 = (chi(r + h) - 2 * chi(r) + chi(r - h)) / h**2
    resid = d2 + (-H0 + H1 / r + H2 / r**2) * chi(r)
    assert np.max(np.abs(resid)) < 1e-5 * np.max(np.abs(chi(r)))
    assert quad_radial_norm(lambda x: nu_radial(H0, H1, nr, x), 60 / sqrt_H0) == pytest.approx(1.0, abs=1e-6)


def test_nu_wavefunction_normalised_over_angles():
    H0, H1 = _zero_field_coeffs(1, 1)
    x, w = np.polynomial.legendre.leggauss(20)
    th = np.arccos(x)
    ang = nu_wavefunction(H0, H1, 1, 1, -1, 1.0, th) / nu_radial(H0, H1, 1, 1.0)
    assert 2 * math.pi * np.sum(w * ang**2) == pytest.approx(1.0, abs=1e-13)


def test_nu_normalisation_errors():
    with pytest.raises(NormalizationError):
        nu_radial(-1.0, 2.0, 0, 1.0)
    # u - n = -1: chi ~ 1/r near the origin
    with pytest.raises(NormalizationError) as info:
        nu_radial(1.0, 0.0, 1, 1.0)
    assert info.value.exponent == pytest.approx(-1.0)
