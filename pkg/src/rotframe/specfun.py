"""Special functions, Bessel zeros, bracketed root finding and explicit wavefunctions.

Everything here works in natural units (hbar = 1). The polynomial families
accept numpy arrays for ``x``/``u``; the Bessel routines are scalar at the
core and vectorise over array input.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy.special import roots_genlaguerre, roots_legendre

__all__ = [
    "HydrogenParams",
    "RootBracket",
    "BracketError",
    "NormalizationError",
    "assoc_laguerre",
    "assoc_legendre",
    "spherical_harmonic",
    "bessel_j",
    "bessel_jp",
    "bessel_k",
    "bessel_kp",
    "bessel_k_logderiv",
    "bessel_zero",
    "find_root",
    "hydrogen_radial",
    "hydrogen_wavefunction",
    "nu_radial",
    "nu_wavefunction",
]


class BracketError(ValueError):
    """A root bracket is malformed or does not straddle a sign change."""


class NormalizationError(ValueError):
    """A wavefunction cannot be normalised for the given parameters."""

    def __init__(self, msg: str, exponent: float | None = None):
        super().__init__(msg)
        self.exponent = exponent


# ---------------------------------------------------------------------------
# Orthogonal polynomials and spherical harmonics


def assoc_laguerre(k: int, a: int, x):
    """Generalised Laguerre polynomial L_k^a(x) by upward recurrence."""
    if k < 0 or a < 0:
        raise ValueError(f"assoc_laguerre needs k, a >= 0, got k={k}, a={a}")
    x = np.asarray(x, dtype=float)
    prev = np.ones_like(x)
    if k == 0:
        return prev[()] if prev.ndim == 0 else prev
    cur = 1.0 + a - x
    for j in range(1, k):
        prev, cur = cur, ((2 * j + 1 + a - x) * cur - (j + a) * prev) / (j + 1)
    return cur[()] if cur.ndim == 0 else cur


def assoc_legendre(l: int, m: int, u):
    """Associated Legendre function P_l^m(u) for 0 <= m <= l, without the (-1)^m phase."""
    if not 0 <= m <= l:
        raise ValueError(f"assoc_legendre needs 0 <= m <= l, got l={l}, m={m}")
    u = np.asarray(u, dtype=float)
    if np.any(np.abs(u) > 1.0):
        raise ValueError("assoc_legendre argument outside [-1, 1]")
    pmm = np.full_like(u, float(_double_factorial(2 * m - 1))) * (1.0 - u * u) ** (m / 2)
    if l == m:
        return pmm[()] if pmm.ndim == 0 else pmm
    pm1 = u * (2 * m + 1) * pmm
    for ll in range(m + 2, l + 1):
        pmm, pm1 = pm1, (u * (2 * ll - 1) * pm1 - (ll + m - 1) * pmm) / (ll - m)
    return pm1[()] if pm1.ndim == 0 else pm1


def _double_factorial(k: int) -> int:
    return math.prod(range(k, 0, -2)) if k > 0 else 1


def spherical_harmonic(l: int, m: int, theta, phi):
    """Orthonormal Y_l^m(theta, phi) with the Condon-Shortley phase."""
    if l < 0 or abs(m) > l:
        raise ValueError(f"spherical_harmonic needs |m| <= l, got l={l}, m={m}")
    am = abs(m)
    norm = math.sqrt((2 * l + 1) / (4 * math.pi) * math.factorial(l - am) / math.factorial(l + am))
    y = (-1) ** am * norm * assoc_legendre(l, am, np.cos(theta)) * np.exp(1j * am * np.asarray(phi))
    if m < 0:
        y = (-1) ** am * np.conj(y)
    return y


# ---------------------------------------------------------------------------
# Bessel functions

_SERIES_MAX_X = 8.0


def _jn_series(M: int, x: float) -> float:
    half = 0.5 * x
    term = half**M / math.factorial(M)
    total = term
    q = -half * half
    k = 0
    while True:
        k += 1
        term *= q / (k * (k + M))
        total += term
        if abs(term) <= 1e-17 * abs(total) or term == 0.0:
            return total


def _jn_miller(M: int, x: float) -> float:
    # Downward recurrence from well above max(M, x), normalised by
    # J_0 + 2 sum J_2k = 1.
    start = 2 * ((max(M, int(x)) + 20 + int(math.sqrt(40 * max(M, x)))) // 2)
    jp1, j = 0.0, 1e-300
    norm = 0.0
    target = 0.0
    for k in range(start, 0, -1):
        jm1 = 2 * k / x * j - jp1
        jp1, j = j, jm1
        if abs(j) > 1e250:
            j *= 1e-250
            jp1 *= 1e-250
            norm *= 1e-250
            target *= 1e-250
        if k - 1 == M:
            target = j
        if (k - 1) % 2 == 0 and k - 1 > 0:
            norm += 2 * j
    norm += j
    return target / norm


def _bessel_j_scalar(M: int, x: float) -> float:
    if x == 0.0:
        return 1.0 if M == 0 else 0.0
    if x <= _SERIES_MAX_X:
        return _jn_series(M, x)
    return _jn_miller(M, x)


def bessel_j(M: int, x):
    """Bessel function of the first kind J_M(x) for integer M >= 0 and x >= 0."""
    if M < 0:
        raise ValueError(f"bessel_j order must be >= 0, got {M}")
    xa = np.asarray(x, dtype=float)
    if np.any(xa < 0):
        raise ValueError("bessel_j argument must be >= 0")
    if xa.ndim == 0:
        return _bessel_j_scalar(M, float(xa))
    return np.array([_bessel_j_scalar(M, float(v)) for v in xa.ravel()]).reshape(xa.shape)


def bessel_jp(M: int, x):
    """Derivative J_M'(x)."""
    if M == 0:
        return -bessel_j(1, x)
    return 0.5 * (bessel_j(M - 1, x) - bessel_j(M + 1, x))


def _bessel_k_log(M: int, x: float) -> float:
    # log K_M(x) from K_M(x) = int_0^inf exp(-x cosh t) cosh(M t) dt. The
    # integrand is analytic in a strip, so the trapezoid rule converges
    # geometrically; summing relative to the peak keeps large x from underflowing.
    h = 0.05 * min(1.0, math.sqrt(60.0 / x))

    def log_f(t):
        # log cosh(M t) without overflow
        mt = M * t
        return -x * math.cosh(t) + mt + math.log1p(math.exp(-2 * mt)) - math.log(2.0)

    peak = math.asinh(M / x) if M > 0 else 0.0
    ref = log_f(peak)
    logs = []
    t = 0.0
    while True:
        v = log_f(t)
        logs.append(v)
        if t > peak and v < ref - 45.0:
            break
        t += h
    w = np.exp(np.array(logs) - ref)
    w[0] *= 0.5
    return ref + math.log(h * float(w.sum()))


def _bessel_k_scalar(M: int, x: float) -> float:
    return math.exp(_bessel_k_log(M, x))


def bessel_k_logderiv(M: int, x: float) -> float:
    """x K_M'(x) / K_M(x), finite even where K_M itself underflows."""
    if M < 0 or not x > 0:
        raise ValueError(f"bessel_k_logderiv needs M >= 0 and x > 0, got M={M}, x={x}")
    lk = _bessel_k_log(M, x)
    if M == 0:
        return -x * math.exp(_bessel_k_log(1, x) - lk)
    return -0.5 * x * (math.exp(_bessel_k_log(M - 1, x) - lk) + math.exp(_bessel_k_log(M + 1, x) - lk))


def bessel_k(M: int, x):
    """Modified Bessel function of the second kind K_M(x), M >= 0, x > 0."""
    if M < 0:
        raise ValueError(f"bessel_k order must be >= 0, got {M}")
    xa = np.asarray(x, dtype=float)
    if np.any(xa <= 0):
        raise ValueError("bessel_k argument must be > 0")
    if xa.ndim == 0:
        return _bessel_k_scalar(M, float(xa))
    return np.array([_bessel_k_scalar(M, float(v)) for v in xa.ravel()]).reshape(xa.shape)


def bessel_kp(M: int, x):
    """Derivative K_M'(x)."""
    if M == 0:
        return -bessel_k(1, x)
    return -0.5 * (bessel_k(M - 1, x) + bessel_k(M + 1, x))


# ---------------------------------------------------------------------------
# Root finding


@dataclass(frozen=True)
class RootBracket:
    lo: float
    hi: float
    f_lo: float
    f_hi: float

    def __post_init__(self):
        if not self.lo < self.hi:
            raise BracketError(f"bracket needs lo < hi, got [{self.lo}, {self.hi}]")
        if (self.f_lo > 0 and self.f_hi > 0) or (self.f_lo < 0 and self.f_hi < 0):
            raise BracketError(f"no sign change on [{self.lo}, {self.hi}]: f = {self.f_lo}, {self.f_hi}")

    @classmethod
    def of(cls, f: Callable[[float], float], lo: float, hi: float) -> RootBracket:
        return cls(lo, hi, f(lo), f(hi))


def find_root(f: Callable[[float], float], bracket: RootBracket, tol: float = 1e-13) -> float:
    """Locate a root of ``f`` inside ``bracket`` until the bracket is narrower than ``tol``.

    Illinois-modified regula falsi; whenever a step fails to halve the
    bracket a plain bisection step is taken, so convergence is guaranteed.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    a, b, fa, fb = bracket.lo, bracket.hi, bracket.f_lo, bracket.f_hi
    if fa == 0:
        return a
    if fb == 0:
        return b
    side = 0
    for _ in range(500):
        width = b - a
        if width < tol:
            break
        # sign tests instead of products: f values near the root may underflow
        denom = fb - fa
        c = (a * fb - b * fa) / denom if denom != 0 else 0.5 * (a + b)
        if not a < c < b:
            c = 0.5 * (a + b)
        fc = f(c)
        if fc == 0:
            return c
        if (fa < 0) != (fc < 0):
            b, fb = c, fc
            if side == -1:
                fa *= 0.5
            side = -1
        else:
            a, fa = c, fc
            if side == 1:
                fb *= 0.5
            side = 1
        if b - a > 0.5 * width:
            m = 0.5 * (a + b)
            fm = f(m)
            if fm == 0:
                return m
            if (fa < 0) != (fm < 0):
                b, fb = m, fm
            else:
                a, fa = m, fm
            side = 0
    # Return the endpoint with the smaller residual.
    return a if abs(fa) <= abs(fb) else b


@lru_cache(maxsize=2048)
def bessel_zero(M: int, a: int) -> float:
    """The a-th positive zero of J_M, located by a sign-change scan and :func:`find_root`."""
    if M < 0 or a < 1:
        raise ValueError(f"bessel_zero needs M >= 0 and a >= 1, got M={M}, a={a}")
    step = 0.25
    x = max(float(M), 0.5)
    fx = _bessel_j_scalar(M, x)
    found = 0
    while x < M + 4 * a + 10 * (a + 2):
        x1 = x + step
        f1 = _bessel_j_scalar(M, x1)
        if fx * f1 <= 0:
            found += 1
            if found == a:
                return find_root(lambda t: _bessel_j_scalar(M, t), RootBracket(x, x1, fx, f1), 1e-14)
        x, fx = x1, f1
    raise RuntimeError(f"bessel_zero: no bracket found for M={M}, a={a}")


# ---------------------------------------------------------------------------
# Explicit wavefunctions


@dataclass(frozen=True)
class HydrogenParams:
    """Coulomb problem parameters; ``kappa = |Q_p Q_N|`` is kept for bookkeeping."""

    alpha: float
    m: float = 1.0
    Q_p: float = 1.0
    Q_N: float = 1.0

    def __post_init__(self):
        if self.alpha <= 0 or self.m <= 0:
            raise ValueError("alpha and m must be positive")

    @property
    def a_kappa(self) -> float:
        return 1.0 / (self.m * self.alpha)

    @property
    def kappa(self) -> float:
        return abs(self.Q_p * self.Q_N)


def _check_nlm(n: int, l: int, m: int) -> None:
    if not (n >= 1 and 0 <= l < n and abs(m) <= l):
        raise ValueError(f"invalid hydrogen quantum numbers (n, l, m) = ({n}, {l}, {m})")


def _hydrogen_shape(p: HydrogenParams, n: int, l: int, r):
    rho = 2.0 * np.asarray(r, dtype=float) / (n * p.a_kappa)
    return np.exp(-rho / 2) * rho**l * assoc_laguerre(n - l - 1, 2 * l + 1, rho)


@lru_cache(maxsize=256)
def _hydrogen_norm(p: HydrogenParams, n: int, l: int) -> float:
    # r = n a rho / 2 turns int R^2 r^2 dr into a Gauss-Laguerre integral;
    # the polynomial part has degree 2n, so n + 2 nodes are exact.
    x, w = np.polynomial.laguerre.laggauss(n + 2)
    poly = x ** (2 * l + 2) * assoc_laguerre(n - l - 1, 2 * l + 1, x) ** 2
    integral = float(w @ poly) * (n * p.a_kappa / 2) ** 3
    return 1.0 / math.sqrt(integral)


def hydrogen_radial(p: HydrogenParams, n: int, l: int, r):
    """Normalised radial function R_nl(r), with int R^2 r^2 dr = 1."""
    _check_nlm(n, l, 0)
    return _hydrogen_norm(p, n, l) * _hydrogen_shape(p, n, l, r)


def hydrogen_wavefunction(p: HydrogenParams, n: int, l: int, m: int, r, theta, phi):
    """Normalised hydrogen-like eigenfunction psi_nlm(r, theta, phi)."""
    _check_nlm(n, l, m)
    if np.any(np.asarray(r) < 0):
        raise ValueError("r must be non-negative")
    return hydrogen_radial(p, n, l, r) * spherical_harmonic(l, m, theta, phi)


def _nu_terms(H0: float, H1: float, n: int) -> tuple[float, float, list[float]]:
    """Expand the Rodrigues expression as exp(-sqrt(H0) r) r^lead sum_j c_j r^j.

    With x = 1/r the operator -r^2 d/dr is d/dx, and the bracket reads
    x^(2n - 2u) exp(-2 sqrt(H0) x^-1) where u = H1 / (2 sqrt(H0)). Each
    d/dx maps x^q e^(-c/x) to q x^(q-1) e^(-c/x) + c x^(q-2) e^(-c/x).
    """
    k = math.sqrt(H0)
    u = H1 / (2 * k)
    p = 2 * n - 2 * u
    # coeffs[j] multiplies x^(p - n - j), j = 0..n, after n derivatives
    coeffs = {0: 1.0}  # offset d -> coefficient of x^(p - d)
    for _ in range(n):
        nxt: dict[int, float] = {}
        for d, c in coeffs.items():
            q = p - d
            nxt[d + 1] = nxt.get(d + 1, 0.0) + c * q
            nxt[d + 2] = nxt.get(d + 2, 0.0) + c * 2 * k
        coeffs = nxt
    # prefactor x^u e^(+k/x); total power of x is u + p - d = 2n - u - d,
    # i.e. r^(u - 2n + d) for d = n..2n.
    lead = u - n
    poly = [coeffs.get(n + j, 0.0) for j in range(n + 1)]
    return k, lead, poly


def _nu_shape(H0: float, H1: float, n: int, r):
    k, lead, poly = _nu_terms(H0, H1, n)
    r = np.asarray(r, dtype=float)
    return np.exp(-k * r) * r**lead * np.polynomial.polynomial.polyval(r, poly)


@lru_cache(maxsize=256)
def _nu_radial_norm(H0: float, H1: float, n: int) -> float:
    k, lead, poly = _nu_terms(H0, H1, n)
    alpha = 2 * lead
    if alpha <= -1:
        raise NormalizationError(
            f"NU wavefunction behaves as r^{lead:g} near the origin and is not square integrable",
            exponent=lead,
        )
    # s = 2 k r: int chi^2 dr = (2k)^-(alpha+1) int s^alpha e^-s P(s/2k)^2 ds
    x, w = roots_genlaguerre(n + 2, alpha)
    vals = np.polynomial.polynomial.polyval(x / (2 * k), poly) ** 2
    integral = float(w @ vals) / (2 * k) ** (alpha + 1)
    return 1.0 / math.sqrt(integral)


@lru_cache(maxsize=256)
def _legendre_norm(l: int, am: int) -> float:
    x, w = roots_legendre(l + 2)
    return 1.0 / math.sqrt(2 * math.pi * float(w @ assoc_legendre(l, am, x) ** 2))


def nu_radial(H0: float, H1: float, n: int, r):
    """Normalised radial factor R(r) = chi(r)/r of the NU solution (int R^2 r^2 dr = 1)."""
    if H0 <= 0:
        raise NormalizationError(f"NU wavefunction needs H0 > 0, got H0={H0}")
    if n < 0:
        raise ValueError("n must be >= 0")
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0):
        raise ValueError("r must be positive")
    return _nu_radial_norm(float(H0), float(H1), n) * _nu_shape(H0, H1, n, r) / r


def nu_wavefunction(H0: float, H1: float, n: int, l: int, m: int, r, theta):
    """Bound-state wavefunction from the Nikiforov-Uvarov Rodrigues formula.

    ``n`` counts radial nodes. The angular factor is (-1)^m P_l^|m|(cos theta);
    the result is normalised over r, theta and phi (no phi dependence).
    Raises NormalizationError when H0 <= 0 or the small-r power is not
    square integrable.
    """
    if abs(m) > l:
        raise ValueError(f"|m| <= l required, got l={l}, m={m}")
    radial = nu_radial(H0, H1, n, r)
    ang = (-1) ** m * _legendre_norm(l, abs(m)) * assoc_legendre(l, abs(m), np.cos(theta))
    return radial * ang
