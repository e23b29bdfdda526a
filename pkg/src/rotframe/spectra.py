"""Energy spectra of the four rotating potential families, and a finite-difference radial oracle.

Units: hbar = 1. Rotation always enters as an additive -M * omega term
(shifted by the Zeeman-like Omega1 term for the magnetic family).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Literal, Mapping, Sequence, Union

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .angmo import CoupledLabel
from .specfun import RootBracket, bessel_j, bessel_jp, bessel_k_logderiv, bessel_zero, find_root

__all__ = [
    "Coulomb",
    "MagneticCoulomb",
    "CylWell",
    "CoulombWell",
    "PotentialSpec",
    "RotationSpec",
    "NUCoefficients",
    "SpectrumEntry",
    "FDSpectrum",
    "NoBoundStateError",
    "coulomb_energy",
    "magnetic_nu_coeffs",
    "magnetic_nu_energy",
    "magnetic_radial_potential",
    "well_slow_root",
    "well_slow_energy",
    "well_rapid_energy",
    "coulomb_well_energy",
    "radial_fd_solve",
    "effective_rate",
    "family_spectrum",
]


class NoBoundStateError(ValueError):
    """Requested bound state does not exist for the given parameters."""


def _positive(**kw):
    for k, v in kw.items():
        if not v > 0:
            raise ValueError(f"{k} must be positive, got {v}")


@dataclass(frozen=True)
class Coulomb:
    alpha: float
    m: float = 1.0
    family = "coulomb"

    def __post_init__(self):
        _positive(alpha=self.alpha, m=self.m)


@dataclass(frozen=True)
class MagneticCoulomb:
    """Coulomb potential plus a spin coupling to B(r) = (Omega1 + Omega2/r + Omega3/r^2) z."""

    alpha: float
    m: float = 1.0
    gamma: float = 1.0
    q: float = 1.0
    omega1: float = 0.0
    omega2: float = 0.0
    omega3: float = 0.0
    family = "magnetic"

    def __post_init__(self):
        _positive(alpha=self.alpha, m=self.m)

    @property
    def g(self) -> float:
        """Magnetic-moment prefactor gamma q / 2m."""
        return self.gamma * self.q / (2 * self.m)


@dataclass(frozen=True)
class CylWell:
    R: float
    U0: float
    m: float = 1.0
    k_z: float = 0.0
    regime: Literal["slow", "rapid"] = "slow"
    family = "cylwell"

    def __post_init__(self):
        _positive(R=self.R, U0=self.U0, m=self.m)
        if self.regime not in ("slow", "rapid"):
            raise ValueError(f"regime must be 'slow' or 'rapid', got {self.regime!r}")


def _identity_nprime(nprime: int, M: float, omega: float) -> float:
    return float(nprime)


@dataclass(frozen=True)
class CoulombWell:
    """Coulomb potential confined to a rotating cylindrical geometry.

    ``nprime_of_omega(nprime, M, omega)`` returns the effective quantum
    number entering the energy; the default ignores M and omega.
    """

    alpha: float
    m: float = 1.0
    nprime_of_omega: Callable[[int, float, float], float] = field(default=_identity_nprime, compare=False)
    family = "coulombwell"

    def __post_init__(self):
        _positive(alpha=self.alpha, m=self.m)


PotentialSpec = Union[Coulomb, MagneticCoulomb, CylWell, CoulombWell]


@dataclass(frozen=True)
class RotationSpec:
    """Rotation about z with angular velocity ``omega_z``.

    ``convention`` fixes how passive evolutions are compared with active
    ones: ``"active-frame"`` compares rho_act(t) with rho_pas(-t),
    ``"passive-frame"`` with a detector turning the other way, rho_pas(t; -omega).
    """

    omega_z: float
    convention: Literal["active-frame", "passive-frame"] = "active-frame"

    def __post_init__(self):
        if not math.isfinite(self.omega_z):
            raise ValueError("omega_z must be finite")
        if self.convention not in ("active-frame", "passive-frame"):
            raise ValueError(f"unknown convention {self.convention!r}")


@dataclass(frozen=True)
class NUCoefficients:
    H0: float
    H1: float
    H2: float


@dataclass(frozen=True)
class SpectrumEntry:
    family: str
    n: int
    M: float
    E: float
    label: CoupledLabel | None = None
    k_z: float | None = None
    derived: Mapping[str, float] = field(default_factory=dict)

    def __post_init__(self):
        if not math.isfinite(self.E):
            raise ValueError(f"non-finite energy for n={self.n}, M={self.M}")


def _check_half(M) -> float:
    if abs(2 * M - round(2 * M)) > 1e-9:
        raise ValueError(f"M={M} is not a half-integer")
    return float(M)


def _check_int(M) -> int:
    if abs(M - round(M)) > 1e-9:
        raise ValueError(f"cylindrical well needs integer M (Bessel order), got M={M}")
    return int(round(M))


# ---------------------------------------------------------------------------
# Analytic spectra


def coulomb_energy(p: Coulomb, n: int, M, rot: RotationSpec, label: CoupledLabel | None = None) -> SpectrumEntry:
    """E = -alpha^2 m / (2 n^2) - omega_z M."""
    if n < 1:
        raise ValueError(f"principal number must be >= 1, got {n}")
    M = _check_half(M)
    E = -p.alpha**2 * p.m / (2 * n**2) - rot.omega_z * M
    return SpectrumEntry("coulomb", n, M, E, label)


def magnetic_nu_coeffs(p: MagneticCoulomb, M_j, l: int, rot: RotationSpec, E: float) -> NUCoefficients:
    """Coefficients of chi'' + (-H0 + H1/r + H2/r^2) chi = 0 for the magnetic radial problem."""
    M_j = _check_half(M_j)
    g = p.g
    H0 = -2 * p.m * (rot.omega_z * M_j + g * M_j * p.omega1 + E)
    H1 = 2 * p.m * (p.alpha + g * M_j * p.omega2)
    H2 = 2 * p.m * (g * M_j * p.omega3 - l * (l + 1) / (2 * p.m))
    return NUCoefficients(H0, H1, H2)


def magnetic_nu_energy(
    p: MagneticCoulomb, n: int, l: int, M_j, rot: RotationSpec, label: CoupledLabel | None = None
) -> SpectrumEntry:
    """Bound-state energy of the magnetic family; ``n`` counts radial nodes.

    E = -2m [(alpha + g M_j Omega2) / (1 + 2n + sqrt(1 - 4(gamma q M_j Omega3 - l(l+1))))]^2
        - M_j (omega_z + g Omega1),   g = gamma q / 2m.
    """
    if n < 0 or l < 0:
        raise ValueError(f"need n >= 0 and l >= 0, got n={n}, l={l}")
    M_j = _check_half(M_j)
    disc = 1 - 4 * (p.gamma * p.q * M_j * p.omega3 - l * (l + 1))
    if disc < 0:
        raise NoBoundStateError(f"no NU bound state: discriminant {disc} < 0")
    strength = p.alpha + p.g * M_j * p.omega2
    if strength <= 0:
        raise NoBoundStateError(f"no NU bound state: effective Coulomb strength {strength} <= 0")
    root = math.sqrt(disc)
    binding = -2 * p.m * (strength / (1 + 2 * n + root)) ** 2
    shift = M_j * (rot.omega_z + p.g * p.omega1)
    E = binding - shift
    derived = {"discriminant": disc, "sqrt_H0": 2 * p.m * strength / (1 + 2 * n + root)}
    return SpectrumEntry("magnetic", n, M_j, E, label, derived=derived)


def magnetic_radial_potential(p: MagneticCoulomb, M_j, l: int, rot: RotationSpec) -> Callable:
    """Effective potential V(r) of the reduced radial equation, centrifugal term included."""
    M_j = _check_half(M_j)
    g = p.g

    def V(r):
        r = np.asarray(r, dtype=float)
        return (
            l * (l + 1) / (2 * p.m * r**2)
            - p.alpha / r
            - rot.omega_z * M_j
            - g * M_j * (p.omega1 + p.omega2 / r + p.omega3 / r**2)
        )

    return V


def _slow_matching(M: int, xi: float) -> Callable[[float], float]:
    # y J_M'(y) - [z K_M'(z)/K_M(z)] J_M(y), z = sqrt(xi^2 - y^2): continuity of the
    # logarithmic derivative at r = R, multiplied through by J_M(y) to remove poles.
    def F(y: float) -> float:
        z = math.sqrt(max(xi * xi - y * y, 0.0))
        ratio = bessel_k_logderiv(M, z)
        return y * bessel_jp(M, y) - ratio * bessel_j(M, y)

    return F


def well_slow_root(p: CylWell, M: int, n: int) -> float:
    """The n-th interior matching root y (interior wave J_M(y r / R)), ascending."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    M = abs(_check_int(M))
    xi = p.R * math.sqrt(2 * p.m * p.U0)
    F = _slow_matching(M, xi)
    step = min(0.02, xi / 200)
    y_end = xi * (1 - 1e-12)
    y = step / 4
    fy = F(y)
    found = 0
    while y < y_end:
        y1 = min(y + step, y_end)
        f1 = F(y1)
        if fy * f1 < 0 or f1 == 0:
            found += 1
            if found == n:
                return find_root(F, RootBracket(y, y1, fy, f1), 1e-13)
        y, fy = y1, f1
    raise NoBoundStateError(f"cylindrical well (M={M}) has fewer than {n} bound states; xi={xi:.6g}")


def _slow_ok(p: CylWell, rot: RotationSpec) -> None:
    if p.regime != "slow":
        raise ValueError("well_slow_energy needs a slow-regime well")
    if not p.R * abs(rot.omega_z) < 1:
        raise ValueError(f"slow regime requires R*omega < 1, got {p.R * abs(rot.omega_z)}")


def well_slow_energy(p: CylWell, M, n: int, rot: RotationSpec, label: CoupledLabel | None = None) -> SpectrumEntry:
    """Slowly rotating well: E = -y^2/(2 m R^2) - M lambda / R + k_z^2 / 2m.

    Here y = kappa R is the exterior decay parameter, y^2 = 2 m U0 R^2 - y_in^2,
    with y_in the interior matching root of :func:`well_slow_root`.
    """
    _slow_ok(p, rot)
    M = _check_int(M)
    y_in = well_slow_root(p, M, n)
    xi2 = 2 * p.m * p.U0 * p.R**2
    y = math.sqrt(max(xi2 - y_in**2, 0.0))
    lam = p.R * rot.omega_z
    E = -(y**2) / (2 * p.m * p.R**2) - M * lam / p.R + p.k_z**2 / (2 * p.m)
    if not E + M * rot.omega_z < 0:
        raise NoBoundStateError(
            f"state n={n}, M={M} has E + M omega = {E + M * rot.omega_z:.6g} >= 0 (not bound for k_z={p.k_z})"
        )
    kappa = math.sqrt(2 * p.m * (p.k_z**2 / (2 * p.m) + abs(E + M * rot.omega_z)))
    derived = {"y": y, "interior_root": y_in, "lambda": lam, "kappa": kappa}
    return SpectrumEntry("cylwell-slow", n, float(M), E, label, k_z=p.k_z, derived=derived)


def well_rapid_energy(p: CylWell, M, a: int, rot: RotationSpec, label: CoupledLabel | None = None) -> SpectrumEntry:
    """Rapidly rotating well: E = (omega^2 x_{|M|a}^2 + k_z^2) / 2m - U0 - M omega."""
    if p.regime != "rapid":
        raise ValueError("well_rapid_energy needs a rapid-regime well")
    if not p.R * abs(rot.omega_z) > 1:
        raise ValueError(f"rapid regime requires R*omega > 1, got {p.R * abs(rot.omega_z)}")
    if a < 1:
        raise ValueError(f"a must be >= 1, got {a}")
    M = _check_int(M)
    x = bessel_zero(abs(M), a)
    w = rot.omega_z
    E = (w**2 * x**2 + p.k_z**2) / (2 * p.m) - p.U0 - M * w
    return SpectrumEntry("cylwell-rapid", a, float(M), E, label, k_z=p.k_z, derived={"x": x, "lambda": p.R * w})


def coulomb_well_energy(
    p: CoulombWell, nprime: int, M, rot: RotationSpec, label: CoupledLabel | None = None
) -> SpectrumEntry:
    """E = -alpha^2 m / (2 (n'(omega) - 1/2)^2) - M omega, with |M| <= n' - 1."""
    if nprime < 1:
        raise ValueError(f"n' must be >= 1, got {nprime}")
    M = _check_half(M)
    if abs(M) > nprime - 1:
        raise ValueError(f"|M| <= n' - 1 violated: M={M}, n'={nprime}")
    neff = float(p.nprime_of_omega(nprime, M, rot.omega_z))
    if neff == 0.5:
        raise ValueError("effective n' = 1/2 gives a divergent energy")
    E = -p.alpha**2 * p.m / (2 * (neff - 0.5) ** 2) - M * rot.omega_z
    return SpectrumEntry("coulombwell", nprime, M, E, label, derived={"nprime_eff": neff})


def effective_rate(p: PotentialSpec, rot: RotationSpec) -> float:
    """Rate whose -M * rate term carries the whole M dependence induced by rotation."""
    if isinstance(p, MagneticCoulomb):
        return rot.omega_z + p.g * p.omega1
    return rot.omega_z


def family_spectrum(p: PotentialSpec, basis: Sequence[CoupledLabel], rot: RotationSpec) -> list[SpectrumEntry]:
    """Energies for every label of ``basis``.

    The label's ``n`` is the principal number (Coulomb, magnetic), the radial
    index (slow well), the Bessel-zero index a (rapid well) or n' (Coulomb well).
    """
    out = []
    for lab in basis:
        if isinstance(p, Coulomb):
            e = coulomb_energy(p, lab.n, lab.M, rot, lab)
        elif isinstance(p, MagneticCoulomb):
            nr = lab.n - lab.l - 1
            if nr < 0:
                raise ValueError(f"magnetic family needs l < n, got {lab}")
            e = magnetic_nu_energy(p, nr, lab.l, lab.M, rot, lab)
        elif isinstance(p, CylWell):
            if p.regime == "slow":
                e = well_slow_energy(p, lab.M, lab.n, rot, lab)
            else:
                e = well_rapid_energy(p, lab.M, lab.n, rot, lab)
        elif isinstance(p, CoulombWell):
            e = coulomb_well_energy(p, lab.n, lab.M, rot, lab)
        else:
            raise TypeError(f"unknown potential {p!r}")
        out.append(e)
    return out


# ---------------------------------------------------------------------------
# Finite-difference oracle


@dataclass(frozen=True)
class FDSpectrum:
    """Lowest eigenvalues on grids of N and 2N cells plus their Richardson extrapolation."""

    energies: np.ndarray
    coarse: np.ndarray
    fine: np.ndarray
    drift: float
    warning: str | None = None


def _fd_eigs(V, m: float, geometry: str, r_max: float, N: int, k: int, M: float) -> np.ndarray:
    # Cell-centred grid r_i = (i - 1/2) h with the outer wall at r_max = N h
    # (antisymmetric ghost cell). Potential jumps at multiples of h stay on faces
    # when N doubles.
    h = r_max / N
    r = (np.arange(1, N + 1) - 0.5) * h
    c = 1.0 / (2 * m * h * h)
    if geometry == "spherical":
        diag = np.full(N, 2 * c) + V(r)
        diag[0] += c  # chi(0) = 0
        diag[-1] += c
        off = np.full(N - 1, -c)
    elif geometry == "cylindrical":
        rp = r + h / 2
        rm = r - h / 2
        diag = c * (rp + rm) / r + V(r) + M * M / (2 * m * r * r)
        diag[-1] += c * rp[-1] / r[-1]
        off = -c * rp[:-1] / np.sqrt(r[:-1] * r[1:])
    else:
        raise ValueError(f"geometry must be 'spherical' or 'cylindrical', got {geometry!r}")
    return eigh_tridiagonal(diag, off, select="i", select_range=(0, k - 1))[0]


def radial_fd_solve(
    V_eff: Callable,
    m: float,
    geometry: Literal["spherical", "cylindrical"] = "spherical",
    r_max: float = 60.0,
    N: int = 4000,
    k: int = 1,
    M: float = 0,
    drift_tol: float = 1e-3,
) -> FDSpectrum:
    """Lowest ``k`` eigenvalues of a radial Schrodinger operator with hard walls.

    spherical: -(1/2m) chi'' + V_eff chi with chi(0) = chi(r_max) = 0; V_eff must
    include any centrifugal term. cylindrical: the 2D radial operator for angular
    number M, written in flux form so that the M = 0 case converges; it is
    similar to -(1/2m) u'' + [(M^2 - 1/4)/(2 m r^2) + V_eff] u for u = sqrt(r) f.

    Both N and 2N grids are solved and combined by Richardson extrapolation
    (the scheme is second order). ``warning`` is set if the N -> 2N drift
    exceeds ``drift_tol`` (relative to max(1, |E|)).
    """
    if N < 200:
        raise ValueError(f"N must be >= 200, got {N}")
    if k < 1:
        raise ValueError("k must be >= 1")
    _positive(m=m, r_max=r_max)
    coarse = _fd_eigs(V_eff, m, geometry, r_max, N, k, M)
    fine = _fd_eigs(V_eff, m, geometry, r_max, 2 * N, k, M)
    rich = (4 * fine - coarse) / 3
    drift = float(np.max(np.abs(fine - coarse) / np.maximum(1.0, np.abs(fine))))
    warning = None
    if drift > drift_tol:
        warning = f"eigenvalue drift {drift:.3g} between N={N} and 2N exceeds {drift_tol:g}; refine the grid"
    return FDSpectrum(rich, coarse, fine, drift, warning)
