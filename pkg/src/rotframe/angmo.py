"""Angular-momentum algebra on truncated coupled bases.

Half-integer quantum numbers are stored as twice their value (``two_s``,
``two_j``, ...) so labels compare exactly; the public properties return
floats for convenience.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from numbers import Real
from typing import Sequence

import numpy as np

__all__ = [
    "twice",
    "UncoupledLabel",
    "CoupledLabel",
    "GeneratorSet",
    "clebsch_gordan",
    "uncoupled_basis",
    "couple_basis",
    "coupling_matrix",
    "generator_matrices",
]


def twice(x: Real | Fraction) -> int:
    """Return ``2*x`` as an int, raising if ``x`` is not a half-integer."""
    v = 2 * x
    r = round(v)
    if abs(v - r) > 1e-9:
        raise ValueError(f"{x!r} is not an integer or half-integer")
    return int(r)


def _check_pair(name: str, tj: int, tm: int) -> None:
    if tj < 0:
        raise ValueError(f"{name}: negative angular momentum {tj / 2}")
    if (tj - tm) % 2:
        raise ValueError(f"{name}: projection {tm / 2} does not match parity of {tj / 2}")
    if abs(tm) > tj:
        raise ValueError(f"{name}: |{tm / 2}| exceeds {tj / 2}")


@dataclass(frozen=True, order=True)
class UncoupledLabel:
    """Product-basis state |n, l, m_l; s, m_s>."""

    n: int
    l: int
    m_l: int
    two_s: int
    two_ms: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"principal number must be positive, got {self.n}")
        _check_pair("orbital", 2 * self.l, 2 * self.m_l)
        _check_pair("spin", self.two_s, self.two_ms)

    @classmethod
    def make(cls, n: int, l: int, m_l: int, s, m_s) -> UncoupledLabel:
        return cls(int(n), int(l), int(m_l), twice(s), twice(m_s))

    @property
    def s(self) -> float:
        return self.two_s / 2

    @property
    def m_s(self) -> float:
        return self.two_ms / 2

    def __str__(self) -> str:
        return f"|{self.n},{self.l},{self.m_l};{_fmt(self.two_s)},{_fmt(self.two_ms)}>"


@dataclass(frozen=True, order=True)
class CoupledLabel:
    """Total-angular-momentum state |n, l, s; J, M>."""

    n: int
    l: int
    two_s: int
    two_j: int
    two_m: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"principal number must be positive, got {self.n}")
        if self.l < 0 or self.two_s < 0:
            raise ValueError("l and s must be non-negative")
        if not abs(2 * self.l - self.two_s) <= self.two_j <= 2 * self.l + self.two_s:
            raise ValueError(f"J={self.two_j / 2} violates the triangle rule for l={self.l}, s={self.two_s / 2}")
        if (self.two_j - 2 * self.l - self.two_s) % 2:
            raise ValueError(f"J={self.two_j / 2} not reachable from l={self.l}, s={self.two_s / 2}")
        _check_pair("total", self.two_j, self.two_m)

    @classmethod
    def make(cls, n: int, l: int, s, J, M) -> CoupledLabel:
        return cls(int(n), int(l), twice(s), twice(J), twice(M))

    @property
    def s(self) -> float:
        return self.two_s / 2

    @property
    def J(self) -> float:
        return self.two_j / 2

    @property
    def M(self) -> float:
        return self.two_m / 2

    @property
    def multiplet(self) -> tuple[int, int, int, int]:
        """Key shared by the 2J+1 states of one multiplet."""
        return (self.n, self.l, self.two_s, self.two_j)

    def __str__(self) -> str:
        return f"|n={self.n},l={self.l},s={_fmt(self.two_s)};J={_fmt(self.two_j)},M={_fmt(self.two_m)}>"


def _fmt(t: int) -> str:
    return str(t // 2) if t % 2 == 0 else f"{t}/2"


@lru_cache(maxsize=4096)
def _cg_twice(tj1: int, tm1: int, tj2: int, tm2: int, tJ: int, tM: int) -> float:
    # Racah's closed form, evaluated in exact rationals.
    if tm1 + tm2 != tM:
        return 0.0
    if not abs(tj1 - tj2) <= tJ <= tj1 + tj2 or (tj1 + tj2 - tJ) % 2:
        return 0.0
    f = math.factorial
    c = (tj1 + tj2 - tJ) // 2
    prefactor = Fraction(
        (tJ + 1) * f((tJ + tj1 - tj2) // 2) * f((tJ - tj1 + tj2) // 2) * f(c),
        f((tj1 + tj2 + tJ) // 2 + 1),
    )
    prefactor *= (
        f((tJ + tM) // 2) * f((tJ - tM) // 2)
        * f((tj1 - tm1) // 2) * f((tj1 + tm1) // 2)
        * f((tj2 - tm2) // 2) * f((tj2 + tm2) // 2)
    )
    e1 = (tj1 - tm1) // 2
    e2 = (tj2 + tm2) // 2
    e3 = (tJ - tj2 + tm1) // 2
    e4 = (tJ - tj1 - tm2) // 2
    total = Fraction(0)
    for k in range(max(0, -e3, -e4), min(c, e1, e2) + 1):
        term = Fraction(1, f(k) * f(c - k) * f(e1 - k) * f(e2 - k) * f(e3 + k) * f(e4 + k))
        total += -term if k % 2 else term
    if total == 0:
        return 0.0
    return math.copysign(math.sqrt(prefactor * total * total), total)


def clebsch_gordan(l: int, m_l, s, m_s, J, M) -> float:
    """Clebsch-Gordan coefficient <l m_l; s m_s | J M> (Condon-Shortley phase).

    Half-integer arguments may be floats, ints or Fractions. Returns 0 when
    the projections do not add up or J is outside the triangle rule; raises
    ValueError for malformed (l, m_l), (s, m_s) or (J, M) pairs.
    """
    if int(l) != l:
        raise ValueError(f"orbital l must be an integer, got {l!r}")
    tl, tml, ts, tms, tJ, tM = (twice(v) for v in (l, m_l, s, m_s, J, M))
    _check_pair("orbital", tl, tml)
    _check_pair("spin", ts, tms)
    _check_pair("total", tJ, tM)
    return _cg_twice(tl, tml, ts, tms, tJ, tM)


def uncoupled_basis(n: int, l: int, s) -> list[UncoupledLabel]:
    """Product states of one (l x s) multiplet, m_l then m_s descending."""
    ts = twice(s)
    return [
        UncoupledLabel(n, l, ml, ts, tms)
        for ml in range(l, -l - 1, -1)
        for tms in range(ts, -ts - 1, -2)
    ]


def couple_basis(n: int, l: int, s) -> list[tuple[CoupledLabel, dict[UncoupledLabel, float]]]:
    """Coupled states of the (l x s) multiplet with their product-basis expansions.

    States are ordered by J descending, then M descending. Each expansion maps
    product labels to the (non-zero) Clebsch-Gordan coefficients.
    """
    if n < 1 or l < 0:
        raise ValueError(f"invalid (n, l) = ({n}, {l})")
    ts = twice(s)
    if ts < 0:
        raise ValueError(f"negative spin {s!r}")
    product = uncoupled_basis(n, l, s)
    out = []
    for tJ in range(2 * l + ts, abs(2 * l - ts) - 1, -2):
        for tM in range(tJ, -tJ - 1, -2):
            label = CoupledLabel(n, l, ts, tJ, tM)
            expansion = {}
            for u in product:
                c = _cg_twice(2 * l, 2 * u.m_l, ts, u.two_ms, tJ, tM)
                if c != 0.0:
                    expansion[u] = c
            out.append((label, expansion))
    return out


def coupling_matrix(n: int, l: int, s) -> tuple[list[CoupledLabel], list[UncoupledLabel], np.ndarray]:
    """Dense change of basis ``U[i, k] = <uncoupled_k | coupled_i>``."""
    coupled = couple_basis(n, l, s)
    product = uncoupled_basis(n, l, s)
    index = {u: k for k, u in enumerate(product)}
    U = np.zeros((len(coupled), len(product)))
    for i, (_, expansion) in enumerate(coupled):
        for u, c in expansion.items():
            U[i, index[u]] = c
    return [lab for lab, _ in coupled], product, U


@dataclass(frozen=True)
class GeneratorSet:
    """Matrices of Jx, Jy, Jz (hbar = 1) on an ordered coupled basis."""

    basis: tuple[CoupledLabel, ...]
    Jx: np.ndarray = field(repr=False)
    Jy: np.ndarray = field(repr=False)
    Jz: np.ndarray = field(repr=False)

    @property
    def Jplus(self) -> np.ndarray:
        return self.Jx + 1j * self.Jy

    @property
    def Jminus(self) -> np.ndarray:
        return self.Jx - 1j * self.Jy

    def component(self, axis: str) -> np.ndarray:
        try:
            return {"x": self.Jx, "y": self.Jy, "z": self.Jz}[axis]
        except KeyError:
            raise ValueError(f"unknown axis {axis!r}") from None

    def rotation(self, angle: float, axis: str = "z") -> np.ndarray:
        """exp(-i angle J_axis), from the eigendecomposition of the Hermitian generator."""
        w, V = np.linalg.eigh(self.component(axis))
        return (V * np.exp(-1j * angle * w)) @ V.conj().T


def generator_matrices(basis: Sequence[CoupledLabel]) -> GeneratorSet:
    """Build Jx, Jy, Jz on ``basis``.

    J+/J- connect states of the same multiplet (n, l, s, J) through the usual
    ladder elements sqrt(J(J+1) - M(M+1)); basis states whose ladder partner
    is missing are simply truncated.
    """
    basis = tuple(basis)
    if not basis:
        raise ValueError("empty basis")
    index = {}
    for i, lab in enumerate(basis):
        if lab in index:
            raise ValueError(f"duplicate basis label {lab}")
        index[lab] = i
    dim = len(basis)
    Jz = np.diag([lab.M for lab in basis]).astype(complex)
    Jp = np.zeros((dim, dim), dtype=complex)
    for i, lab in enumerate(basis):
        up = CoupledLabel(lab.n, lab.l, lab.two_s, lab.two_j, lab.two_m + 2) if lab.two_m < lab.two_j else None
        if up is not None and up in index:
            J, M = lab.J, lab.M
            Jp[index[up], i] = math.sqrt(J * (J + 1) - M * (M + 1))
    Jm = Jp.conj().T
    Jx = (Jp + Jm) / 2
    Jy = (Jp - Jm) / 2j
    for a in (Jx, Jy, Jz):
        a.setflags(write=False)
    return GeneratorSet(basis, Jx, Jy, Jz)
