"""Density matrices on coupled bases and their active, passive and brute-force evolution.

Sign convention: rho(t) = exp(+iHt) rho(0) exp(-iHt), so element (i, j)
picks up exp(i (E_i - E_j) t) under a diagonal Hamiltonian.
"""

from __future__ import annotations

from dataclasses import InitVar, dataclass, field
from typing import Sequence

import numpy as np

from .angmo import CoupledLabel, GeneratorSet, coupling_matrix, twice
from .spectra import RotationSpec, SpectrumEntry

__all__ = [
    "PHASE_CONVENTION",
    "DensityMatrix",
    "InitialCoefficients",
    "build_rho0",
    "product_state",
    "evolve_active",
    "evolve_passive",
    "oracle_evolve",
    "trace_distance",
]

PHASE_CONVENTION = "rho(t) = exp(+iHt) rho(0) exp(-iHt)"

HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-12
PSD_TOL = 1e-10


def _check_state(a: np.ndarray, what: str, psd_tol: float = PSD_TOL) -> None:
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"{what}: expected a square matrix, got shape {a.shape}")
    herm = np.max(np.abs(a - a.conj().T)) if a.size else 0.0
    if herm > HERMITIAN_TOL:
        raise ValueError(f"{what}: not Hermitian (max |A - A^H| = {herm:.3g})")
    tr = np.trace(a).real
    if abs(tr - 1) > TRACE_TOL:
        raise ValueError(f"{what}: trace {tr!r} != 1")
    wmin = np.linalg.eigvalsh(a).min()
    if wmin < -psd_tol:
        raise ValueError(f"{what}: not positive semidefinite (min eigenvalue {wmin:.3g})")


@dataclass(frozen=True)
class DensityMatrix:
    basis: tuple[CoupledLabel, ...]
    elements: np.ndarray = field(repr=False)
    time: float = 0.0
    check: InitVar[bool] = True

    def __post_init__(self, check: bool):
        basis = tuple(self.basis)
        a = np.array(self.elements, dtype=complex)
        if a.shape != (len(basis), len(basis)):
            raise ValueError(f"elements shape {a.shape} does not match basis size {len(basis)}")
        if len(set(basis)) != len(basis):
            raise ValueError("duplicate labels in basis")
        if check:
            _check_state(a, "density matrix")
        a.setflags(write=False)
        object.__setattr__(self, "basis", basis)
        object.__setattr__(self, "elements", a)

    def __len__(self) -> int:
        return len(self.basis)

    def index(self, label: CoupledLabel) -> int:
        return self.basis.index(label)

    def element(self, row: CoupledLabel, col: CoupledLabel) -> complex:
        return complex(self.elements[self.index(row), self.index(col)])

    def with_elements(self, elements: np.ndarray, time: float) -> DensityMatrix:
        return DensityMatrix(self.basis, elements, time)


@dataclass(frozen=True)
class InitialCoefficients:
    """Spin density rho_{m1, m2} attached to a fixed orbital state |n, l, m_l>.

    ``rho`` is (2s+1) x (2s+1), rows and columns ordered m_s = s, s-1, ..., -s.
    """

    n: int
    l: int
    m_l: int
    s: float
    rho: np.ndarray = field(repr=False)

    def __post_init__(self):
        ts = twice(self.s)
        if self.n < 1 or not 0 <= self.l or abs(self.m_l) > self.l:
            raise ValueError(f"invalid orbital labels (n, l, m_l) = ({self.n}, {self.l}, {self.m_l})")
        rho = np.array(self.rho, dtype=complex)
        if rho.shape != (ts + 1, ts + 1):
            raise ValueError(f"rho must be {ts + 1}x{ts + 1} for s={self.s}, got {rho.shape}")
        _check_state(rho, "initial coefficients")
        rho.setflags(write=False)
        object.__setattr__(self, "rho", rho)


def build_rho0(c: InitialCoefficients) -> DensityMatrix:
    """Coupled-basis density matrix of |n l m_l><n l m_l| (x) rho_spin.

    Element (J1 M1, J2 M2) = sum_{m1, m2} C^{J1 M1}_{l m_l, s m1} C^{J2 M2}_{l m_l, s m2} rho_{m1 m2}.
    Basis order follows :func:`rotframe.angmo.couple_basis`.
    """
    coupled, product, U = coupling_matrix(c.n, c.l, c.s)
    ts = twice(c.s)
    # Product basis is ordered (m_l desc, m_s desc); pick the block of m_l.
    k0 = (c.l - c.m_l) * (ts + 1)
    C = U[:, k0 : k0 + ts + 1]
    rho = C @ c.rho @ C.T
    return DensityMatrix(tuple(coupled), rho, 0.0)


def product_state(multiplets: Sequence[tuple[int, int, float, float]], F: np.ndarray, G: np.ndarray) -> DensityMatrix:
    """State rho[(K, M), (K', M')] = F[K, K'] G[M, M'] over multiplets sharing one J.

    ``multiplets`` lists (n, l, s, J); G is indexed by M = J, J-1, ..., -J.
    F and G must be Hermitian PSD; the result is normalised to unit trace.
    """
    keys = [(int(n), int(l), twice(s), twice(J)) for n, l, s, J in multiplets]
    tJ = {k[3] for k in keys}
    if len(tJ) != 1:
        raise ValueError("product_state needs multiplets with a common J")
    tJ = tJ.pop()
    F = np.asarray(F, dtype=complex)
    G = np.asarray(G, dtype=complex)
    if F.shape != (len(keys), len(keys)) or G.shape != (tJ + 1, tJ + 1):
        raise ValueError("F or G has the wrong shape")
    basis = tuple(CoupledLabel(n, l, ts, tj, tm) for n, l, ts, tj in keys for tm in range(tj, -tj - 1, -2))
    rho = np.kron(F, G)
    rho = rho / np.trace(rho).real
    return DensityMatrix(basis, rho, 0.0)


def _energies(rho: DensityMatrix, spectrum: Sequence[SpectrumEntry]) -> np.ndarray:
    table = {e.label: e.E for e in spectrum if e.label is not None}
    E = np.empty(len(rho.basis))
    for i, lab in enumerate(rho.basis):
        try:
            E[i] = table[lab]
        except KeyError:
            raise ValueError(f"no spectrum entry for basis label {lab}") from None
    return E


def evolve_active(rho0: DensityMatrix, spectrum: Sequence[SpectrumEntry], t: float) -> DensityMatrix:
    """Evolve under the diagonal Hamiltonian given by ``spectrum``: element (i, j) gains exp(i (E_i - E_j) t)."""
    E = _energies(rho0, spectrum)
    phase = np.exp(1j * np.subtract.outer(E, E) * t)
    return rho0.with_elements(rho0.elements * phase, rho0.time + t)


def evolve_passive(rho0: DensityMatrix, generators: GeneratorSet, rot: RotationSpec, t: float) -> DensityMatrix:
    """Rotating-detector picture: rho(t) = exp(+i Jz omega t) rho0 exp(-i Jz omega t)."""
    if tuple(generators.basis) != rho0.basis:
        raise ValueError("generator basis does not match the density matrix basis")
    Jz = generators.Jz
    if np.any(np.abs(Jz - np.diag(np.diag(Jz))) > 0):
        raise ValueError("Jz must be diagonal on the coupled basis")
    M = np.diag(Jz).real
    phase = np.exp(1j * np.subtract.outer(M, M) * rot.omega_z * t)
    return rho0.with_elements(rho0.elements * phase, rho0.time + t)


def oracle_evolve(rho0: DensityMatrix, H: np.ndarray, t: float) -> DensityMatrix:
    """Brute-force rho(t) = U rho0 U^H with U = exp(+iHt) from the spectral decomposition of H."""
    H = np.asarray(H, dtype=complex)
    if H.shape != rho0.elements.shape:
        raise ValueError(f"H has shape {H.shape}, expected {rho0.elements.shape}")
    herm = np.max(np.abs(H - H.conj().T))
    if herm > 1e-10:
        raise ValueError(f"H is not Hermitian (max |H - H^H| = {herm:.3g})")
    w, V = np.linalg.eigh(0.5 * (H + H.conj().T))
    U = (V * np.exp(1j * w * t)) @ V.conj().T
    rho = U @ rho0.elements @ U.conj().T
    return rho0.with_elements(rho, rho0.time + t)


def trace_distance(rho1: DensityMatrix, rho2: DensityMatrix) -> float:
    """Half the sum of singular values of rho1 - rho2."""
    if rho1.basis != rho2.basis:
        raise ValueError("trace_distance needs density matrices on the same basis")
    s = np.linalg.svd(rho1.elements - rho2.elements, compute_uv=False)
    return float(0.5 * s.sum())
