"""Deciding whether active and passive rotations agree.

Two independent verdicts are produced: a predictor (the rotation-stripped
Hamiltonian must commute with the rotation generators, i.e. be degenerate
in M within every multiplet) and a dynamical comparison of the two
evolutions of a concrete initial state.
"""

from __future__ import annotations

import itertools
import math
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Literal, Sequence

import numpy as np

from .angmo import GeneratorSet
from .evolution import PHASE_CONVENTION, DensityMatrix, evolve_active, evolve_passive, trace_distance
from .spectra import RotationSpec, SpectrumEntry

__all__ = [
    "Verdict",
    "DEFAULT_TOL",
    "CriterionInput",
    "EquivalenceReport",
    "check_criterion",
    "commutator_criterion",
    "compare_evolutions",
    "default_times",
    "passive_partner",
    "shared_energies",
    "wigner_eckart_check",
]

Verdict = Literal["equivalent", "not-equivalent"]

DEFAULT_TOL = 1e-9


def _verdict(ok: bool) -> Verdict:
    return "equivalent" if ok else "not-equivalent"


@dataclass(frozen=True)
class CriterionInput:
    """Spectrum grouped into multiplets plus the rate whose -M * rate term is removed."""

    spectrum: tuple[SpectrumEntry, ...]
    omega_eff: float

    def __post_init__(self):
        object.__setattr__(self, "spectrum", tuple(self.spectrum))
        for e in self.spectrum:
            if e.label is None:
                raise ValueError("criterion needs spectrum entries carrying coupled labels")

    def multiplets(self) -> dict[tuple, list[SpectrumEntry]]:
        groups: dict[tuple, list[SpectrumEntry]] = defaultdict(list)
        for e in self.spectrum:
            groups[e.label.multiplet].append(e)
        for key, entries in groups.items():
            tj = key[3]
            have = {e.label.two_m for e in entries}
            missing = [tm for tm in range(tj, -tj - 1, -2) if tm not in have]
            if missing:
                n, l, ts, _ = key
                raise ValueError(
                    f"multiplet n={n}, l={l}, s={ts / 2}, J={tj / 2} is missing M={missing[0] / 2}"
                )
        return dict(groups)


def _spreads(inp: CriterionInput) -> dict[tuple, float]:
    out = {}
    for key, entries in sorted(inp.multiplets().items()):
        e0 = [e.E + e.M * inp.omega_eff for e in entries]
        out[key] = max(e0) - min(e0)
    return out


def check_criterion(inp: CriterionInput, tol: float = DEFAULT_TOL) -> tuple[Verdict, float]:
    """Verdict from the M-spread of E0 = E + M omega_eff inside each multiplet."""
    spreads = _spreads(inp)
    worst = max(spreads.values()) if spreads else 0.0
    return _verdict(worst < tol), worst


def commutator_criterion(
    H: np.ndarray, generators: GeneratorSet, omega_eff: float, tol: float = DEFAULT_TOL
) -> tuple[Verdict, float]:
    """Matrix form of the criterion: max_a ||[J_a, H + omega_eff Jz]||_max.

    Only meaningful on bases closed under the ladder operators.
    """
    H0 = np.asarray(H, dtype=complex) + omega_eff * generators.Jz
    worst = 0.0
    for J in (generators.Jx, generators.Jy, generators.Jz):
        worst = max(worst, float(np.max(np.abs(J @ H0 - H0 @ J))))
    return _verdict(worst < tol), worst


def default_times(omega: float, count: int = 64, periods: float = 5.0) -> np.ndarray:
    """``count`` evenly spaced times over ``periods`` rotation periods (one unit if omega = 0)."""
    span = periods * 2 * math.pi / abs(omega) if omega else periods
    return np.linspace(0.0, span, count)


@dataclass(frozen=True)
class EquivalenceReport:
    family: str
    verdict_criterion: Verdict
    verdict_dynamical: Verdict
    max_trace_distance: float
    max_element_phase_error: float
    times_sampled: tuple[float, ...]
    tolerance: float
    convention: str
    omega_eff: float
    criterion_spread: float
    trace_distances: tuple[float, ...] = ()
    block_spreads: dict[str, float] = field(default_factory=dict)
    verdicts_agree: bool = True
    cross_multiplet_coherence: bool = False
    phase_convention: str = PHASE_CONVENTION

    def as_dict(self) -> dict:
        return {
            "family": self.family,
            "verdict_criterion": self.verdict_criterion,
            "verdict_dynamical": self.verdict_dynamical,
            "verdicts_agree": self.verdicts_agree,
            "max_trace_distance": self.max_trace_distance,
            "max_element_phase_error": self.max_element_phase_error,
            "criterion_spread": self.criterion_spread,
            "block_spreads": dict(self.block_spreads),
            "omega_eff": self.omega_eff,
            "tolerance": self.tolerance,
            "convention": self.convention,
            "phase_convention": self.phase_convention,
            "cross_multiplet_coherence": self.cross_multiplet_coherence,
            "times_sampled": list(self.times_sampled),
            "trace_distances": list(self.trace_distances),
        }


def _block_name(key: tuple) -> str:
    n, l, ts, tj = key
    return f"n={n},l={l},s={ts / 2:g},J={tj / 2:g}"


def shared_energies(basis, spectrum: Sequence[SpectrumEntry], omega_eff: float) -> np.ndarray:
    """Per basis state, the M-average of E + M omega_eff over its multiplet.

    This part of the rotation-stripped Hamiltonian commutes with J and is
    carried by both pictures; it only matters for coherences between
    multiplets with different energies.
    """
    groups = CriterionInput(tuple(spectrum), omega_eff).multiplets()
    mean = {k: float(np.mean([e.E + e.M * omega_eff for e in v])) for k, v in groups.items()}
    try:
        return np.array([mean[lab.multiplet] for lab in basis])
    except KeyError as exc:
        raise ValueError(f"no spectrum entries for multiplet {exc.args[0]}") from None


def passive_partner(
    rho0: DensityMatrix,
    generators: GeneratorSet,
    rot: RotationSpec,
    omega_eff: float,
    t: float,
    spectrum: Sequence[SpectrumEntry] | None = None,
) -> DensityMatrix:
    """Passive evolution paired with the active one at time t under the frame convention.

    With ``spectrum`` given, the shared multiplet energies of :func:`shared_energies`
    are applied on top of the detector rotation.
    """
    if rot.convention == "active-frame":
        out = evolve_passive(rho0, generators, RotationSpec(omega_eff, rot.convention), -t)
    else:
        out = evolve_passive(rho0, generators, RotationSpec(-omega_eff, rot.convention), t)
    if spectrum is None:
        return out
    Ebar = shared_energies(rho0.basis, spectrum, omega_eff)
    phase = np.exp(1j * np.subtract.outer(Ebar, Ebar) * t)
    return out.with_elements(out.elements * phase, rho0.time + t)


def compare_evolutions(
    rho0: DensityMatrix,
    spectrum: Sequence[SpectrumEntry],
    generators: GeneratorSet,
    rot: RotationSpec,
    times: Sequence[float],
    tol: float = DEFAULT_TOL,
    omega_eff: float | None = None,
) -> EquivalenceReport:
    """Run both evolutions over ``times`` and the criterion; report verdicts and discrepancies.

    ``omega_eff`` is the passive rotation rate (defaults to ``rot.omega_z``).
    """
    times = [float(t) for t in times]
    if not times:
        raise ValueError("compare_evolutions needs at least one time")
    if tuple(generators.basis) != rho0.basis:
        raise ValueError("generator basis does not match the density matrix basis")
    w = rot.omega_z if omega_eff is None else float(omega_eff)
    inp = CriterionInput(tuple(spectrum), w)
    verdict_c, spread = check_criterion(inp, tol)
    blocks = {_block_name(k): v for k, v in _spreads(inp).items()}

    mask = np.abs(rho0.elements) > 1e-14
    dists = []
    worst_phase = 0.0
    for t in times:
        act = evolve_active(rho0, spectrum, t)
        pas = passive_partner(rho0, generators, rot, w, t, spectrum)
        dists.append(trace_distance(act, pas))
        if mask.any():
            ratio = act.elements[mask] / pas.elements[mask]
            worst_phase = max(worst_phase, float(np.max(np.abs(np.angle(ratio)))))
    max_td = max(dists)
    verdict_d = _verdict(max_td < tol)

    groups = [(lab.n, lab.l, lab.two_s) for lab in rho0.basis]
    cross = any(
        mask[i, j] and groups[i] != groups[j] for i in range(len(groups)) for j in range(len(groups))
    )
    families = {e.family for e in spectrum}
    return EquivalenceReport(
        family=families.pop() if len(families) == 1 else "mixed",
        verdict_criterion=verdict_c,
        verdict_dynamical=verdict_d,
        max_trace_distance=max_td,
        max_element_phase_error=worst_phase,
        times_sampled=tuple(times),
        tolerance=tol,
        convention=rot.convention,
        omega_eff=w,
        criterion_spread=spread,
        trace_distances=tuple(dists),
        block_spreads=blocks,
        verdicts_agree=verdict_c == verdict_d,
        cross_multiplet_coherence=cross,
    )


def wigner_eckart_check(rho: DensityMatrix, tol: float = DEFAULT_TOL) -> tuple[bool, float]:
    """Test whether rho[(K, M), (K', M')] = F(K, K') G(M, M') over multiplets K = (n, l, s, J).

    Each ordered pair of multiplets gives a block vector over (M, M'). The
    state factorises iff all non-negligible block vectors are mutually
    proportional on their common (M, M') support; the residual is the worst
    sigma_2 / sigma_1 over pairs.
    """
    a = rho.elements
    positions: dict[tuple, dict[int, int]] = defaultdict(dict)
    for i, lab in enumerate(rho.basis):
        positions[lab.multiplet][lab.two_m] = i
    keys = sorted(positions)
    scale = float(np.max(np.abs(a))) if a.size else 0.0
    blocks = []
    for k1, k2 in itertools.product(keys, keys):
        p1, p2 = positions[k1], positions[k2]
        vec = {(m1, m2): a[i, j] for m1, i in p1.items() for m2, j in p2.items()}
        norm = math.sqrt(sum(abs(v) ** 2 for v in vec.values()))
        if norm > 1e-12 * scale:
            blocks.append(vec)
    residual = 0.0
    for b1, b2 in itertools.combinations(blocks, 2):
        common = sorted(set(b1) & set(b2))
        if not common:
            continue
        mat = np.array([[b1[c] for c in common], [b2[c] for c in common]])
        s = np.linalg.svd(mat, compute_uv=False)
        if s[0] > 0:
            residual = max(residual, float(s[1] / s[0]) if len(s) > 1 else 0.0)
    return residual < tol, residual
