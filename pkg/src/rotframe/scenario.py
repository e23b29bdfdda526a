"""Declarative scenarios: YAML in, deterministic JSON/CSV reports out.

Scenario grammar (YAML mapping)::

    name: str
    potential:                      # required
      family: coulomb | magnetic | cylwell | coulombwell
      ...family parameters (see PARAMS below)
    rotation:                       # required
      omega_z: float
      convention: active-frame | passive-frame     # optional
    basis:                          # required
      n: int or list of int         # principal n, radial index, Bessel index a, or n'
      l: int
      s: half-integer (number or "1/2")
    initial:                        # required by evolve / compare
      n, l, m_l: int
      s: half-integer
      rho: (2s+1) x (2s+1) matrix; entries are numbers or [re, im] pairs
    times:                          # required by evolve / compare
      [t0, t1, ...]  or  {t_max: float, count: int}
    tolerances:                     # optional
      equivalence: 1.0e-9
      oracle: 1.0e-9                # analytic vs brute-force evolution (absolute)
      fd: 1.0e-4                    # analytic vs finite-difference energies (relative)
    outputs:                        # optional
      prefix: path/prefix
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Any, Sequence

import numpy as np
import yaml

from . import __version__
from .angmo import CoupledLabel, couple_basis, generator_matrices, twice
from .equivalence import (
    CriterionInput,
    EquivalenceReport,
    check_criterion,
    compare_evolutions,
    passive_partner,
    shared_energies,
)
from .evolution import PHASE_CONVENTION, DensityMatrix, InitialCoefficients, build_rho0, evolve_active, oracle_evolve
from .specfun import NormalizationError
from .spectra import (
    Coulomb,
    CoulombWell,
    CylWell,
    MagneticCoulomb,
    NoBoundStateError,
    PotentialSpec,
    RotationSpec,
    SpectrumEntry,
    coulomb_energy,
    effective_rate,
    family_spectrum,
    magnetic_radial_potential,
    radial_fd_solve,
)

__all__ = [
    "ScenarioError",
    "ScenarioParseError",
    "ScenarioValidationError",
    "SolverError",
    "OutputError",
    "Scenario",
    "ReportBundle",
    "SPECTRUM_HEADER",
    "EVOLUTION_HEADER",
    "bundled_scenarios",
    "bundled_scenario_path",
    "load_scenario",
    "run_scenario",
    "emit_outputs",
]

SPECTRUM_HEADER = ["family", "n", "l", "s", "J", "M", "extra_index", "k_z", "omega", "E"]
EVOLUTION_HEADER = [
    "t", "row_label", "col_label",
    "re_active", "im_active", "re_passive", "im_passive",
    "abs_diff", "trace_distance",
]


class ScenarioError(Exception):
    exit_code = 1


class ScenarioParseError(ScenarioError):
    exit_code = 3


class ScenarioValidationError(ScenarioError):
    exit_code = 4


class SolverError(ScenarioError):
    exit_code = 5


class OutputError(ScenarioError):
    exit_code = 6


PARAMS = {
    "coulomb": (Coulomb, {"alpha": None, "m": 1.0}),
    "magnetic": (
        MagneticCoulomb,
        {"alpha": None, "m": 1.0, "gamma": 1.0, "q": 1.0, "omega1": 0.0, "omega2": 0.0, "omega3": 0.0},
    ),
    "cylwell": (CylWell, {"R": None, "U0": None, "m": 1.0, "k_z": 0.0, "regime": "slow"}),
    "coulombwell": (CoulombWell, {"alpha": None, "m": 1.0, "nprime_shift": 0.0}),
}


@dataclass(frozen=True)
class Scenario:
    name: str
    potential: PotentialSpec
    rotation: RotationSpec
    basis: tuple[CoupledLabel, ...]
    basis_spec: dict
    initial: InitialCoefficients | None
    times: tuple[float, ...]
    tol_equivalence: float = 1e-9
    tol_oracle: float = 1e-9
    tol_fd: float = 1e-4
    prefix: str | None = None
    raw: dict = field(default_factory=dict, repr=False)


@dataclass
class ReportBundle:
    scenario: Scenario
    spectrum: list[SpectrumEntry]
    criterion: dict
    equivalence: EquivalenceReport | None = None
    evolution: list[tuple[float, np.ndarray, np.ndarray, float]] = field(default_factory=list)
    oracle: dict = field(default_factory=dict)
    version: str = __version__

    def report_dict(self) -> dict:
        sc = self.scenario
        return {
            "tool": {"name": "rotframe", "version": self.version},
            "conventions": {
                "hbar": 1,
                "phase": PHASE_CONVENTION,
                "frame": sc.rotation.convention,
                "cg_phase": "Condon-Shortley",
            },
            "scenario": sc.raw,
            "spectrum": [_spectrum_row_dict(e, sc.rotation) for e in self.spectrum],
            "criterion": self.criterion,
            "equivalence": None if self.equivalence is None else self.equivalence.as_dict(),
            "oracle": self.oracle,
        }


# ---------------------------------------------------------------------------
# Parsing


def bundled_scenarios() -> list[str]:
    root = resources.files("rotframe") / "scenarios"
    return sorted(p.name[: -len(".yaml")] for p in root.iterdir() if p.name.endswith(".yaml"))


def bundled_scenario_path(name: str) -> Path:
    p = resources.files("rotframe") / "scenarios" / f"{name}.yaml"
    if not p.is_file():
        raise ScenarioParseError(f"no bundled scenario named {name!r}; have {bundled_scenarios()}")
    return Path(str(p))


def _require(d: dict, key: str, where: str) -> Any:
    if not isinstance(d, dict):
        raise ScenarioParseError(f"{where}: expected a mapping, got {type(d).__name__}")
    if key not in d:
        raise ScenarioParseError(f"missing required field '{where + '.' if where else ''}{key}'")
    return d[key]


def _num(v: Any, where: str) -> float:
    if isinstance(v, bool):
        raise ScenarioValidationError(f"{where}: expected a number, got {v!r}")
    if isinstance(v, str):
        try:
            return float(Fraction(v))
        except (ValueError, ZeroDivisionError):
            raise ScenarioValidationError(f"{where}: cannot read {v!r} as a number") from None
    if isinstance(v, (int, float)):
        return float(v)
    raise ScenarioValidationError(f"{where}: expected a number, got {v!r}")


def _int(v: Any, where: str) -> int:
    x = _num(v, where)
    if x != int(x):
        raise ScenarioValidationError(f"{where}: expected an integer, got {v!r}")
    return int(x)


def _complex(v: Any, where: str) -> complex:
    if isinstance(v, (list, tuple)):
        if len(v) != 2:
            raise ScenarioValidationError(f"{where}: complex entries are [re, im], got {v!r}")
        return complex(_num(v[0], where), _num(v[1], where))
    return complex(_num(v, where), 0.0)


def _potential(d: dict) -> PotentialSpec:
    fam = _require(d, "family", "potential")
    if fam not in PARAMS:
        raise ScenarioValidationError(f"potential.family: unknown family {fam!r}; expected one of {sorted(PARAMS)}")
    cls, allowed = PARAMS[fam]
    unknown = set(d) - set(allowed) - {"family"}
    if unknown:
        raise ScenarioValidationError(f"potential: unknown parameter(s) {sorted(unknown)} for family {fam}")
    kw = {}
    for key, default in allowed.items():
        if key not in d:
            if default is None:
                raise ScenarioParseError(f"missing required field 'potential.{key}'")
            kw[key] = default
        elif key == "regime":
            kw[key] = d[key]
        else:
            kw[key] = _num(d[key], f"potential.{key}")
    if fam == "coulombwell":
        shift = kw.pop("nprime_shift")
        if shift:
            kw["nprime_of_omega"] = lambda n, M, w, c=shift: n + c * M * w
    try:
        return cls(**kw)
    except ValueError as exc:
        raise ScenarioValidationError(f"potential: {exc}") from None


def _basis(d: dict, potential: PotentialSpec) -> tuple[list[CoupledLabel], dict]:
    ns = _require(d, "n", "basis")
    ns = ns if isinstance(ns, list) else [ns]
    ns = [_int(v, "basis.n") for v in ns]
    l = _int(_require(d, "l", "basis"), "basis.l")
    s = _num(_require(d, "s", "basis"), "basis.s")
    try:
        twice(s)
    except ValueError as exc:
        raise ScenarioValidationError(f"basis.s: {exc}") from None
    if len(set(ns)) != len(ns):
        raise ScenarioValidationError("basis.n: duplicate entries")
    labels = []
    for n in ns:
        if n < 1 or l < 0:
            raise ScenarioValidationError(f"basis: invalid (n, l) = ({n}, {l})")
        if isinstance(potential, (Coulomb, MagneticCoulomb)) and l >= n:
            raise ScenarioValidationError(f"basis: l < n required for the {potential.family} family (n={n}, l={l})")
        labels.extend(lab for lab, _ in couple_basis(n, l, s))
    for lab in labels:
        if isinstance(potential, CylWell) and lab.two_m % 2:
            raise ScenarioValidationError(f"basis: cylindrical wells need integer M, got {lab}")
        if isinstance(potential, CoulombWell) and abs(lab.M) > lab.n - 1:
            raise ScenarioValidationError(f"basis: |M| <= n' - 1 violated by {lab}")
    return labels, {"n": ns, "l": l, "s": s}


def _initial(d: dict) -> InitialCoefficients:
    n = _int(_require(d, "n", "initial"), "initial.n")
    l = _int(_require(d, "l", "initial"), "initial.l")
    m_l = _int(_require(d, "m_l", "initial"), "initial.m_l")
    s = _num(_require(d, "s", "initial"), "initial.s")
    rows = _require(d, "rho", "initial")
    if not isinstance(rows, list) or not all(isinstance(r, list) for r in rows):
        raise ScenarioValidationError("initial.rho: expected a list of rows")
    rho = np.array([[_complex(v, "initial.rho") for v in row] for row in rows])
    try:
        return InitialCoefficients(n, l, m_l, s, rho)
    except ValueError as exc:
        raise ScenarioValidationError(f"initial: {exc}") from None


def _times(v: Any) -> tuple[float, ...]:
    if isinstance(v, list):
        ts = [_num(t, "times") for t in v]
    elif isinstance(v, dict):
        t_max = _num(_require(v, "t_max", "times"), "times.t_max")
        count = _int(_require(v, "count", "times"), "times.count")
        if count < 1:
            raise ScenarioValidationError("times.count must be >= 1")
        ts = np.linspace(0.0, t_max, count).tolist()
    else:
        raise ScenarioValidationError("times: expected a list or {t_max, count}")
    if not ts:
        raise ScenarioValidationError("times: empty time list")
    if not all(math.isfinite(t) for t in ts):
        raise ScenarioValidationError("times: non-finite entry")
    return tuple(ts)


def load_scenario(path: str | Path) -> Scenario:
    """Parse and validate a scenario file (a bundled scenario name is also accepted)."""
    p = Path(path)
    if not p.exists() and p.suffix == "" and p.name in bundled_scenarios():
        p = bundled_scenario_path(p.name)
    try:
        text = p.read_text()
    except OSError as exc:
        raise ScenarioParseError(f"cannot read scenario {p}: {exc}") from None
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        where = f" at line {mark.line + 1}, column {mark.column + 1}" if mark else ""
        raise ScenarioParseError(f"{p}: YAML syntax error{where}: {getattr(exc, 'problem', exc)}") from None
    if not isinstance(raw, dict):
        raise ScenarioParseError(f"{p}: top level must be a mapping")
    for key in ("potential", "rotation", "basis"):
        _require(raw, key, "")
    name = str(raw.get("name", p.stem))
    potential = _potential(raw["potential"])
    rot_d = raw["rotation"]
    omega = _num(_require(rot_d, "omega_z", "rotation"), "rotation.omega_z")
    try:
        rotation = RotationSpec(omega, rot_d.get("convention", "active-frame"))
    except ValueError as exc:
        raise ScenarioValidationError(f"rotation: {exc}") from None
    if isinstance(potential, CylWell):
        lam = potential.R * abs(omega)
        if potential.regime == "slow" and not lam < 1:
            raise ScenarioValidationError(f"slow regime requires R*omega < 1, got {lam}")
        if potential.regime == "rapid" and not lam > 1:
            raise ScenarioValidationError(f"rapid regime requires R*omega > 1, got {lam}")
    basis, basis_spec = _basis(raw["basis"], potential)
    initial = _initial(raw["initial"]) if "initial" in raw else None
    if initial is not None:
        if initial.n not in basis_spec["n"] or initial.l != basis_spec["l"] or twice(initial.s) != twice(basis_spec["s"]):
            raise ScenarioValidationError("initial: (n, l, s) must belong to the declared basis")
    times = _times(raw["times"]) if "times" in raw else ()
    tols = raw.get("tolerances", {}) or {}
    outputs = raw.get("outputs", {}) or {}
    return Scenario(
        name=name,
        potential=potential,
        rotation=rotation,
        basis=tuple(basis),
        basis_spec=basis_spec,
        initial=initial,
        times=times,
        tol_equivalence=_num(tols.get("equivalence", 1e-9), "tolerances.equivalence"),
        tol_oracle=_num(tols.get("oracle", 1e-9), "tolerances.oracle"),
        tol_fd=_num(tols.get("fd", 1e-4), "tolerances.fd"),
        prefix=outputs.get("prefix"),
        raw=raw,
    )


# ---------------------------------------------------------------------------
# Running


def _embed(rho: DensityMatrix, basis: Sequence[CoupledLabel]) -> DensityMatrix:
    if tuple(basis) == rho.basis:
        return rho
    idx = [basis.index(lab) for lab in rho.basis]
    full = np.zeros((len(basis), len(basis)), dtype=complex)
    full[np.ix_(idx, idx)] = rho.elements
    return DensityMatrix(tuple(basis), full, rho.time)


def _fd_checks(sc: Scenario) -> list[dict]:
    """Analytic energies against the radial finite-difference oracle, where one exists."""
    p, rot, tol = sc.potential, sc.rotation, sc.tol_fd
    rows = []
    seen = set()
    for lab in sc.basis:
        if isinstance(p, Coulomb):
            key = (lab.n, lab.l)
            if key in seen:
                continue
            seen.add(key)
            k = lab.n - lab.l
            fd = radial_fd_solve(
                lambda r: -p.alpha / r + lab.l * (lab.l + 1) / (2 * p.m * r * r), p.m, "spherical",
                r_max=max(60.0, 12.0 * lab.n**2) / (p.m * p.alpha), N=4000, k=k,
            )
            analytic = coulomb_energy(p, lab.n, 0, RotationSpec(0.0)).E
            numeric = float(fd.energies[k - 1])
            what = f"coulomb n={lab.n} l={lab.l} (omega=0)"
        elif isinstance(p, MagneticCoulomb):
            key = (lab.n, lab.l, lab.two_m)
            if key in seen:
                continue
            seen.add(key)
            nr = lab.n - lab.l - 1
            fd = radial_fd_solve(
                magnetic_radial_potential(p, lab.M, lab.l, rot), p.m, "spherical",
                r_max=max(80.0, 16.0 * lab.n**2) / (p.m * p.alpha), N=4000, k=nr + 1,
            )
            analytic = next(e.E for e in family_spectrum(p, [lab], rot))
            numeric = float(fd.energies[nr])
            what = f"magnetic n={lab.n} l={lab.l} M={lab.M:g}"
        elif isinstance(p, CylWell) and p.regime == "slow":
            key = (lab.n, abs(lab.two_m))
            if key in seen:
                continue
            seen.add(key)
            M = abs(lab.two_m) // 2
            cells_per_R = 200
            r_max = p.R * 12
            fd = radial_fd_solve(
                lambda r: np.where(r < p.R, -p.U0, 0.0), p.m, "cylindrical",
                r_max=r_max, N=12 * cells_per_R, k=lab.n, M=M,
            )
            analytic = next(e.E for e in family_spectrum(p, [lab], RotationSpec(0.0)))
            analytic -= p.k_z**2 / (2 * p.m)
            numeric = float(fd.energies[lab.n - 1])
            what = f"slow well n={lab.n} |M|={M} (omega=0, k_z=0)"
        elif isinstance(p, CoulombWell) and lab.two_m % 2 == 0 and p.nprime_of_omega(lab.n, lab.M, rot.omega_z) == lab.n:
            M = abs(lab.two_m) // 2
            key = (lab.n, M)
            if key in seen:
                continue
            seen.add(key)
            k = lab.n - M
            fd = radial_fd_solve(
                lambda r: -p.alpha / r, p.m, "cylindrical",
                r_max=max(60.0, 12.0 * lab.n**2) / (p.m * p.alpha), N=4000, k=k, M=M,
            )
            analytic = -p.alpha**2 * p.m / (2 * (lab.n - 0.5) ** 2)
            numeric = float(fd.energies[k - 1])
            what = f"2D Coulomb n'={lab.n} |M|={M} (omega=0)"
        else:
            continue
        rel = abs(numeric - analytic) / abs(analytic)
        rows.append({
            "check": what, "analytic": analytic, "fd": numeric,
            "rel_error": rel, "tolerance": tol, "passed": bool(rel < tol),
            "fd_warning": fd.warning,
        })
    return rows


def run_scenario(path: str | Path, *, tol: float | None = None, evolve: bool = True, fd: bool = True) -> ReportBundle:
    """Parse, validate and run a scenario; deterministic for a given file.

    ``evolve=False`` skips the time evolution (spectrum and criterion only);
    ``fd=False`` skips the finite-difference energy cross-checks.
    """
    sc = load_scenario(path)
    if tol is not None:
        sc = Scenario(**{**sc.__dict__, "tol_equivalence": float(tol)})
    try:
        spectrum = family_spectrum(sc.potential, sc.basis, sc.rotation)
    except (NoBoundStateError, NormalizationError, RuntimeError) as exc:
        raise SolverError(f"scenario {sc.name!r}: spectrum failed: {exc}") from None
    except ValueError as exc:
        raise ScenarioValidationError(f"scenario {sc.name!r}: {exc}") from None

    w_eff = effective_rate(sc.potential, sc.rotation)
    verdict, spread = check_criterion(CriterionInput(tuple(spectrum), w_eff), sc.tol_equivalence)
    criterion = {"verdict": verdict, "max_spread": spread, "omega_eff": w_eff, "tolerance": sc.tol_equivalence}
    bundle = ReportBundle(sc, spectrum, criterion)
    if fd:
        bundle.oracle["fd_energies"] = _fd_checks(sc)
    if not evolve:
        return bundle

    if sc.initial is None:
        raise ScenarioParseError("missing required field 'initial'")
    if not sc.times:
        raise ScenarioParseError("missing required field 'times'")
    rho0 = _embed(build_rho0(sc.initial), list(sc.basis))
    gens = generator_matrices(sc.basis)
    report = compare_evolutions(rho0, spectrum, gens, sc.rotation, sc.times, sc.tol_equivalence, w_eff)
    bundle.equivalence = report

    H = np.diag([e.E for e in spectrum]).astype(complex)
    # passive partner = shared multiplet energies with the detector turning at -omega_eff
    H_pas = np.diag(shared_energies(sc.basis, spectrum, w_eff)) - w_eff * gens.Jz
    worst_act = 0.0
    worst_pas = 0.0
    for t, td in zip(sc.times, report.trace_distances):
        act = evolve_active(rho0, spectrum, t)
        pas = passive_partner(rho0, gens, sc.rotation, w_eff, t, spectrum)
        bundle.evolution.append((t, act.elements, pas.elements, td))
        worst_act = max(worst_act, float(np.max(np.abs(act.elements - oracle_evolve(rho0, H, t).elements))))
        ref = oracle_evolve(rho0, H_pas, t)
        worst_pas = max(worst_pas, float(np.max(np.abs(pas.elements - ref.elements))))
    bundle.oracle["evolution"] = {
        "active_vs_oracle_max_abs": worst_act,
        "passive_vs_oracle_max_abs": worst_pas,
        "tolerance": sc.tol_oracle,
        "passed": bool(worst_act < sc.tol_oracle and worst_pas < sc.tol_oracle),
    }
    return bundle


# ---------------------------------------------------------------------------
# Output


def _g(x: float) -> str:
    return format(float(x), ".17g")


def label_token(lab: CoupledLabel) -> str:
    def h(t):
        return str(t // 2) if t % 2 == 0 else f"{t}/2"

    return f"n={lab.n};l={lab.l};s={h(lab.two_s)};J={h(lab.two_j)};M={h(lab.two_m)}"


def _extra_index(e: SpectrumEntry) -> str:
    if e.family == "coulomb":
        return ""
    return str(e.n)


def _spectrum_row(e: SpectrumEntry, rot: RotationSpec) -> list[str]:
    lab = e.label
    return [
        e.family,
        str(lab.n),
        str(lab.l),
        _g(lab.s),
        _g(lab.J),
        _g(lab.M),
        _extra_index(e),
        "" if e.k_z is None else _g(e.k_z),
        _g(rot.omega_z),
        _g(e.E),
    ]


def _spectrum_row_dict(e: SpectrumEntry, rot: RotationSpec) -> dict:
    row = dict(zip(SPECTRUM_HEADER, _spectrum_row(e, rot)))
    row["E"] = e.E
    row["derived"] = {k: float(v) for k, v in sorted(e.derived.items())}
    return row


def _csv_text(header: list[str], rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def emit_outputs(b: ReportBundle, prefix: str | Path) -> list[Path]:
    """Write ``<prefix>.report.json``, ``<prefix>.spectrum.csv`` and, when evolved, ``<prefix>.evolution.csv``."""
    prefix = str(prefix)
    files: dict[Path, str] = {}
    files[Path(prefix + ".report.json")] = json.dumps(b.report_dict(), indent=2, sort_keys=True, default=_json_default) + "\n"
    files[Path(prefix + ".spectrum.csv")] = _csv_text(
        SPECTRUM_HEADER, (_spectrum_row(e, b.scenario.rotation) for e in b.spectrum)
    )
    if b.evolution:
        basis = b.scenario.basis
        tokens = [label_token(lab) for lab in basis]
        rows = []
        for t, act, pas, td in b.evolution:
            for i in range(len(basis)):
                for j in range(len(basis)):
                    a, p = act[i, j], pas[i, j]
                    rows.append([
                        _g(t), tokens[i], tokens[j],
                        _g(a.real), _g(a.imag), _g(p.real), _g(p.imag),
                        _g(abs(a - p)), _g(td),
                    ])
        files[Path(prefix + ".evolution.csv")] = _csv_text(EVOLUTION_HEADER, rows)
    written = []
    try:
        for path, text in files.items():
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(text)
            written.append(path)
    except OSError as exc:
        raise OutputError(f"cannot write outputs under {prefix!r}: {exc}") from None
    return written


def _json_default(o):
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    if isinstance(o, np.bool_):
        return bool(o)
    raise TypeError(f"cannot serialise {type(o).__name__}")
