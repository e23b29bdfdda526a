"""Command-line front end: ``rotframe {spectrum,evolve,compare,criterion,selftest}``.

Exit codes: 0 ok, 2 usage, 3 scenario parse error, 4 validation error,
5 solver failure or failed self-test, 6 output I/O failure.
"""

from __future__ import annotations

import argparse
import math
import sys
from typing import Callable

import numpy as np

from . import __version__
from .scenario import (
    ReportBundle,
    ScenarioError,
    bundled_scenarios,
    emit_outputs,
    run_scenario,
)

EXIT_OK = 0
EXIT_SELFTEST = 5


def _say(args, *lines: str) -> None:
    if not args.quiet:
        for line in lines:
            print(line)


def _summary(b: ReportBundle) -> list[str]:
    out = [f"scenario {b.scenario.name}: {len(b.spectrum)} states, family {b.spectrum[0].family if b.spectrum else '-'}"]
    c = b.criterion
    out.append(f"criterion: {c['verdict']} (spread {c['max_spread']:.3g}, tol {c['tolerance']:g}, omega_eff {c['omega_eff']:g})")
    if b.equivalence is not None:
        r = b.equivalence
        out.append(
            f"dynamical: {r.verdict_dynamical} (max trace distance {r.max_trace_distance:.3g} over {len(r.times_sampled)} times)"
        )
        if not r.verdicts_agree:
            out.append("WARNING: predictor and dynamical verdicts disagree")
        if r.cross_multiplet_coherence:
            out.append("note: initial state has coherences across different (n, l, s)")
    for row in b.oracle.get("fd_energies", []):
        out.append(f"fd check {row['check']}: rel err {row['rel_error']:.2e} ({'ok' if row['passed'] else 'FAIL'})")
    ev = b.oracle.get("evolution")
    if ev:
        out.append(
            f"evolution oracle: active {ev['active_vs_oracle_max_abs']:.2e}, passive {ev['passive_vs_oracle_max_abs']:.2e} "
            f"({'ok' if ev['passed'] else 'FAIL'})"
        )
    return out


def _run(args, *, evolve: bool, fd: bool) -> int:
    b = run_scenario(args.scenario, tol=args.tol, evolve=evolve, fd=fd)
    prefix = args.out or b.scenario.prefix
    if not evolve:
        b.equivalence = None
    if args.command == "criterion":
        b.oracle = {}
    written = emit_outputs(b, prefix) if prefix else []
    lines = _summary(b)
    if args.command == "spectrum":
        lines = lines[:1] + [f"  {e.label}  E = {e.E:.12g}" for e in b.spectrum] + lines[2:]
    _say(args, *lines, *(f"wrote {p}" for p in written))
    return EXIT_OK


def _selftest_checks() -> list[tuple[str, Callable[[], tuple[bool, str]]]]:
    from .angmo import clebsch_gordan, coupling_matrix
    from .specfun import bessel_zero
    from .spectra import (
        CylWell,
        MagneticCoulomb,
        RotationSpec,
        magnetic_nu_energy,
        magnetic_radial_potential,
        radial_fd_solve,
        well_rapid_energy,
        well_slow_energy,
    )

    def cg_spot():
        v = clebsch_gordan(1, 0, 0.5, 0.5, 1.5, 0.5)
        return abs(v - math.sqrt(2 / 3)) < 1e-12, f"{v:.15f}"

    def cg_unitary():
        worst = 0.0
        for l in range(5):
            for ts in range(1, 4):
                _, _, U = coupling_matrix(1 + l, l, ts / 2)
                worst = max(worst, float(np.max(np.abs(U @ U.T - np.eye(len(U))))))
        return worst < 1e-12, f"max |U U^T - 1| = {worst:.1e}"

    def zeros():
        a, b = bessel_zero(0, 1), bessel_zero(1, 1)
        ok = abs(a - 2.4048255577) < 1e-9 and abs(b - 3.8317059702) < 1e-9
        return ok, f"x01 = {a:.10f}, x11 = {b:.10f}"

    def rapid():
        e = well_rapid_energy(CylWell(R=4.0, U0=1.0, m=1.0, regime="rapid"), 0, 1, RotationSpec(0.5)).E
        return abs(e + 0.2771017546) < 1e-9, f"E = {e:.10f}"

    def nu_limit():
        p = MagneticCoulomb(alpha=1.0, m=1.0)
        worst = max(
            abs(magnetic_nu_energy(p, n, l, 0.0, RotationSpec(0.0)).E + 0.5 / (n + l + 1) ** 2)
            for n in range(4)
            for l in range(3)
        )
        return worst < 1e-12, f"max deviation {worst:.1e}"

    def fd_coulomb():
        fd = radial_fd_solve(lambda r: -1.0 / r, 1.0, "spherical", r_max=60.0, N=4000)
        e = float(fd.energies[0])
        return abs(e + 0.5) < 1e-5, f"E0 = {e:.9f}"

    def fd_well():
        # infinite-depth limit: hard wall at R
        fd = radial_fd_solve(lambda r: 0.0 * r, 1.0, "cylindrical", r_max=1.0, N=800, M=0)
        ref = bessel_zero(0, 1) ** 2 / 2
        hard = abs(fd.energies[0] - ref) / ref
        # finite depth against the matching-condition energy
        p = CylWell(R=1.0, U0=50.0, m=1.0)
        e = well_slow_energy(p, 0, 1, RotationSpec(0.0)).E
        fd = radial_fd_solve(lambda r: np.where(r < 1.0, -50.0, 0.0), 1.0, "cylindrical", r_max=12.0, N=2400, M=0)
        finite = abs(fd.energies[0] - e) / abs(e)
        return max(hard, finite) < 1e-4, f"hard wall rel err {hard:.1e}, finite depth rel err {finite:.1e}"

    def fd_magnetic():
        p = MagneticCoulomb(alpha=1.0, m=1.0, omega2=0.1)
        rot = RotationSpec(0.0)
        worst = 0.0
        for l, Mj in ((0, 0.5), (1, 1.5), (1, -0.5)):
            e = magnetic_nu_energy(p, 0, l, Mj, rot).E
            fd = radial_fd_solve(magnetic_radial_potential(p, Mj, l, rot), 1.0, "spherical", r_max=80.0, N=4000)
            worst = max(worst, abs(fd.energies[0] - e) / abs(e))
        return worst < 1e-4, f"max rel err {worst:.1e}"

    return [
        ("CG spot value <1 0; 1/2 1/2 | 3/2 1/2>", cg_spot),
        ("CG orthogonality l <= 4, s <= 3/2", cg_unitary),
        ("Bessel zeros x01, x11", zeros),
        ("rapid well spectrum point", rapid),
        ("NU zero-field limit", nu_limit),
        ("FD Coulomb ground state", fd_coulomb),
        ("FD deep cylindrical well", fd_well),
        ("FD magnetic family", fd_magnetic),
    ]


def _selftest(args) -> int:
    failed = 0
    for name, check in _selftest_checks():
        ok, detail = check()
        failed += not ok
        _say(args, f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
    return EXIT_OK if failed == 0 else EXIT_SELFTEST


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="rotframe", description="Active vs passive rotation scenarios.")
    ap.add_argument("--version", action="version", version=f"rotframe {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)
    helps = {
        "spectrum": "energies only",
        "evolve": "density matrices over time",
        "compare": "full equivalence pipeline",
        "criterion": "predictor only",
    }
    for name, text in helps.items():
        sp = sub.add_parser(name, help=text)
        sp.add_argument(
            "--scenario", required=True,
            help=f"scenario YAML file, or a bundled name ({', '.join(bundled_scenarios())})",
        )
        sp.add_argument("--out", help="output prefix (overrides outputs.prefix)")
        sp.add_argument("--tol", type=float, help="equivalence tolerance (default 1e-9)")
        sp.add_argument("--quiet", action="store_true")
    st = sub.add_parser("selftest", help="run the oracle cross-check suite")
    st.add_argument("--quiet", action="store_true")
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "selftest":
            return _selftest(args)
        if args.tol is not None and not (math.isfinite(args.tol) and args.tol > 0):
            print(f"error: --tol must be a positive number, got {args.tol}", file=sys.stderr)
            return 4
        evolve = args.command in ("evolve", "compare")
        return _run(args, evolve=evolve, fd=args.command in ("spectrum", "compare"))
    except ScenarioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
