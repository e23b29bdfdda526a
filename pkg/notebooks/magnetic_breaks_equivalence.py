"""
A magnetic field that does not commute with the rotation
========================================================

With only the field along the rotation axis (Omega1) the level shift is still
linear in M, so the equivalence survives at a shifted rate. The Omega2 and
Omega3 terms add pieces that are not linear in M and the two evolutions drift
apart.
"""

import numpy as np

from rotframe import (
    InitialCoefficients,
    MagneticCoulomb,
    RotationSpec,
    build_rho0,
    check_criterion,
    compare_evolutions,
    CriterionInput,
    default_times,
    effective_rate,
    family_spectrum,
    generator_matrices,
)

rot = RotationSpec(omega_z=0.2)
spin = np.array([[0.6, 0.3 + 0.1j], [0.3 - 0.1j, 0.4]])
rho0 = build_rho0(InitialCoefficients(n=2, l=1, m_l=0, s=0.5, rho=spin))
g = generator_matrices(rho0.basis)

for name, fields in [("omega1", dict(omega1=0.3)), ("omega2", dict(omega2=0.1)), ("omega3", dict(omega3=0.05))]:
    p = MagneticCoulomb(alpha=1.0, **fields)
    w = effective_rate(p, rot)
    spectrum = family_spectrum(p, rho0.basis, rot)
    verdict, spread = check_criterion(CriterionInput(spectrum, w))
    rep = compare_evolutions(rho0, spectrum, g, rot, default_times(w), omega_eff=w)
    print(f"{name}: omega_eff={w:.3f} spread={spread:.2e} {verdict} / {rep.verdict_dynamical}"
          f" max trace distance {rep.max_trace_distance:.3f}")

# how the trace distance grows for the Omega2 case
p = MagneticCoulomb(alpha=1.0, omega2=0.1)
spectrum = family_spectrum(p, rho0.basis, rot)
rep = compare_evolutions(rho0, spectrum, g, rot, default_times(0.2, count=11, periods=1))
for t, d in zip(rep.times_sampled, rep.trace_distances):
    print(f"t={t:7.3f}  " + "#" * int(60 * d))
