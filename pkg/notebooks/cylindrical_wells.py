"""
Cylindrical wells: slow and rapid rotation
==========================================

A finite cylindrical well of radius R. For slow rotation (R*omega << 1) the
bound energies come from matching J_M inside to K_M outside; for rapid
rotation the levels are set by Bessel zeros x_{|M|a}. Neither spectrum keeps
E + M*omega constant inside a multiplet, so rotating the well is not the same
as rotating the detector.
"""


from rotframe import CylWell, RotationSpec, well_rapid_energy, well_slow_energy
from rotframe.specfun import bessel_zero
from rotframe.scenario import run_scenario

slow = CylWell(R=1.0, U0=50.0)
rot = RotationSpec(0.3)
print("slow well, n=1:")
for M in (-2, -1, 0, 1, 2):
    print(f"  M={M:+d}  E={well_slow_energy(slow, M, 1, rot).E:+.6f}")

# deeper wells approach the hard-wall value x01^2/(2 m R^2)
x01 = bessel_zero(0, 1)
for U0 in (50.0, 500.0, 5000.0, 50000.0):
    e = well_slow_energy(CylWell(R=1.0, U0=U0), 0, 1, RotationSpec(0.0)).E + U0
    print(f"  U0={U0:8.0f}  E+U0={e:.6f}  hard wall {x01**2 / 2:.6f}")

rapid = CylWell(R=4.0, U0=1.0, regime="rapid")
print("rapid well, omega=0.5:")
for M, a in [(0, 1), (1, 1), (-1, 1), (0, 2)]:
    print(f"  M={M:+d} a={a}  E={well_rapid_energy(rapid, M, a, RotationSpec(0.5)).E:+.10f}")

# the bundled scenario puts this together
b = run_scenario("rapid_well", fd=False)
print("rapid_well scenario:", b.equivalence.verdict_criterion, b.equivalence.verdict_dynamical,
      f"max trace distance {b.equivalence.max_trace_distance:.3f}")
