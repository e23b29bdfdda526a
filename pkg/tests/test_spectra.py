import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from oracles import bessel_zero_bisect
from rotframe.angmo import couple_basis
from rotframe.spectra import (
    Coulomb,
    CoulombWell,
    CylWell,
    MagneticCoulomb,
    NoBoundStateError,
    RotationSpec,
    coulomb_energy,
    coulomb_well_energy,
    effective_rate,
    family_spectrum,
    magnetic_nu_coeffs,
    magnetic_nu_energy,
    magnetic_radial_potential,
    radial_fd_solve,
    well_rapid_energy,
    well_slow_energy,
    well_slow_root,
)

STILL = RotationSpec(0.0)


def test_coulomb_energy():
    e = coulomb_energy(Coulomb(alpha=1.0), 2, 0.5, RotationSpec(0.3))
    assert e.E == pytest.approx(-1 / 8 - 0.15, abs=1e-15)
    with pytest.raises(ValueError):
        coulomb_energy(Coulomb(alpha=1.0), 0, 0, STILL)
    with pytest.raises(ValueError):
        Coulomb(alpha=-1.0)


@given(st.integers(1, 6), st.floats(-3, 3), st.integers(-10, 10))
def test_coulomb_rotation_is_a_pure_shift(n, w, twoM):
    p = Coulomb(alpha=0.8, m=1.7)
    e = coulomb_energy(p, n, twoM / 2, RotationSpec(w))
    assert e.E + e.M * w == pytest.approx(-0.64 * 1.7 / (2 * n * n), abs=1e-12)


@pytest.mark.parametrize("nr", range(4))
@pytest.mark.parametrize("l", range(3))
def test_nu_zero_field_limit(nr, l):
    e = magnetic_nu_energy(MagneticCoulomb(alpha=1.0, m=1.0), nr, l, 0.5, STILL)
    assert abs(e.E + 1 / (2 * (nr + l + 1) ** 2)) < 1e-12


@given(
    st.integers(0, 3), st.integers(0, 2), st.sampled_from([-1.5, -0.5, 0.5, 1.5]),
    st.floats(-0.3, 0.3), st.floats(-0.2, 0.2), st.floats(-0.05, 0.05), st.floats(-0.5, 0.5),
)
def test_nu_energy_satisfies_quantisation_rule(nr, l, Mj, o1, o2, o3, w):
    # sqrt(H0) (1 + 2n + sqrt(1 - 4 H2)) = H1 with the coefficients at the returned energy
    p = MagneticCoulomb(alpha=1.0, m=1.0, omega1=o1, omega2=o2, omega3=o3)
    rot = RotationSpec(w)
    try:
        e = magnetic_nu_energy(p, nr, l, Mj, rot)
    except NoBoundStateError:
        return
    c = magnetic_nu_coeffs(p, Mj, l, rot, e.E)
    assert c.H0 > 0
    lhs = math.sqrt(c.H0) * (1 + 2 * nr + math.sqrt(1 - 4 * c.H2))
    assert lhs == pytest.approx(c.H1, rel=1e-12)


@pytest.mark.parametrize(
    "fields",
    [dict(omega2=0.1), dict(omega3=0.05), dict(omega1=0.2, omega2=-0.1, omega3=0.03)],
)
@pytest.mark.parametrize("l,Mj,nr", [(0, 0.5, 0), (1, 1.5, 0), (1, -0.5, 1), (2, 2.5, 0)])
def test_nu_energy_against_finite_differences(fields, l, Mj, nr):
    p = MagneticCoulomb(alpha=1.0, m=1.0, **fields)
    rot = RotationSpec(0.1)
    e = magnetic_nu_energy(p, nr, l, Mj, rot).E
    n = nr + l + 1
    fd = radial_fd_solve(magnetic_radial_potential(p, Mj, l, rot), 1.0, r_max=20.0 * n * n, N=4000, k=nr + 1)
    assert fd.energies[nr] == pytest.approx(e, rel=1e-4)


def test_omega1_only_is_degenerate_at_shifted_rate():
    p = MagneticCoulomb(alpha=1.0, m=1.0, omega1=0.4)
    rot = RotationSpec(0.25)
    w = effective_rate(p, rot)
    assert w == pytest.approx(0.25 + 0.2)
    E0 = [magnetic_nu_energy(p, 0, 1, M, rot).E + M * w for M in (1.5, 0.5, -0.5, -1.5)]
    assert max(E0) - min(E0) < 1e-15  # rounding only


def test_no_bound_state_cases():
    with pytest.raises(NoBoundStateError):
        magnetic_nu_energy(MagneticCoulomb(alpha=0.1, omega2=-1.0), 0, 0, 0.5, STILL)
    with pytest.raises(NoBoundStateError):
        magnetic_nu_energy(MagneticCoulomb(alpha=1.0, omega3=2.0), 0, 0, 0.5, STILL)


def test_slow_well_matches_finite_differences():
    p = CylWell(R=1.0, U0=50.0, m=1.0)
    for M in (0, 1, 2):
        for n in (1, 2):
            e = well_slow_energy(p, M, n, STILL).E
            fd = radial_fd_solve(lambda r: np.where(r < 1.0, -50.0, 0.0), 1.0, "cylindrical", r_max=12.0, N=2400, k=n, M=M)
            assert fd.energies[n - 1] == pytest.approx(e, rel=1e-6)


def test_slow_well_root_approaches_bessel_zero_as_depth_grows():
    x01 = bessel_zero_bisect(0, 1)
    errs = []
    for U0 in (1e2, 1e4, 1e6):
        p = CylWell(R=1.0, U0=U0)
        errs.append(x01 - well_slow_root(p, 0, 1))
    assert all(e > 0 for e in errs)
    # leading finite-depth correction ~ x01 / xi
    for U0, err in zip((1e2, 1e4, 1e6), errs):
        xi = math.sqrt(2 * U0)
        assert err * xi / x01 == pytest.approx(1.0, rel=0.1)


def test_slow_well_rotation_and_kz():
    p = CylWell(R=1.0, U0=20.0, m=1.0, k_z=0.7)
    still = well_slow_energy(p, 1, 1, STILL).E
    turning = well_slow_energy(p, 1, 1, RotationSpec(0.4)).E
    assert turning == pytest.approx(still - 0.4, abs=1e-13)
    assert well_slow_energy(p, -1, 1, STILL).E == pytest.approx(still, abs=1e-13)
    with pytest.raises(ValueError):
        well_slow_energy(p, 0, 1, RotationSpec(1.5))
    with pytest.raises(ValueError):
        well_slow_energy(p, 0.5, 1, STILL)
    with pytest.raises(NoBoundStateError):
        well_slow_energy(CylWell(R=1.0, U0=2.0), 0, 5, STILL)


def test_rapid_well_spectrum_point():
    p = CylWell(R=3.0, U0=1.0, m=1.0, regime="rapid")
    e = well_rapid_energy(p, 0, 1, RotationSpec(0.5))
    x = bessel_zero_bisect(0, 1)
    assert e.E == pytest.approx(0.25 * x * x / 2 - 1.0, abs=1e-12)
    assert e.E == pytest.approx(-0.2771017546, abs=1e-9)
    with pytest.raises(ValueError):
        well_rapid_energy(p, 0, 1, RotationSpec(0.2))
    with pytest.raises(ValueError):
        well_rapid_energy(p, 0, 0, RotationSpec(0.5))


def test_rapid_well_depends_on_abs_m():
    p = CylWell(R=3.0, U0=1.0, regime="rapid")
    rot = RotationSpec(0.5)
    E0 = {M: well_rapid_energy(p, M, 1, rot).E + M * 0.5 for M in (-1, 0, 1)}
    assert E0[1] == pytest.approx(E0[-1])
    assert abs(E0[1] - E0[0]) > 1.0


def test_coulomb_well():
    p = CoulombWell(alpha=1.0)
    e = coulomb_well_energy(p, 3, 2, RotationSpec(0.3))
    assert e.E == pytest.approx(-1 / (2 * 2.5**2) - 0.6)
    with pytest.raises(ValueError):
        coulomb_well_energy(p, 2, 2, STILL)
    shifted = CoulombWell(alpha=1.0, nprime_of_omega=lambda n, M, w: n + 0.1 * M * w)
    e = coulomb_well_energy(shifted, 3, 1, RotationSpec(1.0))
    assert e.derived["nprime_eff"] == pytest.approx(3.1)


@pytest.mark.parametrize("nprime,M", [(1, 0), (2, 1), (3, 0), (3, 2)])
def test_coulomb_well_is_two_dimensional_hydrogen(nprime, M):
    p = CoulombWell(alpha=1.0)
    e = coulomb_well_energy(p, nprime, M, STILL).E
    k = nprime - M
    fd = radial_fd_solve(lambda r: -1.0 / r, 1.0, "cylindrical", r_max=80.0, N=4000, k=k, M=M)
    assert fd.energies[k - 1] == pytest.approx(e, rel=1e-6)


def test_fd_coulomb_ground_state():
    fd = radial_fd_solve(lambda r: -1.0 / r, 1.0, r_max=60.0, N=4000)
    assert abs(fd.energies[0] + 0.5) < 1e-5
    assert fd.warning is None


def test_fd_hard_wall_cylinder():
    x01 = bessel_zero_bisect(0, 1)
    fd = radial_fd_solve(lambda r: 0.0 * r, 1.0, "cylindrical", r_max=1.0, N=800, k=2, M=0)
    assert fd.energies[0] == pytest.approx(x01**2 / 2, rel=1e-8)
    assert fd.energies[1] == pytest.approx(bessel_zero_bisect(0, 2) ** 2 / 2, rel=1e-8)


def test_fd_arguments_and_drift_warning():
    with pytest.raises(ValueError):
        radial_fd_solve(lambda r: -1.0 / r, 1.0, N=100)
    with pytest.raises(ValueError):
        radial_fd_solve(lambda r: -1.0 / r, 1.0, geometry="toroidal")
    coarse = radial_fd_solve(lambda r: -50.0 / r, 1.0, r_max=5.0, N=200, drift_tol=1e-6)
    assert coarse.warning is not None


def test_family_spectrum_label_interpretation():
    basis = [lab for lab, _ in couple_basis(3, 1, 0.5)]
    mag = family_spectrum(MagneticCoulomb(alpha=1.0), basis, STILL)
    assert all(e.E == pytest.approx(-1 / 18) for e in mag)
    assert all(e.n == 1 for e in mag)  # radial nodes
    wells = family_spectrum(CylWell(R=3.0, U0=1.0, regime="rapid"), [lab for lab, _ in couple_basis(2, 1, 1)], RotationSpec(0.5))
    assert {e.n for e in wells} == {2}
    with pytest.raises(ValueError):
        family_spectrum(MagneticCoulomb(alpha=1.0), [lab for lab, _ in couple_basis(1, 1, 0.5)], STILL)
