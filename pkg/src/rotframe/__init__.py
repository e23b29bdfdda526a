"""Active versus passive rotations of bound quantum systems.

Spectra of rotating bound systems, density-matrix evolution in the coupled
|n l s J M> basis, and a verdict on whether rotating the system or the
detector gives the same dynamics.
"""

__version__ = "0.1.0"

from .angmo import (  # noqa: E402
    CoupledLabel,
    GeneratorSet,
    UncoupledLabel,
    clebsch_gordan,
    couple_basis,
    coupling_matrix,
    generator_matrices,
    uncoupled_basis,
)
from .equivalence import (  # noqa: E402
    CriterionInput,
    EquivalenceReport,
    check_criterion,
    commutator_criterion,
    compare_evolutions,
    default_times,
    wigner_eckart_check,
)
from .evolution import (  # noqa: E402
    DensityMatrix,
    InitialCoefficients,
    build_rho0,
    evolve_active,
    evolve_passive,
    oracle_evolve,
    product_state,
    trace_distance,
)
from .spectra import (  # noqa: E402
    Coulomb,
    CoulombWell,
    CylWell,
    MagneticCoulomb,
    NoBoundStateError,
    RotationSpec,
    SpectrumEntry,
    coulomb_energy,
    coulomb_well_energy,
    effective_rate,
    family_spectrum,
    magnetic_nu_energy,
    radial_fd_solve,
    well_rapid_energy,
    well_slow_energy,
)
