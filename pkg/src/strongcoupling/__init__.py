"""Strong-coupling (1/g) expansion for bound states, checked against a numerical radial solver."""

__version__ = "0.1.0"

from .core import (  # noqa: E402
    AnalyticState,
    EnergySeries,
    GridState,
    PowerLawPotential,
    QuantumNumbers,
    ScreenedPotential,
    from_dict,
    reduce_coulomb_like,
    to_dict,
)
from .coulomb import coulomb_coefficients, coulomb_energy, coulomb_state, coulomb_wavefunction  # noqa: E402
from .hierarchy import RegularityError, solve_hierarchy  # noqa: E402
from .oracle import (  # noqa: E402
    ConvergenceError,
    NoBoundStateError,
    SolverConfig,
    cross_validate,
    expectation_value,
    node_count,
    solve_bound_state,
)
from .scaling import g_factor_exponent, map_radius, scale_pair_from_a, scaling_variable, verify_factorization  # noqa: E402
from .yukawa import comparison_table, yukawa_excited_energy, yukawa_ground_energy  # noqa: E402
