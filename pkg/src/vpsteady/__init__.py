"""Spherically symmetric polytropic steady states of the gravitational
Vlasov-Poisson system, computed as fixed points of the mass-preserving map.
"""

from vpsteady.errors import (
    DegenerateDensityError,
    ExponentOutOfRangeError,
    InvalidArgumentError,
    IterationCollapsedError,
    NoZeroFoundError,
)
from vpsteady.radial_core import (
    LpNorm,
    RadialDensity,
    RadialGrid,
    lp_norm,
    make_uniform_grid,
    mass,
    project_to_D,
)
from vpsteady.gravity import (
    CenterBoundCertificate,
    RadialPotential,
    center_bound,
    check_monotone_and_boundary,
    check_pointwise_lower_bound,
    potential,
)
from vpsteady.ansatz import (
    AmplitudeBounds,
    PolytropeParams,
    amplitude,
    ansatz_density,
    apply_T,
    check_range_bound,
    compute_ck,
)
from vpsteady.solver import IterationReport, SolverConfig, initial_guess, residual, solve
from vpsteady.oracle import OracleSolution, compare, lane_emden_shoot, oracle_steady_state

__version__ = "0.1.0"
