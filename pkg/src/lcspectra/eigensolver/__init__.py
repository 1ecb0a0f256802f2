"""Independent numerical oracle: radial finite-volume eigensolvers."""
from .radial import (
    ExtrapolatedLevel,
    GridSpec,
    RadialProblem,
    RadialSolution,
    default_rmax,
    dirac_lower_component,
    discretize,
    initial_energy,
    radial_reduce,
    richardson,
    solve_extrapolated,
    solve_linear_state,
    solve_selfconsistent,
    solve_state,
)
from .tridiagonal import inverse_iteration, solve_linear_spectrum, sturm_count, tridiagonal_eigenvalues
