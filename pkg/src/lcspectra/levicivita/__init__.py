"""Levi-Civita map, wavefunction pullbacks and operator residual checks."""
from .fields import (
    Chart,
    Field2D,
    PolarGrid,
    Spinor2D,
    integrate,
    jacobian_weight,
    load_field,
    norm,
    read_field,
    save_field,
    write_field,
)
from .operators import (
    SpinorResidual,
    angular_index,
    default_momentum_points,
    dirac_operator_residual,
    dirac_residual_rows,
    kg_operator_residual,
    momentum_identity_residual,
    nr_operator_residual,
    p_minus,
    p_plus,
    polar_laplacian,
)
from .transform import (
    lc_forward,
    lc_inverse,
    pullback_scalar,
    pullback_spinor,
    pullback_spinor_regular,
)
