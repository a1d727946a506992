"""Summation-by-parts operators, their weight-matrix quadratures, and refinement studies."""

from sbpquad.endcorrect import solve_rule, verify_conditions, verify_prop2
from sbpquad.exact import bernoulli, central_coefficients, sum_of_powers
from sbpquad.kernels import BACKEND
from sbpquad.operators import (
    OperatorFamily,
    UniformGrid1D,
    apply_D,
    build_operator,
    quadrature_weights,
    verify_sbp_structure,
)
from sbpquad.tensor import (
    TensorGrid2D,
    apply_Deta,
    apply_Dxi,
    build_paper_grid,
    compute_metrics,
    contravariant_flux,
    divergence_integral,
    integrate2d,
)

__version__ = "0.1.0"
