"""Exact arithmetic of integral quadratic forms."""

from .forms import QuadraticForm, diagonal, direct_sum, from_upper_coefficients, sum_of_squares, transform
from .local import hilbert_symbol, invariant_triple, isometric_over_Q, jordan_decompose
from .theta import enumerate_representations, modular_metadata, theta_coefficients
from .densities import (
    eisenstein_coefficient_genus_avg,
    eisenstein_coefficient_product,
    jacobi_r4,
    local_density_infty,
    local_density_p,
)
from .genus import all_p_neighbors, automorphism_count, genus_enumerate, is_isometric_Z, neighbor_graph
from .clifford import CliffordElement, OrthogonalMap, decompose_into_reflections, reflection, spinor_norm

__all__ = [
    "QuadraticForm",
    "diagonal",
    "direct_sum",
    "from_upper_coefficients",
    "sum_of_squares",
    "transform",
    "hilbert_symbol",
    "invariant_triple",
    "isometric_over_Q",
    "jordan_decompose",
    "enumerate_representations",
    "modular_metadata",
    "theta_coefficients",
    "eisenstein_coefficient_genus_avg",
    "eisenstein_coefficient_product",
    "jacobi_r4",
    "local_density_infty",
    "local_density_p",
    "all_p_neighbors",
    "automorphism_count",
    "genus_enumerate",
    "is_isometric_Z",
    "neighbor_graph",
    "CliffordElement",
    "OrthogonalMap",
    "decompose_into_reflections",
    "reflection",
    "spinor_norm",
]

__version__ = "0.1.0"
