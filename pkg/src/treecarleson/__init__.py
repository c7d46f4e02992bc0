"""Carleson measures for weighted analytic Besov spaces via dyadic trees."""

from .analytic import (
    AnalyticFunction,
    besov_norm_continuum,
    dirichlet_inner,
    kernel_positivity,
    parse_function,
    phi_majorant,
    radial_variation,
    reproducing_check,
    reproducing_kernel,
    theta,
)
from .carleson import (
    dual_ratio,
    embedding_norm_general,
    embedding_norm_quadratic,
    level_sets,
    marcinkiewicz_constant,
    maximal_strong_check,
    sigma,
    tc_constant,
    weak_type_check,
)
from .measure import MeasureSpec, TreeMeasure, parse_measure_spec, pull_back, set_masses
from .operators import (
    TreeFunction,
    backward_difference,
    hardy,
    hardy_adjoint,
    maximal,
    tree_besov_norm,
    weighted_lp_norm,
)
from .tree import Tree, build_abstract_tree, build_dyadic_tree, geodesic, is_ancestor
from .weight import TreeWeight, WeightSpec, reg_check, tree_weight

__version__ = "0.1.0"

__all__ = [
    "AnalyticFunction",
    "MeasureSpec",
    "Tree",
    "TreeFunction",
    "TreeMeasure",
    "TreeWeight",
    "WeightSpec",
    "backward_difference",
    "besov_norm_continuum",
    "build_abstract_tree",
    "build_dyadic_tree",
    "dirichlet_inner",
    "dual_ratio",
    "embedding_norm_general",
    "embedding_norm_quadratic",
    "geodesic",
    "hardy",
    "hardy_adjoint",
    "is_ancestor",
    "kernel_positivity",
    "level_sets",
    "marcinkiewicz_constant",
    "maximal",
    "maximal_strong_check",
    "parse_function",
    "parse_measure_spec",
    "phi_majorant",
    "pull_back",
    "radial_variation",
    "reg_check",
    "reproducing_check",
    "reproducing_kernel",
    "set_masses",
    "sigma",
    "tc_constant",
    "theta",
    "tree_besov_norm",
    "tree_weight",
    "weak_type_check",
    "weighted_lp_norm",
]
