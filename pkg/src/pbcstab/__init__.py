"""Optimality toolchain for positive bilinear control systems: transition
matrices, Perron spectral data, first- and high-order maximum-principle
tests, and a brute-force search oracle for destabilizing bang-bang
controls."""

from .linalg import (PerronPair, NotSimple, NonConvergence, SingularMatrix,
                     expm, group_inverse, is_metzler, lie_bracket,
                     perron_pair)
from .model import (BangBangControl, PBCSystem, PiecewiseConstantControl,
                    Trajectory, constant_control, cyclic_shift,
                    load_document, simulate, transition_matrix, validate)
from .first_order import (adjoint_data, check_first_order,
                          switching_function, symmetric_collinearity_check)
from .high_order import (build_H, first_order_bang_residual,
                         needle_variation_check, second_order_test,
                         singular_test, spectral_radius_derivatives,
                         transition_derivatives, variational_derivatives)
from .search import (GASVerdict, SearchResult, grid_search,
                     periodic_extension, refine, rho_t_curve)

__all__ = [
    "PerronPair", "NotSimple", "NonConvergence", "SingularMatrix",
    "expm", "group_inverse", "is_metzler", "lie_bracket", "perron_pair",
    "BangBangControl", "PBCSystem", "PiecewiseConstantControl",
    "Trajectory", "constant_control", "cyclic_shift", "load_document",
    "simulate", "transition_matrix", "validate",
    "adjoint_data", "check_first_order", "switching_function",
    "symmetric_collinearity_check",
    "build_H", "first_order_bang_residual", "needle_variation_check",
    "second_order_test", "singular_test", "spectral_radius_derivatives",
    "transition_derivatives", "variational_derivatives",
    "GASVerdict", "SearchResult", "grid_search", "periodic_extension",
    "refine", "rho_t_curve",
]

__version__ = "0.1.0"
