"""Two-mode amplitude damping simulator: exact analytic moment evolution,
a truncated-Fock Kraus oracle, and classical-structure analysis under
linear canonical transformations."""

from .model import (Lct, ModeParams, MomentState, PhysicalConstants,
                    TwoModeSystem, lct_from_position_block, symplectic_defect,
                    vacuum_state, validate_lct)
from .analytic import (DampingMap, asymptotic_state, cross_covariance,
                       evolve_state, uncertainty_product)
from .fock import (KrausSet, bh_identity_residual, build_mode_operators,
                   coherent_density, completeness_defect, evolve_density,
                   heisenberg_moment, kraus_operators, two_mode_moments)
from .structures import (SearchConfig, StructureReport,
                         asymptotic_cross_covariances, asymptotic_products,
                         center_of_mass_lct, classicality_residual,
                         search_classical_structure, transform_state)

__all__ = [
    "Lct", "ModeParams", "MomentState", "PhysicalConstants", "TwoModeSystem",
    "lct_from_position_block", "symplectic_defect", "vacuum_state",
    "validate_lct", "DampingMap", "asymptotic_state", "cross_covariance",
    "evolve_state", "uncertainty_product", "KrausSet", "bh_identity_residual",
    "build_mode_operators", "coherent_density", "completeness_defect",
    "evolve_density", "heisenberg_moment", "kraus_operators",
    "two_mode_moments", "SearchConfig", "StructureReport",
    "asymptotic_cross_covariances", "asymptotic_products",
    "center_of_mass_lct", "classicality_residual",
    "search_classical_structure", "transform_state",
]

__version__ = "0.1.0"
