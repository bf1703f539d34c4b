"""Functional algebra: polynomial functionals, the deformed product, the
change-of-kernel isomorphisms, normal-ordered powers and their ambiguities."""

from .algebra import alpha_map, involution, star_product
from .ambiguities import classify_ambiguities, reconstruct_power
from .functionals import (evaluate, evaluate_brute, functional_derivative,
                          local_functional, monomial, symmetrize)
from .poly import Poly, zero_section
from .powers import (AlgebraElement, DeformedWickFamily, HadamardWickFamily,
                     WickFamily, derivative_condition_check, equivariance_check,
                     interior_product, pair_contract, pair_free_contract,
                     scale_functional, wick_monomial, wick_power)
from .smoothness import (convergence_ratios, divided_differences,
                         vacuum_family_smoothness_proxy, vacuum_value)

__all__ = [
    "AlgebraElement", "DeformedWickFamily", "HadamardWickFamily", "Poly",
    "WickFamily", "alpha_map", "classify_ambiguities", "convergence_ratios",
    "derivative_condition_check", "divided_differences", "equivariance_check",
    "evaluate", "evaluate_brute", "functional_derivative", "interior_product",
    "involution", "local_functional", "monomial", "pair_contract",
    "pair_free_contract", "reconstruct_power", "scale_functional",
    "symmetrize", "vacuum_family_smoothness_proxy", "vacuum_value",
    "wick_monomial", "wick_power", "zero_section",
]
