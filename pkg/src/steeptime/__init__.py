"""Causal structure, Lorentz-Finsler distance and steep time functions on grid spacetimes."""

__version__ = "0.1.0"

from .geometry import (ConeSpec, DomainError, FinslerSpec, InvalidInputError, InvalidParameterError,
                       Spacetime, builtin_spacetime, cone_contains, custom_finsler, finsler_value,
                       lorentzian_finsler, polyhedral_cone, round_cone, uniform_spacetime, widen)
from .causal import (CausalGraph, CausalityError, Relation, build_causal_graph, future,
                     is_causal, is_stably_causal, past, seifert_relation)
from .distance import DistanceResult, distance, distance_field, path_length, stable_distance
from .product import (ProductSpacetime, build_product_graph, lift_cone_down, lift_cone_sym,
                      lift_curve, verify_vyv)
from .timefn import (FamilyConfig, GridFunction, Measure, SteepFamily, build_steep_family,
                     franco_candidate, geroch_tau, is_steep, level_set_graph, tau_down, tau_up,
                     volume_function)
from .formula import (verify_distance_formula, verify_order_representation, verify_properties,
                      verify_topology_separation)

__all__ = [
    "ConeSpec", "DomainError", "FinslerSpec", "InvalidInputError", "InvalidParameterError",
    "Spacetime", "builtin_spacetime", "cone_contains", "custom_finsler", "finsler_value",
    "lorentzian_finsler", "polyhedral_cone", "round_cone", "uniform_spacetime", "widen",
    "CausalGraph", "CausalityError", "Relation", "build_causal_graph", "future", "is_causal",
    "is_stably_causal", "past", "seifert_relation",
    "DistanceResult", "distance", "distance_field", "path_length", "stable_distance",
    "ProductSpacetime", "build_product_graph", "lift_cone_down", "lift_cone_sym", "lift_curve",
    "verify_vyv",
    "FamilyConfig", "GridFunction", "Measure", "SteepFamily", "build_steep_family",
    "franco_candidate", "geroch_tau", "is_steep", "level_set_graph", "tau_down", "tau_up",
    "volume_function",
    "verify_distance_formula", "verify_order_representation", "verify_properties",
    "verify_topology_separation",
]
