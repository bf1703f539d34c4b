"""Riemannian substrate: metrics, curvature, geodesics, the world function
and the elliptic operator of the linearised model."""

from .background import (BackgroundGeometry, SigmaMap, constant_map,
                         harmonic_lagrangian_density, identity_map, linear_map,
                         pullback_metric, scale_background)
from .charts import Chart, ManifoldFamily, family
from .curvature import (christoffel, christoffel_d1, ricci, riemann,
                        riemann_lowered, scalar_curvature)
from .geodesics import Geodesic, exponential_map, geodesic_solve, integrate_ivp
from .metric import (MetricField, constant_metric, euclidean_metric,
                     hyperbolic_metric, sphere_metric)
from .operators import (SigmaQuadrature, apply_E, curvature_quadratic,
                        curvature_vertex, expansion_check, expansion_refinement,
                        full_lagrangian, kinetic_quadratic,
                        lagrangian_scale_invariance_check,
                        measured_linear_coefficient, principal_symbol_check,
                        second_order_model)
from .synge import SyngeData, synge_data, world_function

__all__ = [
    "BackgroundGeometry", "Chart", "Geodesic", "ManifoldFamily", "MetricField",
    "SigmaMap", "SigmaQuadrature", "SyngeData", "apply_E", "christoffel",
    "christoffel_d1", "constant_map", "constant_metric", "curvature_quadratic",
    "curvature_vertex", "euclidean_metric", "expansion_check",
    "expansion_refinement", "exponential_map", "family", "full_lagrangian",
    "geodesic_solve", "harmonic_lagrangian_density", "hyperbolic_metric",
    "identity_map", "integrate_ivp", "kinetic_quadratic",
    "lagrangian_scale_invariance_check", "linear_map",
    "measured_linear_coefficient", "principal_symbol_check", "pullback_metric",
    "ricci", "riemann", "riemann_lowered", "scalar_curvature",
    "scale_background", "second_order_model", "sphere_metric", "synge_data",
    "world_function",
]
