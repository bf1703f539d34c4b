"""Interaction assembly, the renormalised-metric identity and the metric flow."""

from .flow import (CouplingState, FlowTrajectory, GridMetric,
                   closed_form_radius_squared, flow_consistency_check,
                   grid_ricci, grid_scalar_range, ricci_flow_integrate)
from .lagrangian import (interacting_lagrangian, partition_function,
                         split_check)
from .renorm import renormalization_identity_check, renormalized_metric
from .theta import theta_tensor

__all__ = [
    "CouplingState", "FlowTrajectory", "GridMetric",
    "closed_form_radius_squared", "flow_consistency_check", "grid_ricci",
    "grid_scalar_range", "interacting_lagrangian", "partition_function",
    "renormalization_identity_check", "renormalized_metric",
    "ricci_flow_integrate", "split_check", "theta_tensor",
]
