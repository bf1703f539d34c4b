"""The renormalised target metric and the scale identity it satisfies."""

import numpy as np

from ..geometry.curvature import ricci
from ..geometry.metric import MetricField
from .lagrangian import interacting_lagrangian


def renormalized_metric(g: MetricField, lam, nu, probe_points=None) -> MetricField:
    """g - nu^2 log(lambda) Ric[g], pointwise.

    Derivatives of the result fall back to finite differences.  If a probe
    point yields a non positive-definite matrix the result carries a
    degeneration warning instead of raising.
    """
    lam = float(lam)
    if lam <= 0.0:
        raise ValueError("scale factor must be positive")
    nu = float(nu)
    factor = nu * nu * np.log(lam)
    if factor == 0.0:
        return g

    def ev(p):
        return g.at(p) - factor * ricci(g, p)

    out = MetricField(g.dim, ev, name=None if g.name is None else f"renorm({g.name})")
    out.degeneration_warning = False
    if probe_points is not None:
        for p in probe_points:
            try:
                np.linalg.cholesky(ev(np.asarray(p, dtype=float)))
            except np.linalg.LinAlgError:
                out.degeneration_warning = True
                break
    return out


def renormalization_identity_check(b, quad, f_values, family, nu, lam, P, phi,
                                   q_source=None):
    """Two independent routes to the interaction at scale lambda.

    Left: the interaction built from the rescaled family (the coincidence
    part shifts by -2 log(lambda) g^sharp).  Right: the interaction built from
    the unscaled family with the harmonic term evaluated on the renormalised
    metric.  Returns {"lhs", "rhs", "residual"}.
    """
    scaled_family = family.scaled(lam)
    lhs_elem = interacting_lagrangian(b, quad, f_values, scaled_family, nu,
                                      q_source=q_source)
    lhs = complex(lhs_elem.at(P).evaluate(phi))

    g_lam = renormalized_metric(b.g, lam, nu)
    rhs_elem = interacting_lagrangian(b, quad, f_values, family, nu,
                                      q_source=q_source, harmonic_metric=g_lam)
    rhs = complex(rhs_elem.at(P).evaluate(phi))
    return {"lhs": lhs.real, "rhs": rhs.real, "residual": abs(lhs - rhs)}
