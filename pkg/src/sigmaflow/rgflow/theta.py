"""The curvature vertex that multiplies the quadratic part of the interaction."""

from ..geometry.operators import curvature_vertex


def theta_tensor(b, x):
    """theta_cd(x) = gamma^{alpha beta} R_cadb[g](psi(x)) J^a_alpha J^b_beta.

    Symmetric in (c, d); vanishes for a flat target or a constant map.  Its
    g-trace equals the gamma-trace of the pulled-back Ricci tensor, which is
    what ties the quadratic vertex to the metric flow.
    """
    return curvature_vertex(b, x)
