"""Levi-Civita connection coefficients and curvature tensors of a metric field.

Index conventions:
  christoffel(m, p)[a, b, c]      = Gamma^a_bc (symmetric in b, c)
  riemann(m, p)[a, b, c, d]       = R^a_bcd
                                  = d_c Gamma^a_db - d_d Gamma^a_cb
                                    + Gamma^a_ce Gamma^e_db - Gamma^a_de Gamma^e_cb
  ricci(m, p)[b, d]               = R^a_bad
With these conventions the unit round 2-sphere has Ric = g.
"""

import numpy as np

from .metric import MetricField, _require_spd


def christoffel(m: MetricField, p):
    g = m.at(p)
    _require_spd(g, p)
    ginv = np.linalg.inv(g)
    dg = m.d1(p)  # dg[c, a, b] = d_c g_ab
    # Gamma^a_bc = 1/2 g^{ad} (d_b g_dc + d_c g_db - d_d g_bc)
    t = np.einsum("bdc->dbc", dg) + np.einsum("cdb->dbc", dg) - dg
    return 0.5 * np.einsum("ad,dbc->abc", ginv, t)


def christoffel_d1(m: MetricField, p):
    """Coordinate derivatives dGamma[e, a, b, c] = d_e Gamma^a_bc."""
    g = m.at(p)
    _require_spd(g, p)
    ginv = np.linalg.inv(g)
    dg = m.d1(p)
    d2g = m.d2(p)  # d2g[e, c, a, b] = d_e d_c g_ab
    dginv = -np.einsum("am,emn,nd->ead", ginv, dg, ginv)
    t = np.einsum("bdc->dbc", dg) + np.einsum("cdb->dbc", dg) - dg
    dt = np.einsum("ebdc->edbc", d2g) + np.einsum("ecdb->edbc", d2g) - d2g
    return 0.5 * (np.einsum("ead,dbc->eabc", dginv, t)
                  + np.einsum("ad,edbc->eabc", ginv, dt))


def riemann(m: MetricField, p):
    gam = christoffel(m, p)
    dgam = christoffel_d1(m, p)
    r = (np.einsum("cadb->abcd", dgam) - np.einsum("dacb->abcd", dgam)
         + np.einsum("ace,edb->abcd", gam, gam)
         - np.einsum("ade,ecb->abcd", gam, gam))
    return r


def ricci(m: MetricField, p):
    return np.einsum("abad->bd", riemann(m, p))


def scalar_curvature(m: MetricField, p):
    ginv = m.inverse(p)
    return float(np.einsum("bd,bd->", ginv, ricci(m, p)))


def riemann_lowered(m: MetricField, p):
    """Fully covariant curvature R_abcd = g_ae R^e_bcd."""
    return np.einsum("ae,ebcd->abcd", m.at(p), riemann(m, p))
