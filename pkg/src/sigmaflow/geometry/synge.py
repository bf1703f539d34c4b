"""The world function (halved squared geodesic distance) and its derivatives.

``synge_data`` differentiates sigma(. , x') over base points neighbouring the
samples of a solved geodesic, producing the covector d sigma and the scalar
Laplacian needed by the transport hierarchy.  Built-in base families carry
closed-form world functions (vectorised over the first argument); anything
else falls back to nested shooting.
"""

import numpy as np

from .charts import ManifoldFamily
from .curvature import christoffel
from .geodesics import Geodesic, geodesic_solve
from .metric import MetricField

GRAD_H = 1e-4
LAP_H = 5e-3


class ShootingWorld:
    """World function evaluated by solving a fresh boundary-value problem."""

    def __init__(self, metric: MetricField, chart=None):
        self.metric = metric
        self.chart = chart

    def __call__(self, p, q):
        p = np.asarray(p, dtype=float)
        q = np.asarray(q, dtype=float)
        if p.ndim == 1:
            return self._one(p, q)
        flat = p.reshape(-1, p.shape[-1])
        out = np.array([self._one(pi, q) for pi in flat])
        return out.reshape(p.shape[:-1])

    def _one(self, p, q):
        geo = geodesic_solve(self.metric, p, q, chart=self.chart, samples=3,
                             enforce_guard=False)
        return geo.sigma


def world_function(metric: MetricField, chart=None, family: ManifoldFamily = None):
    """Closed-form evaluator when the family provides one, shooting otherwise."""
    if family is not None and family.world_function is not None:
        if family.metric is metric:
            return family.world_function
    return ShootingWorld(metric, chart)


def background_world(b):
    """The world function matching a background's base metric."""
    if b.sigma_world is not None:
        return b.sigma_world
    return ShootingWorld(b.gamma, b.sigma.chart)


def sigma_gradient(world, p, q, h=GRAD_H):
    """d sigma(. , q) at p, order-4 central differences."""
    p = np.asarray(p, dtype=float)
    n = p.size
    pts = np.empty((4 * n, n))
    for c in range(n):
        e = np.zeros(n)
        e[c] = 1.0
        pts[4 * c + 0] = p + h * e
        pts[4 * c + 1] = p - h * e
        pts[4 * c + 2] = p + 2 * h * e
        pts[4 * c + 3] = p - 2 * h * e
    vals = np.asarray(world(pts, q))
    out = np.empty(n)
    for c in range(n):
        fp, fm, fp2, fm2 = vals[4 * c:4 * c + 4]
        out[c] = (8.0 * (fp - fm) - (fp2 - fm2)) / (12.0 * h)
    return out


def _hessian_stencil(n, h, need_mixed):
    """Offsets and weights for the order-4 Hessian entries."""
    entries = []
    for c in range(n):
        e = np.zeros(n)
        e[c] = 1.0
        offs = np.array([2 * h * e, h * e, -h * e, -2 * h * e, np.zeros(n)])
        ws = np.array([-1.0, 16.0, 16.0, -1.0, -30.0]) / (12.0 * h * h)
        entries.append(((c, c), offs, ws))
    if need_mixed:
        coeffs = {1: 8.0, -1: -8.0, 2: -1.0, -2: 1.0}
        for c in range(n):
            for d in range(c + 1, n):
                ec = np.zeros(n)
                ec[c] = 1.0
                ed = np.zeros(n)
                ed[d] = 1.0
                offs = []
                ws = []
                for ic, wc in coeffs.items():
                    for jd, wd in coeffs.items():
                        offs.append(ic * h * ec + jd * h * ed)
                        ws.append(wc * wd / (144.0 * h * h))
                entries.append(((c, d), np.array(offs), np.array(ws)))
    return entries


def sigma_hessian(world, p, q, h=LAP_H, need_mixed=True):
    """Coordinate Hessian of sigma(. , q) at p, order-4 stencils."""
    p = np.asarray(p, dtype=float)
    n = p.size
    out = np.zeros((n, n))
    for (c, d), offs, ws in _hessian_stencil(n, h, need_mixed):
        vals = np.asarray(world(p + offs, q))
        out[c, d] = float(ws @ vals)
        out[d, c] = out[c, d]
    return out


def sigma_laplacian(metric: MetricField, world, p, q, h=LAP_H):
    """Laplace-Beltrami of sigma(. , q) at p w.r.t. the base metric."""
    ginv = metric.inverse(p)
    need_mixed = abs(ginv[0, 1]) > 1e-14 if metric.dim == 2 else True
    hmat = sigma_hessian(world, p, q, h=h, need_mixed=need_mixed)
    grad = sigma_gradient(world, p, q)
    gam = christoffel(metric, p)
    cov = hmat - np.einsum("lab,l->ab", gam, grad)
    return float(np.einsum("ab,ab->", ginv, cov))


def laplacian_profile(metric: MetricField, world, points, q, h=LAP_H):
    """sigma-Laplacian at many base points, batching the world evaluations."""
    points = np.asarray(points, dtype=float)
    k, n = points.shape
    ginvs = np.array([metric.inverse(p) for p in points])
    need_mixed = bool(np.max(np.abs(ginvs[:, 0, 1])) > 1e-14) if n == 2 else True

    entries = _hessian_stencil(n, h, need_mixed)
    all_offsets = np.concatenate([offs for _, offs, _ in entries])
    grad_offs = []
    for c in range(n):
        e = np.zeros(n)
        e[c] = 1.0
        grad_offs.extend([h * e, -h * e, 2 * h * e, -2 * h * e])
    grad_offs = np.array(grad_offs)
    offsets = np.concatenate([all_offsets, grad_offs])     # (S, n)
    args = points[:, None, :] + offsets[None, :, :]        # (k, S, n)
    vals = np.asarray(world(args, q))                      # (k, S)

    hess = np.zeros((k, n, n))
    pos = 0
    for (c, d), offs, ws in entries:
        block = vals[:, pos:pos + len(ws)]
        hess[:, c, d] = block @ ws
        hess[:, d, c] = hess[:, c, d]
        pos += len(ws)
    grads = np.empty((k, n))
    for c in range(n):
        fp = vals[:, pos + 4 * c + 0]
        fm = vals[:, pos + 4 * c + 1]
        fp2 = vals[:, pos + 4 * c + 2]
        fm2 = vals[:, pos + 4 * c + 3]
        grads[:, c] = (8.0 * (fp - fm) - (fp2 - fm2)) / (12.0 * h)
    # note: the gradient uses GRAD-sized steps scaled to h; accuracy is ample
    out = np.empty(k)
    for i, p in enumerate(points):
        gam = christoffel(metric, p)
        cov = hess[i] - np.einsum("lab,l->ab", gam, grads[i])
        out[i] = float(np.einsum("ab,ab->", ginvs[i], cov))
    return out


class SyngeData:
    """sigma, d sigma and the Laplacian of sigma(. , x') along a geodesic."""

    def __init__(self, sigma, ts, sigma_path, dsigma, lap_sigma, fixed_point):
        self.sigma = float(sigma)
        self.ts = ts
        self.sigma_path = sigma_path
        self.dsigma = dsigma
        self.lap_sigma = lap_sigma
        self.fixed_point = fixed_point


def synge_data(m: MetricField, geo: Geodesic, world=None, family=None,
               fixed="second") -> SyngeData:
    """Differentiate the world function over base points near the path samples.

    ``fixed`` selects which endpoint stays frozen: "second" (sigma(. , x')
    data) or "first" (radial data from the shooting endpoint).
    """
    if world is None:
        world = world_function(m, geo.chart, family)
    q = geo.endpoints[1] if fixed == "second" else geo.endpoints[0]
    length = geo.length
    fracs = 1.0 - geo.ts if fixed == "second" else geo.ts

    sigma_path = 0.5 * (fracs * length) ** 2
    dsigma = np.array([sigma_gradient(world, x, q) for x in geo.xs])
    lap = laplacian_profile(m, world, geo.xs, q)
    return SyngeData(geo.sigma, geo.ts, sigma_path, dsigma, lap, q)
