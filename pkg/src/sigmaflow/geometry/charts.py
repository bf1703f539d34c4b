"""Single-chart manifold descriptors and the built-in family registry.

Each manifold is one coordinate chart with optional periodic identifications
(torus) or polar-cap guard bands (sphere).  Family identifiers, used by the
CLI config, are ``"flat"``/``"flat:d"``, ``"torus"``/``"torus:d"``,
``"sphere:r"`` and ``"hyperbolic"``/``"hyperbolic:r"``.
"""

import numpy as np

from ..errors import DomainError
from .metric import euclidean_metric, sphere_metric, hyperbolic_metric

#: polar-cap guard band for the sphere chart, in radians
SPHERE_CAP_GUARD = 0.15
#: convexity guard: max geodesic separation as a fraction of the curvature radius
CONVEXITY_FRACTION = 0.4


class Chart:
    """One coordinate chart: dimension, periodicities and domain guards."""

    def __init__(self, dim, periods=None, lower=None, upper=None, name=None,
                 curvature_radius=np.inf, injectivity_scale=np.inf):
        self.dim = int(dim)
        self.periods = tuple(periods) if periods is not None else (None,) * self.dim
        self.lower = np.full(self.dim, -np.inf) if lower is None else np.asarray(lower, float)
        self.upper = np.full(self.dim, np.inf) if upper is None else np.asarray(upper, float)
        self.name = name
        self.curvature_radius = float(curvature_radius)
        self.injectivity_scale = float(injectivity_scale)

    def contains(self, p):
        p = np.asarray(p, dtype=float)
        if p.shape != (self.dim,) or not np.all(np.isfinite(p)):
            return False
        for c in range(self.dim):
            if self.periods[c] is None and not (self.lower[c] <= p[c] <= self.upper[c]):
                return False
        return True

    def require(self, p):
        if not self.contains(p):
            raise DomainError(f"point {np.asarray(p)} outside chart domain '{self.name}'")
        return np.asarray(p, dtype=float)

    def wrap_difference(self, a, b):
        """Chart difference a - b using minimal images on periodic axes."""
        d = np.asarray(a, float) - np.asarray(b, float)
        for c, period in enumerate(self.periods):
            if period is not None:
                d[c] = (d[c] + period / 2.0) % period - period / 2.0
        return d

    @property
    def max_separation(self):
        """Documented convexity guard on geodesic separations."""
        return CONVEXITY_FRACTION * min(self.curvature_radius, self.injectivity_scale)


class ManifoldFamily:
    """A chart plus its metric and, when available, a closed-form world function."""

    def __init__(self, chart, metric, world_function=None):
        self.chart = chart
        self.metric = metric
        #: ``sigma(p, q)`` -> halved squared geodesic distance, or None
        self.world_function = world_function


def _flat_family(dim):
    chart = Chart(dim, name=f"flat:{dim}")
    metric = euclidean_metric(dim)

    def sigma(p, q):
        d = np.asarray(p, float) - np.asarray(q, float)
        return 0.5 * np.sum(d * d, axis=-1)

    return ManifoldFamily(chart, metric, sigma)


def _torus_family(dim, period=2.0 * np.pi):
    chart = Chart(dim, periods=(period,) * dim, name=f"torus:{dim}",
                  injectivity_scale=period / 2.0)
    metric = euclidean_metric(dim)

    def sigma(p, q):
        d = np.asarray(p, float) - np.asarray(q, float)
        d = (d + period / 2.0) % period - period / 2.0
        return 0.5 * np.sum(d * d, axis=-1)

    return ManifoldFamily(chart, metric, sigma)


def _sphere_family(radius):
    chart = Chart(2, periods=(None, 2.0 * np.pi),
                  lower=(SPHERE_CAP_GUARD, -np.inf),
                  upper=(np.pi - SPHERE_CAP_GUARD, np.inf),
                  name=f"sphere:{radius:g}",
                  curvature_radius=radius,
                  injectivity_scale=np.pi * radius / 2.0)
    metric = sphere_metric(radius)

    def sigma(p, q):
        p = np.asarray(p, float)
        q = np.asarray(q, float)
        th1, ph1 = p[..., 0], p[..., 1]
        th2, ph2 = q[..., 0], q[..., 1]
        c = (np.cos(th1) * np.cos(th2)
             + np.sin(th1) * np.sin(th2) * np.cos(ph1 - ph2))
        ang = np.arccos(np.clip(c, -1.0, 1.0))
        return 0.5 * (radius * ang) ** 2

    return ManifoldFamily(chart, metric, sigma)


def _hyperbolic_family(radius):
    chart = Chart(2, lower=(-np.inf, 1e-8), upper=(np.inf, np.inf),
                  name=f"hyperbolic:{radius:g}", curvature_radius=radius)
    metric = hyperbolic_metric(radius)

    def sigma(p, q):
        p = np.asarray(p, float)
        q = np.asarray(q, float)
        dx = p[..., 0] - q[..., 0]
        dy = p[..., 1] - q[..., 1]
        arg = 1.0 + (dx * dx + dy * dy) / (2.0 * p[..., 1] * q[..., 1])
        d = radius * np.arccosh(np.maximum(arg, 1.0))
        return 0.5 * d * d

    return ManifoldFamily(chart, metric, sigma)


def family(identifier, dim=2):
    """Resolve a family identifier like ``"sphere:1.5"`` to a ManifoldFamily."""
    if isinstance(identifier, ManifoldFamily):
        return identifier
    parts = str(identifier).split(":")
    kind = parts[0]
    if kind == "flat":
        return _flat_family(int(parts[1]) if len(parts) > 1 else dim)
    if kind == "torus":
        return _torus_family(int(parts[1]) if len(parts) > 1 else dim)
    if kind == "sphere":
        return _sphere_family(float(parts[1]) if len(parts) > 1 else 1.0)
    if kind == "hyperbolic":
        return _hyperbolic_family(float(parts[1]) if len(parts) > 1 else 1.0)
    raise ValueError(f"unknown manifold family {identifier!r}")
