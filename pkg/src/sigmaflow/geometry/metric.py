"""Chart-local metric fields with analytic or finite-difference derivatives.

A metric field is a smooth map from chart coordinates to a symmetric
positive-definite matrix, together with its first and second coordinate
derivatives.  Built-in families supply analytic derivative closures;
user-supplied metrics fall back to order-4 central differences.
"""

import numpy as np

from ..errors import DegenerateMetricError
from . import fd


class MetricField:
    """Metric components g_ab(p) with derivative access.

    Derivative layouts: ``d1(p)[c, a, b] = d_c g_ab`` and
    ``d2(p)[c, d, a, b] = d_c d_d g_ab``.
    """

    def __init__(self, dim, eval_fn, deriv1=None, deriv2=None, h=fd.DEFAULT_H,
                 name=None, flat=False, kind=None, params=None):
        self.dim = int(dim)
        self._eval = eval_fn
        self._d1 = deriv1
        self._d2 = deriv2
        self._h = h
        self.name = name
        #: constant-coefficient metric; enables straight-line geodesics
        self.flat = flat
        #: structural family tag ("sphere", "hyperbolic", ...) for fast paths
        self.kind = kind
        self.params = dict(params) if params else {}

    def at(self, p):
        g = np.asarray(self._eval(np.asarray(p, dtype=float)), dtype=float)
        if g.shape != (self.dim, self.dim):
            raise ValueError(f"metric eval returned shape {g.shape}, expected {(self.dim, self.dim)}")
        return g

    def d1(self, p):
        p = np.asarray(p, dtype=float)
        if self._d1 is not None:
            return np.asarray(self._d1(p), dtype=float)
        return fd.grad(self._eval, p, self._h)

    def d2(self, p):
        p = np.asarray(p, dtype=float)
        if self._d2 is not None:
            return np.asarray(self._d2(p), dtype=float)
        return fd.hess(self._eval, p, self._h)

    def inverse(self, p):
        g = self.at(p)
        _require_spd(g, p)
        return np.linalg.inv(g)

    def volume_density(self, p):
        """sqrt(det g), the density of the induced volume form."""
        g = self.at(p)
        _require_spd(g, p)
        return float(np.sqrt(np.linalg.det(g)))

    def scaled(self, factor):
        """The metric multiplied by a constant conformal factor.

        Constant-curvature families stay in their family: the effective radius
        picks up sqrt(factor).
        """
        f = float(factor)
        d1 = (lambda p: f * self._d1(p)) if self._d1 is not None else None
        d2 = (lambda p: f * self._d2(p)) if self._d2 is not None else None
        name = None if self.name is None else f"{self.name}*{f:g}"
        params = dict(self.params)
        if self.kind in ("sphere", "hyperbolic"):
            params["radius"] = params["radius"] * np.sqrt(f)
        return MetricField(self.dim, lambda p: f * self._eval(p), d1, d2,
                           h=self._h, name=name, flat=self.flat,
                           kind=self.kind, params=params)

    @property
    def curvature_radius(self):
        if self.kind in ("sphere", "hyperbolic"):
            return float(self.params["radius"])
        return np.inf


def _require_spd(g, p):
    if not np.all(np.isfinite(g)):
        raise DegenerateMetricError(f"metric has non-finite entries at {p}")
    try:
        np.linalg.cholesky(g)
    except np.linalg.LinAlgError:
        raise DegenerateMetricError(f"metric not positive-definite at {p}") from None


def constant_metric(matrix, name="flat"):
    """Metric with constant coefficients (flat chart)."""
    m = np.asarray(matrix, dtype=float)
    dim = m.shape[0]
    zeros1 = np.zeros((dim, dim, dim))
    zeros2 = np.zeros((dim, dim, dim, dim))
    return MetricField(dim, lambda p: m, lambda p: zeros1, lambda p: zeros2,
                       name=name, flat=True)


def euclidean_metric(dim):
    return constant_metric(np.eye(dim), name="flat")


def sphere_metric(radius):
    """Round 2-sphere of the given radius in the polar chart (theta, phi)."""
    r2 = float(radius) ** 2

    def ev(p):
        th = p[0]
        return np.array([[r2, 0.0], [0.0, r2 * np.sin(th) ** 2]])

    def d1(p):
        th = p[0]
        out = np.zeros((2, 2, 2))
        out[0, 1, 1] = r2 * 2.0 * np.sin(th) * np.cos(th)
        return out

    def d2(p):
        th = p[0]
        out = np.zeros((2, 2, 2, 2))
        out[0, 0, 1, 1] = r2 * 2.0 * np.cos(2.0 * th)
        return out

    return MetricField(2, ev, d1, d2, name=f"sphere:{radius:g}", kind="sphere",
                       params={"radius": float(radius)})


def hyperbolic_metric(radius=1.0):
    """Upper half-plane metric r^2 (dx^2 + dy^2) / y^2, curvature -1/r^2."""
    r2 = float(radius) ** 2

    def ev(p):
        y = p[1]
        return (r2 / y ** 2) * np.eye(2)

    def d1(p):
        y = p[1]
        out = np.zeros((2, 2, 2))
        out[1] = (-2.0 * r2 / y ** 3) * np.eye(2)
        return out

    def d2(p):
        y = p[1]
        out = np.zeros((2, 2, 2, 2))
        out[1, 1] = (6.0 * r2 / y ** 4) * np.eye(2)
        return out

    return MetricField(2, ev, d1, d2, name=f"hyperbolic:{radius:g}", kind="hyperbolic",
                       params={"radius": float(radius)})
