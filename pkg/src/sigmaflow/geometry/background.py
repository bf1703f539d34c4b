"""Background data for the linearised model: a map between two Riemannian charts.

The background is the tuple (Sigma-chart, M-chart, psi, gamma, g) with the
base always two-dimensional.  Under the scaling lambda the base metric picks
up lambda^-2 while the target metric is untouched (its scaling exponent is
dim(Sigma) - 2 = 0).
"""

import numpy as np

from ..errors import SigmaflowError
from . import fd
from .charts import Chart, ManifoldFamily, family
from .metric import MetricField


class SigmaMap:
    """A smooth map from the base chart into the target chart."""

    def __init__(self, eval_fn, jacobian=None, hessian=None, h=fd.DEFAULT_H, name=None):
        self._eval = eval_fn
        self._jac = jacobian
        self._hess = hessian
        self._h = h
        self.name = name

    def at(self, x):
        return np.asarray(self._eval(np.asarray(x, dtype=float)), dtype=float)

    def jacobian(self, x):
        """Push-forward components J[a, alpha] = d_alpha psi^a."""
        x = np.asarray(x, dtype=float)
        if self._jac is not None:
            return np.asarray(self._jac(x), dtype=float)
        return fd.grad(self._eval, x, self._h).T  # grad gives (alpha, a)

    def hessian(self, x):
        """Second derivatives H[a, alpha, beta] = d_alpha d_beta psi^a."""
        x = np.asarray(x, dtype=float)
        if self._hess is not None:
            return np.asarray(self._hess(x), dtype=float)
        return np.moveaxis(fd.hess(self._eval, x, self._h), 2, 0)


def identity_map(dim=2):
    eye = np.eye(dim)
    zero = np.zeros((dim, dim, dim))
    return SigmaMap(lambda x: np.array(x, dtype=float),
                    jacobian=lambda x: eye,
                    hessian=lambda x: zero,
                    name="identity")


def constant_map(value):
    value = np.asarray(value, dtype=float)
    d = value.size

    def jac(x):
        return np.zeros((d, np.asarray(x).size))

    def hess(x):
        n = np.asarray(x).size
        return np.zeros((d, n, n))

    return SigmaMap(lambda x: value, jacobian=jac, hessian=hess, name="constant")


def linear_map(matrix, offset=None):
    a = np.asarray(matrix, dtype=float)
    b = np.zeros(a.shape[0]) if offset is None else np.asarray(offset, dtype=float)
    zero = np.zeros((a.shape[0], a.shape[1], a.shape[1]))
    return SigmaMap(lambda x: a @ np.asarray(x, float) + b,
                    jacobian=lambda x: a,
                    hessian=lambda x: zero,
                    name="linear")


class BackgroundGeometry:
    """The object (base chart, target chart; psi, gamma, g).

    ``sigma_world`` is the closed-form world function matching ``gamma`` when
    one is known (the built-in families, possibly conformally rescaled); World
    evaluations fall back to shooting otherwise.
    """

    def __init__(self, sigma_family, m_family, psi: SigmaMap,
                 gamma: MetricField = None, g: MetricField = None,
                 sigma_world="auto"):
        self.sigma = family(sigma_family)
        self.m = family(m_family)
        self.psi = psi
        self.gamma = gamma if gamma is not None else self.sigma.metric
        self.g = g if g is not None else self.m.metric
        if sigma_world == "auto":
            self.sigma_world = (self.sigma.world_function
                                if self.gamma is self.sigma.metric else None)
        else:
            self.sigma_world = sigma_world
        if self.sigma.chart.dim != 2:
            raise SigmaflowError("the base chart must be two-dimensional")
        if self.gamma.dim != 2 or self.g.dim != self.m.chart.dim:
            raise SigmaflowError("metric dimensions inconsistent with charts")

    @property
    def dim_target(self):
        return self.m.chart.dim

    def replace(self, gamma=None, g=None, psi=None, sigma_world=None):
        if sigma_world is None:
            sigma_world = "auto" if gamma is not None else self.sigma_world
        return BackgroundGeometry(self.sigma, self.m,
                                  psi if psi is not None else self.psi,
                                  gamma if gamma is not None else self.gamma,
                                  g if g is not None else self.g,
                                  sigma_world=sigma_world)


def pullback_metric(b: BackgroundGeometry, x):
    """(psi^* g)_{alpha beta} = g_ab(psi(x)) J^a_alpha J^b_beta."""
    x = b.sigma.chart.require(x)
    j = b.psi.jacobian(x)
    g = b.g.at(b.psi.at(x))
    return np.einsum("ab,ax,by->xy", g, j, j)


def harmonic_lagrangian_density(b: BackgroundGeometry, x):
    """tr_gamma(psi^* g); a scalar density w.r.t. the gamma volume form."""
    pg = pullback_metric(b, x)
    return float(np.einsum("xy,xy->", b.gamma.inverse(x), pg))


def scale_background(b: BackgroundGeometry, lam):
    """gamma -> lambda^-2 gamma; g and psi untouched (base dimension 2).

    The closed-form world function, when present, is rescaled alongside:
    sigma is a squared length, so it picks up lambda^-2.
    """
    lam = float(lam)
    if lam <= 0.0:
        raise ValueError("scale factor must be positive")
    if lam == 1.0:
        return b
    world = None
    if b.sigma_world is not None:
        base_world = b.sigma_world
        factor = lam ** -2

        def world(p, q, _w=base_world, _f=factor):
            return _f * _w(p, q)

    return b.replace(gamma=b.gamma.scaled(lam ** -2), sigma_world=world)
