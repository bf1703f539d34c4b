"""Geodesics: initial-value integration, boundary-value shooting, exponential map.

Boundary-value problems are solved by shooting with a damped Newton iteration
on the initial velocity (endpoint tolerance 1e-10, at most 50 iterations).
Callers are responsible for staying inside a convex geodesic neighbourhood;
the chart's ``max_separation`` guard is enforced where a chart is supplied.
"""

import numpy as np

from ..errors import ConvexityError, DomainError, ShootingError
from .charts import Chart
from .curvature import christoffel
from .metric import MetricField

BVP_TOL = 1e-10
BVP_MAX_ITER = 50


def _accel(m, x, v):
    gam = christoffel(m, x)
    return -np.einsum("abc,b,c->a", gam, v, v)


def integrate_ivp(m: MetricField, x0, v0, t_end=1.0, steps=None):
    """Classical RK4 for the geodesic equation; returns (ts, xs, vs)."""
    x0 = np.asarray(x0, dtype=float)
    v0 = np.asarray(v0, dtype=float)
    if steps is None:
        steps = _step_count(np.linalg.norm(v0) * abs(t_end))
    if m.flat:
        ts = np.linspace(0.0, t_end, steps + 1)
        xs = x0[None, :] + ts[:, None] * v0[None, :]
        vs = np.broadcast_to(v0, xs.shape).copy()
        return ts, xs, vs
    h = t_end / steps
    ts = np.linspace(0.0, t_end, steps + 1)
    xs = np.empty((steps + 1, x0.size))
    vs = np.empty_like(xs)
    x, v = x0.copy(), v0.copy()
    xs[0], vs[0] = x, v
    for i in range(steps):
        k1x, k1v = v, _accel(m, x, v)
        k2x, k2v = v + 0.5 * h * k1v, _accel(m, x + 0.5 * h * k1x, v + 0.5 * h * k1v)
        k3x, k3v = v + 0.5 * h * k2v, _accel(m, x + 0.5 * h * k2x, v + 0.5 * h * k2v)
        k4x, k4v = v + h * k3v, _accel(m, x + h * k3x, v + h * k3v)
        x = x + (h / 6.0) * (k1x + 2.0 * k2x + 2.0 * k3x + k4x)
        v = v + (h / 6.0) * (k1v + 2.0 * k2v + 2.0 * k3v + k4v)
        xs[i + 1], vs[i + 1] = x, v
    return ts, xs, vs


def _step_count(length, target=1e-10):
    if length <= 0.0 or not np.isfinite(length):
        return 32
    n = (length ** 5 / target) ** 0.25
    return int(min(max(n, 32), 256))


class GeodesicPath:
    """Affinely parametrised geodesic on [0, 1] with evaluable point/velocity."""

    def point(self, t):
        raise NotImplementedError

    def velocity(self, t):
        raise NotImplementedError


class StraightPath(GeodesicPath):
    def __init__(self, x0, v0):
        self.x0 = np.asarray(x0, dtype=float)
        self.v0 = np.asarray(v0, dtype=float)

    def point(self, t):
        return self.x0 + t * self.v0

    def velocity(self, t):
        return self.v0


def _embed(p):
    th, ph = p
    return np.array([np.sin(th) * np.cos(ph), np.sin(th) * np.sin(ph), np.cos(th)])


class GreatCirclePath(GeodesicPath):
    """Great circle on the round 2-sphere, evaluated in the polar chart."""

    def __init__(self, p, q):
        n1 = _embed(p)
        n2 = _embed(q)
        c = float(np.clip(n1 @ n2, -1.0, 1.0))
        self.angle = np.arccos(c)
        if self.angle < 1e-14:
            u = np.zeros(3)
        else:
            u = n2 - c * n1
            u = u / np.linalg.norm(u)
        self.n1 = n1
        self.u = u
        self._phi0 = float(p[1])
        x1, y1, _ = self._xyz(1.0)
        self._phi1 = _unwrap_angle(np.arctan2(y1, x1), self._phi0)

    def _xyz(self, t):
        a = t * self.angle
        return np.cos(a) * self.n1 + np.sin(a) * self.u

    def point(self, t):
        x, y, z = self._xyz(t)
        anchor = self._phi0 + t * (self._phi1 - self._phi0)
        return np.array([np.arccos(np.clip(z, -1.0, 1.0)),
                         _unwrap_angle(np.arctan2(y, x), anchor)])

    def velocity(self, t):
        a = t * self.angle
        r = self._xyz(t)
        dr = self.angle * (-np.sin(a) * self.n1 + np.cos(a) * self.u)
        x, y, z = r
        s2 = x * x + y * y
        th_dot = -dr[2] / max(np.sqrt(max(s2, 0.0)), 1e-300)
        ph_dot = (x * dr[1] - y * dr[0]) / max(s2, 1e-300)
        return np.array([th_dot, ph_dot])


class HermitePath(GeodesicPath):
    """Cubic-Hermite interpolation of a densely integrated geodesic."""

    def __init__(self, ts, xs, vs):
        self.ts = np.asarray(ts)
        self.xs = np.asarray(xs)
        self.vs = np.asarray(vs)
        self._h = self.ts[1] - self.ts[0]

    def _locate(self, t):
        i = int(np.clip(np.floor(t / self._h), 0, len(self.ts) - 2))
        u = (t - self.ts[i]) / self._h
        return i, u

    def point(self, t):
        i, u = self._locate(t)
        h = self._h
        h00 = 2 * u ** 3 - 3 * u ** 2 + 1
        h10 = u ** 3 - 2 * u ** 2 + u
        h01 = -2 * u ** 3 + 3 * u ** 2
        h11 = u ** 3 - u ** 2
        return (h00 * self.xs[i] + h10 * h * self.vs[i]
                + h01 * self.xs[i + 1] + h11 * h * self.vs[i + 1])

    def velocity(self, t):
        i, u = self._locate(t)
        h = self._h
        d00 = (6 * u ** 2 - 6 * u) / h
        d10 = 3 * u ** 2 - 4 * u + 1
        d01 = (-6 * u ** 2 + 6 * u) / h
        d11 = 3 * u ** 2 - 2 * u
        return (d00 * self.xs[i] + d10 * self.vs[i]
                + d01 * self.xs[i + 1] + d11 * self.vs[i + 1])


class Geodesic:
    """A solved boundary-value geodesic with sampled path data."""

    def __init__(self, metric, chart, path, x0, x1, v0, sigma, ts, xs, vs, residual):
        self.metric = metric
        self.chart = chart
        self.path = path
        self.endpoints = (np.asarray(x0, float), np.asarray(x1, float))
        self.v0 = v0
        self.sigma = float(sigma)
        self.ts = ts
        self.xs = xs
        self.vs = vs
        self.residual = float(residual)

    @property
    def length(self):
        return float(np.sqrt(2.0 * self.sigma))


def _path_residual(m, ts, xs, vs):
    """Max norm of (dv/dt + Gamma v v) over interior samples, via central FD."""
    if len(ts) < 5:
        return 0.0
    h = ts[1] - ts[0]
    worst = 0.0
    idx = np.linspace(2, len(ts) - 3, min(7, len(ts) - 4)).astype(int)
    for i in idx:
        dv = (8.0 * (vs[i + 1] - vs[i - 1]) - (vs[i + 2] - vs[i - 2])) / (12.0 * h)
        res = dv - _accel(m, xs[i], vs[i])
        worst = max(worst, float(np.max(np.abs(res))))
    return worst


def _samples_from_path(path, n):
    ts = np.linspace(0.0, 1.0, n)
    xs = np.array([path.point(t) for t in ts])
    vs = np.array([path.velocity(t) for t in ts])
    return ts, xs, vs


def geodesic_solve(m: MetricField, x, x1, chart: Chart = None, samples=17,
                   tol=BVP_TOL, max_iter=BVP_MAX_ITER, enforce_guard=True):
    """Boundary-value geodesic from x to x1 by shooting from x.

    ``sigma`` is the halved squared length, computed from the initial speed of
    the affine parametrisation on [0, 1].
    """
    x = np.asarray(x, dtype=float)
    x1 = np.asarray(x1, dtype=float)
    if chart is not None:
        chart.require(x)
        chart.require(x1)

    guard = separation_guard(m, chart)
    if enforce_guard and np.isfinite(guard):
        d0 = chart.wrap_difference(x1, x) if chart is not None else x1 - x
        proxy = float(np.sqrt(d0 @ m.at(x) @ d0))
        if proxy > 1.25 * guard:
            raise ConvexityError(
                f"separation proxy {proxy:.3g} exceeds guard {guard:.3g}")

    if m.flat:
        v0 = chart.wrap_difference(x1, x) if chart is not None else x1 - x
        path = StraightPath(x, v0)
        ts, xs, vs = _samples_from_path(path, samples)
        sigma = 0.5 * float(v0 @ m.at(x) @ v0)
        geo = Geodesic(m, chart, path, x, x1, v0, sigma, ts, xs, vs, 0.0)
        _post_guard(geo, guard, enforce_guard)
        return geo

    if m.kind == "sphere":
        radius = float(m.params["radius"])
        path = GreatCirclePath(x, x1)
        v0 = path.velocity(0.0)
        ts, xs, vs = _samples_from_path(path, samples)
        sigma = 0.5 * (radius * path.angle) ** 2
        res = _path_residual(m, ts, xs, vs)
        geo = Geodesic(m, chart, path, x, x1, v0, sigma, ts, xs, vs, res)
        _post_guard(geo, guard, enforce_guard)
        return geo

    v = chart.wrap_difference(x1, x) if chart is not None else x1 - x
    target = x1
    miss = None
    steps = None
    for _ in range(max_iter):
        ts, xs, vs = integrate_ivp(m, x, v, steps=steps)
        steps = len(ts) - 1
        miss = xs[-1] - target
        if chart is not None:
            miss = chart.wrap_difference(xs[-1], target)
        err = float(np.max(np.abs(miss)))
        if err < tol:
            break
        jac = _endpoint_jacobian(m, x, v, steps, chart, target)
        try:
            dv = np.linalg.solve(jac, -miss)
        except np.linalg.LinAlgError:
            raise ShootingError("singular shooting Jacobian", last_residual=err) from None
        lam = 1.0
        for _ in range(10):
            _, xs_try, _ = integrate_ivp(m, x, v + lam * dv, steps=steps)
            m_try = xs_try[-1] - target
            if chart is not None:
                m_try = chart.wrap_difference(xs_try[-1], target)
            if float(np.max(np.abs(m_try))) < err:
                break
            lam *= 0.5
        v = v + lam * dv
    else:
        raise ShootingError("geodesic shooting did not converge",
                            last_residual=float(np.max(np.abs(miss))))

    ts, xs, vs = integrate_ivp(m, x, v, steps=max(steps, 32))
    path = HermitePath(ts, xs, vs)
    ts_s, xs_s, vs_s = _samples_from_path(path, samples)
    sigma = 0.5 * float(v @ m.at(x) @ v)
    res = _path_residual(m, ts, xs, vs)
    geo = Geodesic(m, chart, path, x, x1, v, sigma, ts_s, xs_s, vs_s, res)
    _post_guard(geo, guard, enforce_guard)
    return geo


def separation_guard(m: MetricField, chart: Chart = None):
    """Documented max separation: 0.4 x min(curvature radius, injectivity scale).

    Measured in the metric's own length units, so it is invariant under
    constant rescalings of the metric.
    """
    guard = 0.4 * m.curvature_radius
    if chart is not None and m.flat:
        g = m.at(np.zeros(m.dim))
        for c, period in enumerate(chart.periods):
            if period is not None:
                guard = min(guard, 0.4 * 0.5 * period * np.sqrt(g[c, c]))
    return guard


def _post_guard(geo, guard, enforce):
    if not enforce or not np.isfinite(guard):
        return
    if geo.length > guard:
        raise ConvexityError(
            f"geodesic length {geo.length:.3g} exceeds guard {guard:.3g}")


def _endpoint_jacobian(m, x, v, steps, chart, target):
    n = v.size
    h = 1e-6 * max(1.0, float(np.linalg.norm(v)))
    jac = np.empty((n, n))
    for c in range(n):
        e = np.zeros(n)
        e[c] = h
        _, xp, _ = integrate_ivp(m, x, v + e, steps=steps)
        _, xm, _ = integrate_ivp(m, x, v - e, steps=steps)
        if chart is not None:
            col = chart.wrap_difference(xp[-1], xm[-1]) / (2.0 * h)
        else:
            col = (xp[-1] - xm[-1]) / (2.0 * h)
        jac[:, c] = col
    return jac


def _unwrap_angle(angle, anchor):
    """Shift by multiples of 2 pi so the result is within pi of the anchor."""
    return angle + 2.0 * np.pi * np.round((anchor - angle) / (2.0 * np.pi))


def _sphere_exp(p, v):
    """Closed-form exponential on the round 2-sphere (angle coordinates).

    The azimuth of the result is unwrapped to the branch nearest the start
    point so the map stays continuous across the atan2 cut.
    """
    th, ph = p
    n = _embed(p)
    e_th = np.array([np.cos(th) * np.cos(ph), np.cos(th) * np.sin(ph), -np.sin(th)])
    e_ph = np.array([-np.sin(th) * np.sin(ph), np.sin(th) * np.cos(ph), 0.0])
    w = v[0] * e_th + v[1] * e_ph
    ang = np.linalg.norm(w)
    if ang < 1e-300:
        return np.array(p, dtype=float)
    r = np.cos(ang) * n + np.sin(ang) * (w / ang)
    phi_out = _unwrap_angle(np.arctan2(r[1], r[0]), ph)
    return np.array([np.arccos(np.clip(r[2], -1.0, 1.0)), phi_out])


def exponential_map(m: MetricField, p, v, nu, chart: Chart = None, steps=None):
    """exp_p(nu v): solve the initial-value geodesic up to parameter time 1."""
    p = np.asarray(p, dtype=float)
    v = np.asarray(v, dtype=float) * float(nu)
    if not np.any(v):
        return p.copy()
    if m.flat:
        out = p + v
    elif m.name is not None and m.name.startswith("sphere:"):
        out = _sphere_exp(p, v)
    else:
        _, xs, _ = integrate_ivp(m, p, v, steps=steps)
        out = xs[-1]
    if chart is not None and not chart.contains(out):
        raise DomainError(f"exponential map left the chart domain at {out}")
    return out
