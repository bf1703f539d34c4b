"""Transport solves for the logarithmic-kernel coefficient tensors.

Along a geodesic from the coincidence point the radial vector field of the
world function satisfies (d sigma)^sharp = tau * (path velocity), so each
transport equation becomes a linear ODE in the affine radial parameter tau.
With mu(tau) = int_0^tau (lap sigma - 2) / (2 u) du the solutions are

    V_0  : u_0(tau) = exp(-mu) g^sharp
    V_n  : u_n(tau) = -exp(-mu) tau^-n / (2 n) *
                      int_0^tau u^(n-1) exp(mu) w(u) du,
           w = frame components of g^sharp E(V_{n-1})

in a frame of the pulled-back target bundle that is parallel along the
geodesic.  The quadrature form builds in the coincidence data
u_n(0) = -w(0) / (2 n^2) automatically.
"""

import numpy as np

from ..errors import SigmaflowError
from ..geometry.background import BackgroundGeometry
from ..geometry.curvature import christoffel
from ..geometry.geodesics import Geodesic, geodesic_solve
from ..geometry.operators import apply_E
from ..geometry.synge import SyngeData, background_world, laplacian_profile


class Bitensor:
    """Coefficient samples along one geodesic, on the radial grid.

    ``samples[i]`` holds the components V^{bc}(p(tau_i), base) where tau runs
    outward from the coincidence point (``samples[0]`` is the coincidence
    value) and the c index lives in the coordinate fibre at the base point.
    """

    def __init__(self, order, taus, samples, base_point, sigma_path,
                 delta=None, forcing=None, mu=None):
        self.order = int(order)
        self.taus = np.asarray(taus)
        self.samples = np.asarray(samples)
        self.base_point = np.asarray(base_point)
        self.sigma_path = np.asarray(sigma_path)
        self.delta = delta
        self.forcing = forcing
        self.mu = mu

    @property
    def coincidence(self):
        return self.samples[0]

    def __len__(self):
        return len(self.taus)


class RadialFrame:
    """Radial grid data shared by all transport solves on one geodesic."""

    def __init__(self, b: BackgroundGeometry, geo: Geodesic, syn: SyngeData = None,
                 world=None):
        self.b = b
        self.geo = geo
        base = geo.endpoints[1]
        self.base = base
        k = len(geo.ts)
        if syn is None:
            if world is None:
                world = background_world(b)
            if b.gamma.flat:
                lap = np.full(k, 2.0)
            else:
                lap = laplacian_profile(b.gamma, world, geo.xs, base)
        else:
            lap = np.asarray(syn.lap_sigma)
        # radial orientation: index 0 at the coincidence point
        self.taus = (1.0 - geo.ts)[::-1].copy()
        self.points = geo.xs[::-1].copy()
        self.velocities = -geo.vs[::-1].copy()
        self.delta = (lap - 2.0)[::-1].copy()
        self.length = geo.length
        self.sigma_path = 0.5 * (self.taus * self.length) ** 2
        self.mu = _cumulative(self.taus, _safe_ratio(self.delta, 2.0 * self.taus))
        self.frames = self._parallel_frames()
        self.frames_inv = np.array([np.linalg.inv(e) for e in self.frames])

    def _parallel_frames(self):
        b, geo = self.b, self.geo
        d = b.dim_target
        k = len(self.taus)
        if b.g.flat:
            return np.broadcast_to(np.eye(d), (k, d, d)).copy()

        def coeff(tau):
            x = geo.path.point(1.0 - tau)
            xdot = -geo.path.velocity(1.0 - tau)
            jac = b.psi.jacobian(x)
            vel_target = jac @ xdot
            gam = christoffel(b.g, b.psi.at(x))
            return np.einsum("alc,l->ac", gam, vel_target)

        frames = np.empty((k, d, d))
        e = np.eye(d)
        frames[0] = e
        for i in range(k - 1):
            t0, t1 = self.taus[i], self.taus[i + 1]
            h = t1 - t0
            k1 = -coeff(t0) @ e
            k2 = -coeff(t0 + 0.5 * h) @ (e + 0.5 * h * k1)
            k3 = -coeff(t0 + 0.5 * h) @ (e + 0.5 * h * k2)
            k4 = -coeff(t1) @ (e + h * k3)
            e = e + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            frames[i + 1] = e
        return frames


def _safe_ratio(num, den):
    out = np.zeros_like(num)
    mask = np.abs(den) > 1e-300
    out[mask] = num[mask] / den[mask]
    return out


def _cumulative(xs, ys):
    """Cumulative integral on a uniform grid.

    Each subinterval is integrated with the cubic through its four nearest
    nodes, which keeps the local error O(h^4) and parity-uniform (a plain
    composite Simpson rule leaves an alternating error that high-order
    differencing of the solution would amplify).
    """
    n = len(xs)
    h = xs[1] - xs[0]
    ys = np.asarray(ys, dtype=float)
    inc = np.empty(n - 1)
    inc[0] = h * (9.0 * ys[0] + 19.0 * ys[1] - 5.0 * ys[2] + ys[3]) / 24.0
    inc[-1] = h * (9.0 * ys[-1] + 19.0 * ys[-2] - 5.0 * ys[-3] + ys[-4]) / 24.0
    if n > 3:
        mid = (-ys[:-3] + 13.0 * ys[1:-2] + 13.0 * ys[2:-1] - ys[3:]) * (h / 24.0)
        inc[1:-1] = mid
    out = np.zeros(n)
    out[1:] = np.cumsum(inc)
    return out


def solve_V0(b: BackgroundGeometry, geo: Geodesic, syn: SyngeData = None,
             frame: RadialFrame = None) -> Bitensor:
    """Leading transport coefficient with coincidence value g^sharp."""
    if frame is None:
        frame = RadialFrame(b, geo, syn)
    u0 = b.g.inverse(b.psi.at(frame.base))
    scal = np.exp(-frame.mu)
    samples = np.einsum("kbA,k,Ac->kbc", frame.frames, scal, u0)
    return Bitensor(0, frame.taus, samples, frame.base, frame.sigma_path,
                    delta=frame.delta, mu=frame.mu)


def solve_Vn(b: BackgroundGeometry, geo: Geodesic, syn: SyngeData, prev: Bitensor,
             n: int, frame: RadialFrame = None, stencil_h=0.04, cache=None) -> Bitensor:
    """Higher transport coefficient, forced by the operator applied to V_{n-1}.

    The forcing is evaluated through a geodesic-fan stencil: the previous
    coefficient is re-solved along geodesics to every stencil point.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if prev is not None and prev.order != n - 1:
        raise SigmaflowError(f"previous coefficient has order {prev.order}, expected {n - 1}")
    if frame is None:
        frame = RadialFrame(b, geo, syn)
    cache = {} if cache is None else cache
    if prev is not None:
        for i, tau in enumerate(frame.taus):
            cache[(_key(frame.points[i]), n - 1)] = prev.samples[i]

    world = background_world(b)
    k = len(frame.taus)
    d = b.dim_target
    section = _coefficient_section(b, frame.base, n - 1, world, cache,
                                   samples=len(geo.ts))
    forcing = np.empty((k, d, d))
    for i in range(k):
        p = frame.points[i]
        ev = apply_E(b, section, p, h=stencil_h)        # (a, c)
        ginv = b.g.inverse(b.psi.at(p))
        forcing[i] = ginv @ ev
    w = np.einsum("kAd,kdc->kAc", frame.frames_inv, forcing)

    emu = np.exp(frame.mu)
    integrand = (frame.taus ** (n - 1))[:, None, None] * emu[:, None, None] * w
    integral = np.empty_like(integrand)
    for a in range(d):
        for c in range(d):
            integral[:, a, c] = _cumulative(frame.taus, integrand[:, a, c])
    un = np.empty((k, d, d))
    un[0] = -w[0] / (2.0 * n * n)
    taun = frame.taus[1:] ** n
    un[1:] = -(np.exp(-frame.mu[1:]) / (2.0 * n))[:, None, None] \
        * integral[1:] / taun[:, None, None]
    samples = np.einsum("kbA,kAc->kbc", frame.frames, un)
    return Bitensor(n, frame.taus, samples, frame.base, frame.sigma_path,
                    delta=frame.delta, forcing=forcing, mu=frame.mu)


def _key(p):
    return tuple(np.round(np.asarray(p, dtype=float), 12))


def _coefficient_section(b, base, order, world, cache, samples=33):
    """q -> V_order(q, base) as a chart-section callable with memoisation."""

    def section(q):
        key = (_key(q), order)
        if key in cache:
            return cache[key]
        val = _solve_at_point(b, base, np.asarray(q, dtype=float), order, world,
                              cache, samples)
        cache[key] = val
        return val

    return section


def _solve_at_point(b, base, q, order, world, cache, samples):
    if order == 0 and np.allclose(q, base, atol=1e-14):
        return b.g.inverse(b.psi.at(base))
    geo = geodesic_solve(b.gamma, q, base, chart=b.sigma.chart, samples=samples,
                         enforce_guard=False)
    frame = RadialFrame(b, geo, world=world)
    sol = solve_V0(b, geo, frame=frame)
    for m in range(1, order + 1):
        sol = solve_Vn(b, geo, None, sol, m, frame=frame, cache=cache)
    return sol.samples[-1]


def transport_residual(b: BackgroundGeometry, geo: Geodesic, coeff: Bitensor):
    """Back-substitution residual of the transport equation, per radial sample.

    Uses order-4 differences of the solved samples in tau; the forcing and
    lap-sigma samples stored during the solve are reused.
    """
    taus = coeff.taus
    k = len(taus)
    h = taus[1] - taus[0]
    v = coeff.samples
    dv = np.empty_like(v)
    fwd = np.array([-25.0, 48.0, -36.0, 16.0, -3.0]) / (12.0 * h)
    for i in range(k):
        if 2 <= i <= k - 3:
            dv[i] = (8.0 * (v[i + 1] - v[i - 1]) - (v[i + 2] - v[i - 2])) / (12.0 * h)
        elif i < 2:
            dv[i] = np.einsum("s,s...->...", fwd, v[i:i + 5])
        else:
            dv[i] = -np.einsum("s,s...->...", fwd, v[i::-1][:5])

    n = coeff.order
    res = np.zeros_like(v)
    for i, tau in enumerate(taus):
        x = geo.path.point(1.0 - tau)
        xdot = -geo.path.velocity(1.0 - tau)
        if b.g.flat:
            conn = np.zeros_like(v[i])
        else:
            jac = b.psi.jacobian(x)
            gam = christoffel(b.g, b.psi.at(x))
            conn = np.einsum("blc,l,ce->be", gam, jac @ xdot, v[i])
        nabla = dv[i] + conn
        nfac = max(n, 1)
        res[i] = 2.0 * nfac * tau * nabla + nfac * v[i] * (coeff.delta[i] + 2.0 * n)
        if coeff.forcing is not None:
            res[i] = res[i] + coeff.forcing[i]
    return np.max(np.abs(res), axis=(1, 2))
