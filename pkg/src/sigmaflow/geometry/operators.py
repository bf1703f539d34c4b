"""The elliptic operator of the linearised model and the expansion checks.

``apply_E`` realises E phi = tr_h(nabla^psi nabla^psi phi) through the local
pull-back-connection formula; sections are supplied as callables over the base
chart and differentiated with order-4 central stencils.
"""

import numpy as np

from ..errors import DomainError, SigmaflowError
from . import fd
from .background import BackgroundGeometry, harmonic_lagrangian_density, pullback_metric
from .curvature import christoffel, christoffel_d1, riemann_lowered
from .geodesics import exponential_map

SECTION_H = 1e-3


def section_derivatives(phi, x, h=SECTION_H, need_mixed=True):
    """Value, gradient and Hessian of a chart-section callable.

    Returns (phi0, dphi, ddphi) with layouts phi0[f...], dphi[alpha, f...],
    ddphi[alpha, beta, f...]; the mixed entries are filled only on request.
    """
    x = np.asarray(x, dtype=float)
    n = x.size
    phi0 = np.asarray(phi(x), dtype=float)
    vals = {}
    for c in range(n):
        e = np.zeros(n)
        e[c] = 1.0
        for k in (1, -1, 2, -2):
            vals[(c, k)] = np.asarray(phi(x + k * h * e), dtype=float)
    dphi = np.empty((n,) + phi0.shape)
    ddphi = np.zeros((n, n) + phi0.shape)
    for c in range(n):
        dphi[c] = (8.0 * (vals[(c, 1)] - vals[(c, -1)])
                   - (vals[(c, 2)] - vals[(c, -2)])) / (12.0 * h)
        ddphi[c, c] = (-vals[(c, 2)] + 16.0 * vals[(c, 1)] - 30.0 * phi0
                       + 16.0 * vals[(c, -1)] - vals[(c, -2)]) / (12.0 * h * h)
    if need_mixed:
        coeffs = {1: 8.0, -1: -8.0, 2: -1.0, -2: 1.0}
        for c in range(n):
            ec = np.zeros(n)
            ec[c] = 1.0
            for d in range(c + 1, n):
                ed = np.zeros(n)
                ed[d] = 1.0
                acc = np.zeros_like(phi0)
                for ic, wc in coeffs.items():
                    for jd, wd in coeffs.items():
                        acc = acc + (wc * wd) * np.asarray(phi(x + ic * h * ec + jd * h * ed))
                mixed = acc / (144.0 * h * h)
                ddphi[c, d] = mixed
                ddphi[d, c] = mixed
    return phi0, dphi, ddphi


def apply_E(b: BackgroundGeometry, phi, x, h=SECTION_H):
    """E phi at x, as a covector over the target fibre.

    ``phi`` maps base points to arrays whose first axis is the target fibre;
    trailing axes are carried along unchanged (used for bitensor columns).
    """
    x = np.asarray(x, dtype=float)
    chart = b.sigma.chart
    for c in range(2):
        e = np.zeros(2)
        e[c] = 2.0 * h
        if not (chart.contains(x + e) and chart.contains(x - e)):
            raise DomainError(f"derivative stencil around {x} leaves the base chart")

    gamma = b.gamma.at(x)
    gamma_inv = np.linalg.inv(gamma)
    gam_base = christoffel(b.gamma, x)
    need_mixed = abs(gamma_inv[0, 1]) > 1e-14

    y = b.psi.at(x)
    g = b.g.at(y)
    gam_tgt = christoffel(b.g, y)
    dgam_tgt = christoffel_d1(b.g, y)
    jac = b.psi.jacobian(x)          # J[l, alpha]
    hpsi = b.psi.hessian(x)          # H[l, alpha, beta]

    phi0, dphi, ddphi = section_derivatives(phi, x, h=h, need_mixed=need_mixed)

    # X[beta, a, ...] = d_beta phi^a + Gamma[g]^a_lc J^l_beta phi^c
    x1 = np.einsum("alc,lB,c...->Ba...", gam_tgt, jac, phi0)
    xmat = dphi + x1

    # dX[alpha, beta, a, ...] = d_alpha X[beta, a, ...]
    t1 = np.einsum("malc,mA,lB,c...->ABa...", dgam_tgt, jac, jac, phi0)
    t2 = np.einsum("alc,lAB,c...->ABa...", gam_tgt, hpsi, phi0)
    t3 = np.einsum("alc,lB,Ac...->ABa...", gam_tgt, jac, dphi)
    dx = np.einsum("ABa...->ABa...", ddphi) + t1 + t2 + t3

    cov = (dx
           - np.einsum("lAB,la...->ABa...", gam_base, xmat)
           + np.einsum("alc,lA,Bc...->ABa...", gam_tgt, jac, xmat))
    return np.einsum("ab,AB,ABa...->b...", g, gamma_inv, cov)


def principal_symbol_check(b: BackgroundGeometry, zeta, x, h=SECTION_H):
    """Symbol matrix g_ab(psi(x)) |d zeta|^2_gamma; defined off the zero section."""
    x = np.asarray(x, dtype=float)
    dz = fd.grad(lambda p: float(zeta(p)), x, h)
    gamma_inv = b.gamma.inverse(x)
    norm2 = float(dz @ gamma_inv @ dz)
    if norm2 < 1e-18:
        raise SigmaflowError("principal symbol undefined: d zeta vanishes at x")
    sym = norm2 * b.g.at(b.psi.at(x))
    if abs(np.linalg.det(sym)) < 1e-14:
        raise SigmaflowError("principal symbol not invertible")
    return sym


class SigmaQuadrature:
    """A finite base-point set with coordinate quadrature weights."""

    def __init__(self, points, weights):
        self.points = np.asarray(points, dtype=float)
        self.weights = np.asarray(weights, dtype=float)

    def __len__(self):
        return len(self.points)

    @classmethod
    def torus_grid(cls, n, period=2.0 * np.pi):
        xs = np.arange(n) * (period / n)
        pts = np.array([[a, bb] for a in xs for bb in xs])
        w = np.full(len(pts), (period / n) ** 2)
        return cls(pts, w)

    @classmethod
    def patch_grid(cls, center, half_width, n):
        cx, cy = center
        xs = np.linspace(cx - half_width, cx + half_width, n)
        ys = np.linspace(cy - half_width, cy + half_width, n)
        step = xs[1] - xs[0] if n > 1 else 2.0 * half_width
        pts = np.array([[a, bb] for a in xs for bb in ys])
        w = np.full(len(pts), step * step)
        return cls(pts, w)


def integrate_density(b: BackgroundGeometry, quad: SigmaQuadrature, density):
    """Quadrature of a scalar density against the gamma volume form."""
    total = 0.0
    for x, w in zip(quad.points, quad.weights):
        total += w * b.gamma.volume_density(x) * float(density(x))
    return total


def perturbed_map_point(b: BackgroundGeometry, phi, x, nu):
    """exp_{psi(x)}(nu phi(x)) evaluated in the target chart."""
    y = b.psi.at(x)
    v = np.asarray(phi(x), dtype=float)
    return exponential_map(b.g, y, v, nu, chart=b.m.chart)


def full_lagrangian(b: BackgroundGeometry, quad: SigmaQuadrature, phi, nu,
                    jac_h=SECTION_H):
    """Quadrature of the harmonic density of the perturbed map psi_nu."""
    if nu == 0.0:
        return integrate_density(b, quad, lambda x: harmonic_lagrangian_density(b, x))

    def psi_nu(x):
        return perturbed_map_point(b, phi, x, nu)

    def density(x):
        jac = fd.grad(psi_nu, x, jac_h).T
        g = b.g.at(psi_nu(x))
        pg = np.einsum("ab,ax,by->xy", g, jac, jac)
        return float(np.einsum("xy,xy->", b.gamma.inverse(x), pg))

    return integrate_density(b, quad, density)


def measured_linear_coefficient(b, quad, phi, delta=1e-3):
    """First nu-derivative of the full Lagrangian, order-4 differences."""
    lp = full_lagrangian(b, quad, phi, delta)
    lm = full_lagrangian(b, quad, phi, -delta)
    lp2 = full_lagrangian(b, quad, phi, 2 * delta)
    lm2 = full_lagrangian(b, quad, phi, -2 * delta)
    return (8.0 * (lp - lm) - (lp2 - lm2)) / (12.0 * delta)


def curvature_vertex(b: BackgroundGeometry, x):
    """theta_cd(x): curvature of the target contracted twice with d psi."""
    x = np.asarray(x, dtype=float)
    jac = b.psi.jacobian(x)
    gamma_inv = b.gamma.inverse(x)
    rl = riemann_lowered(b.g, b.psi.at(x))
    return np.einsum("AB,cadb,aA,bB->cd", gamma_inv, rl, jac, jac)


def kinetic_quadratic(b, quad, phi):
    """Quadrature of <phi, E phi> against the gamma volume form."""
    def density(x):
        return float(np.asarray(phi(x)) @ apply_E(b, phi, x))
    return integrate_density(b, quad, density)


def gradient_quadratic(b, quad, phi):
    """Quadrature of |nabla^psi phi|^2_h; the integrated dual of -<phi, E phi>."""
    from .curvature import christoffel

    def density(x):
        jac = b.psi.jacobian(x)
        y = b.psi.at(x)
        g = b.g.at(y)
        gam_tgt = christoffel(b.g, y)
        phi0, dphi, _ = section_derivatives(phi, x, need_mixed=False)
        xmat = dphi + np.einsum("alc,lB,c->Ba", gam_tgt, jac, phi0)
        ginv = np.linalg.inv(b.gamma.at(x))
        return float(np.einsum("AB,ab,Aa,Bb->", ginv, g, xmat, xmat))

    return integrate_density(b, quad, density)


def curvature_quadratic(b, quad, phi):
    """Quadrature of theta(phi, phi) against the gamma volume form."""
    def density(x):
        v = np.asarray(phi(x))
        return float(v @ curvature_vertex(b, x) @ v)
    return integrate_density(b, quad, density)


def second_order_model(b, quad, phi, nu, linear_coeff=None, kinetic_form="gradient"):
    """L_H + nu (measured linear term) + nu^2 (kinetic + curvature terms).

    The kinetic term is the pull-back Dirichlet density by default; the
    "operator" form -<phi, E phi> is its integrated dual and agrees up to
    quadrature refinement.
    """
    if linear_coeff is None:
        linear_coeff = measured_linear_coefficient(b, quad, phi)
    const = full_lagrangian(b, quad, phi, 0.0)
    if kinetic_form == "gradient":
        kinetic = gradient_quadratic(b, quad, phi)
    else:
        kinetic = -kinetic_quadratic(b, quad, phi)
    quadratic = kinetic - curvature_quadratic(b, quad, phi)
    return const + nu * linear_coeff + nu * nu * quadratic


def expansion_check(b, quad, phi, nu, linear_coeff=None):
    """|full Lagrangian - second-order model| at the given nu."""
    model = second_order_model(b, quad, phi, nu, linear_coeff=linear_coeff)
    return abs(full_lagrangian(b, quad, phi, nu) - model)


def expansion_refinement(b, quad, phi, nus=(0.1, 0.05, 0.025)):
    """Residuals over a nu-refinement plus the fitted log-log slope."""
    lin = measured_linear_coefficient(b, quad, phi)
    residuals = np.array([expansion_check(b, quad, phi, nu, linear_coeff=lin)
                          for nu in nus])
    if np.all(residuals > 0):
        slope = np.polyfit(np.log(nus), np.log(residuals), 1)[0]
    else:
        slope = np.inf
    return residuals, float(slope)


def lagrangian_scale_invariance_check(b, quad, phi, lam, nu=0.05):
    """|second-order model on the scaled background - on the original|."""
    from .background import scale_background

    b_lam = scale_background(b, lam)
    return abs(second_order_model(b_lam, quad, phi, nu)
               - second_order_model(b, quad, phi, nu))
