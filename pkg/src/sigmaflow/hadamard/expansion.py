"""Assembled logarithmic kernels and their behaviour under background scaling."""

import numpy as np

from ..errors import SingularEvaluationError
from ..geometry.background import BackgroundGeometry, scale_background
from ..geometry.geodesics import Geodesic, geodesic_solve
from ..geometry.synge import synge_data
from .transport import Bitensor, RadialFrame, solve_V0, solve_Vn

DEFAULT_ELL = 1.0


class HadamardExpansion:
    """Coefficient tensors V_0..V_N along one geodesic plus a reference length.

    The fan step used by the solve is kept so that independent re-solves (for
    example on a rescaled background) discretise identically.
    """

    def __init__(self, background, geo, coeffs, ell_H=DEFAULT_ELL,
                 stencil_h=0.02):
        self.background = background
        self.geo = geo
        self.coeffs = list(coeffs)
        self.ell_H = float(ell_H)
        self.stencil_h = float(stencil_h)
        if self.ell_H <= 0.0:
            raise ValueError("the reference length must be positive")

    @property
    def order(self):
        return len(self.coeffs) - 1

    @property
    def base_point(self):
        return self.coeffs[0].base_point

    @property
    def taus(self):
        return self.coeffs[0].taus

    @property
    def sigma_path(self):
        return self.coeffs[0].sigma_path


def build_expansion(b: BackgroundGeometry, geo: Geodesic, order=1,
                    ell_H=DEFAULT_ELL, syn=None, stencil_h=0.02) -> HadamardExpansion:
    """Solve the transport hierarchy up to the requested order along ``geo``."""
    frame = RadialFrame(b, geo, syn)
    coeffs = [solve_V0(b, geo, syn=syn, frame=frame)]
    cache = {}
    for n in range(1, order + 1):
        coeffs.append(solve_Vn(b, geo, syn, coeffs[-1], n, frame=frame,
                               stencil_h=stencil_h, cache=cache))
    return HadamardExpansion(b, geo, coeffs, ell_H=ell_H, stencil_h=stencil_h)


def _interp(taus, samples, s):
    out = np.empty(samples.shape[1:])
    for idx in np.ndindex(*samples.shape[1:]):
        out[idx] = np.interp(s, taus, samples[(slice(None),) + idx])
    return out


def hadamard_kernel(exp: HadamardExpansion, s):
    """Truncated kernel sum_n V_n sigma^n log(sigma / ell^2) at radial parameter s.

    ``s`` is the affine radial parameter in (0, 1] measured from the
    coincidence point along the expansion's geodesic.
    """
    s = float(s)
    if s <= 0.0:
        raise SingularEvaluationError(
            "kernel is logarithmically singular at coincidence; "
            "use the cell-regularised diagonal instead")
    length = exp.geo.length
    sigma = 0.5 * (s * length) ** 2
    acc = np.zeros_like(exp.coeffs[0].samples[0])
    for n, coeff in enumerate(exp.coeffs):
        acc = acc + _interp(exp.taus, coeff.samples, s) * sigma ** n
    return acc * np.log(sigma / exp.ell_H ** 2)


def coefficient_sum(exp: HadamardExpansion, i):
    """sum_n V_n sigma^n at the i-th radial sample (the kernel prefactor)."""
    sigma = exp.sigma_path[i]
    acc = np.zeros_like(exp.coeffs[0].samples[0])
    for n, coeff in enumerate(exp.coeffs):
        acc = acc + coeff.samples[i] * sigma ** n
    return acc


def rescaled_expansion(exp: HadamardExpansion, lam) -> HadamardExpansion:
    """Independent re-solve of the hierarchy on the scaled background.

    The geodesic is re-solved with the scaled base metric; its trace and
    samples coincide with the original ones while sigma picks up lambda^-2.
    """
    lam = float(lam)
    b_lam = scale_background(exp.background, lam)
    x0, x1 = exp.geo.endpoints
    geo_lam = geodesic_solve(b_lam.gamma, x0, x1, chart=exp.geo.chart,
                             samples=len(exp.geo.ts))
    return build_expansion(b_lam, geo_lam, order=exp.order, ell_H=exp.ell_H,
                           stencil_h=exp.stencil_h)


def coincidence_shift(w_coincide, lam, g_sharp):
    """The scaling action on the smooth coincidence part:
    [W] -> [W] - 2 log(lambda) g^sharp."""
    lam = float(lam)
    if lam <= 0.0:
        raise ValueError("scale factor must be positive")
    return np.asarray(w_coincide) - 2.0 * np.log(lam) * np.asarray(g_sharp)


def scaling_shift_check(exp: HadamardExpansion, lam, exp_lam: HadamardExpansion = None):
    """Residuals of the kernel scaling law under an independent scaled solve.

    Returns (kernel_residual, coincidence_residual): the first is
    max_samples |H_lam - H + 2 log(lam) sum_n V_n sigma^n| over the interior
    radial samples, the second checks the bookkeeping form of the coincidence
    shift against ``coincidence_shift`` exactly.
    """
    lam = float(lam)
    if exp_lam is None:
        exp_lam = rescaled_expansion(exp, lam)
    worst = 0.0
    for i in range(1, len(exp.taus)):
        sig = exp.sigma_path[i]
        sig_l = exp_lam.sigma_path[i]
        h = coefficient_sum(exp, i) * np.log(sig / exp.ell_H ** 2)
        h_l = coefficient_sum(exp_lam, i) * np.log(sig_l / exp_lam.ell_H ** 2)
        shift = h_l - h + 2.0 * np.log(lam) * coefficient_sum(exp, i)
        worst = max(worst, float(np.max(np.abs(shift))))

    b = exp.background
    g_sharp = b.g.inverse(b.psi.at(exp.base_point))
    w = 0.3 * g_sharp + 0.1 * np.eye(b.dim_target)
    shifted = coincidence_shift(w, lam, g_sharp)
    coin = float(np.max(np.abs(shifted - (w - 2.0 * np.log(lam) * g_sharp))))
    return worst, coin
