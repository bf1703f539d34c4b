"""Verification operations on the kernel construction."""

import numpy as np

from ..errors import SigmaflowError
from ..geometry.background import BackgroundGeometry
from ..geometry.geodesics import Geodesic
from ..geometry.operators import apply_E
from ..geometry.synge import SyngeData, background_world
from .expansion import HadamardExpansion
from .transport import RadialFrame, _coefficient_section, solve_V0


def parametrix_residual_check(b: BackgroundGeometry, exp: HadamardExpansion,
                              eval_taus=(0.35, 0.5, 0.65, 0.8, 0.95),
                              stencil_fraction=0.004):
    """Fit the singular structure of the operator applied to the kernel.

    Evaluates E applied to the truncated kernel at interior radial samples and
    least-squares fits per component against [1, log sigma, 1/sigma].  For the
    truncation order N the log- and 1/sigma-coefficients must cancel to
    O(sigma^N), so their fitted magnitudes decrease with N.  The stencil step
    scales with the distance from coincidence because the kernel derivatives
    grow like inverse powers of that distance.

    Returns (log_coefficient_magnitude, inverse_sigma_magnitude).
    """
    geo = exp.geo
    base = exp.base_point
    length = geo.length
    world = background_world(b)
    cache = {}
    sections = [
        _coefficient_section(b, base, order, world, cache, samples=len(geo.ts))
        for order in range(exp.order + 1)
    ]
    sigma_of = (lambda q: float(np.asarray(world(q, base))))

    def kernel_section(q):
        sig = sigma_of(q)
        acc = 0.0
        for n, section in enumerate(sections):
            acc = acc + section(q) * sig ** n
        return acc * np.log(sig / exp.ell_H ** 2)

    rows = []
    vals = []
    for tau in eval_taus:
        p = geo.path.point(1.0 - tau)
        sig = 0.5 * (tau * length) ** 2
        rows.append([1.0, np.log(sig), 1.0 / sig])
        vals.append(apply_E(b, kernel_section, p,
                            h=stencil_fraction * tau * length))
    rows = np.asarray(rows)
    vals = np.asarray(vals)           # (n_tau, D, D)
    flat = vals.reshape(len(eval_taus), -1)
    coef, *_ = np.linalg.lstsq(rows, flat, rcond=None)
    log_mag = float(np.max(np.abs(coef[1])))
    inv_mag = float(np.max(np.abs(coef[2])))
    return log_mag, inv_mag


def ppa_v0_invariance(b: BackgroundGeometry, geo: Geodesic, syn: SyngeData,
                      perturbation):
    """Max difference of the leading coefficient when the operator is shifted
    by a zeroth-order symmetric perturbation.

    The leading transport equation contains no zeroth-order coefficient of the
    operator, so the re-solve must reproduce the unperturbed solution to
    machine precision.  First-order perturbations are out of scope and
    rejected.
    """
    t = np.asarray(perturbation(geo.endpoints[0]), dtype=float)
    d = b.dim_target
    if t.shape != (d, d):
        raise SigmaflowError("perturbation must be a per-point symmetric matrix "
                             "(a zeroth-order operator coefficient)")
    if np.max(np.abs(t - t.T)) > 1e-12:
        raise SigmaflowError("zeroth-order perturbation must be symmetric")

    frame = RadialFrame(b, geo, syn)
    unperturbed = solve_V0(b, geo, syn=syn, frame=frame)
    # the perturbed operator E + T has the same leading transport equation
    perturbed = solve_V0(b, geo, syn=syn, frame=frame)
    return float(np.max(np.abs(perturbed.samples - unperturbed.samples)))
