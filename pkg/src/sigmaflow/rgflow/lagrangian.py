"""The interacting part of the model as an algebra element, and its powers."""

import math

import numpy as np

from ..errors import SigmaflowError
from ..geometry.background import BackgroundGeometry, harmonic_lagrangian_density
from ..geometry.operators import (SigmaQuadrature, curvature_quadratic,
                                  full_lagrangian, kinetic_quadratic,
                                  measured_linear_coefficient)
from ..wick.algebra import star_product
from ..wick.functionals import monomial
from ..wick.poly import Poly
from ..wick.powers import AlgebraElement, WickFamily
from .theta import theta_tensor


def interacting_lagrangian(b: BackgroundGeometry, quad: SigmaQuadrature,
                           f_values, family: WickFamily, nu,
                           q_source=None, harmonic_metric=None) -> AlgebraElement:
    """The interaction smeared with f over the quadrature set.

    Degree 0 carries the harmonic density, degree 1 the source term, degree 2
    the curvature vertex dressed by the family:

        L_int(f) = L_H(f) 1 + nu Phi(f Q mu) + (nu^2/2) Phi^2(f theta mu).

    ``harmonic_metric`` substitutes the target metric in the harmonic term
    only (used by the renormalised form at scale lambda).
    """
    f_values = np.asarray(f_values, dtype=float)
    if len(f_values) != len(quad):
        raise SigmaflowError("f must be sampled on the quadrature points")
    nu = float(nu)

    b_harm = b if harmonic_metric is None else b.replace(g=harmonic_metric)
    const = 0.0
    for x, w, f in zip(quad.points, quad.weights, f_values):
        const += f * harmonic_lagrangian_density(b_harm, x) * w * b.gamma.volume_density(x)

    lin = {}
    if q_source is not None:
        for i, (x, w, f) in enumerate(zip(quad.points, quad.weights, f_values)):
            lin[i] = nu * f * np.asarray(q_source(x), dtype=float) \
                * w * b.gamma.volume_density(x)

    omega2 = {}
    for i, (x, w, f) in enumerate(zip(quad.points, quad.weights, f_values)):
        th = theta_tensor(b, x)
        if np.max(np.abs(th)) > 0 and f != 0.0:
            omega2[i] = 0.5 * nu * nu * f * th * w * b.gamma.volume_density(x)

    def value_at(P):
        _check_alignment(P, quad)
        total = Poly.constant(const)
        for i, coeff in lin.items():
            total = total + monomial(1, i, coeff)
        if omega2:
            total = total + family.functional(2, omega2, P)
        return total

    return AlgebraElement(value_at)


def _check_alignment(P, quad):
    if len(P) != len(quad):
        raise SigmaflowError("parametrix points do not match the quadrature")
    for p, q in zip(P.points, quad.points):
        if np.max(np.abs(np.asarray(p) - np.asarray(q))) > 1e-12:
            raise SigmaflowError("parametrix points do not match the quadrature")


def partition_function(elem: AlgebraElement, n_max, P, phi):
    """Coefficients of the formal exponential series of the interaction.

    Entry n is evaluate(L^{* n}) / n!; the series is formal, so orders beyond
    n_max = 3 are intentionally not computed.
    """
    if n_max > 3:
        raise SigmaflowError("the formal series is kept at desk scale (n <= 3)")
    coeffs = [1.0 + 0.0j]
    if n_max == 0:
        return coeffs
    base = elem.at(P)
    power = base
    coeffs.append(complex(power.evaluate(phi)))
    for n in range(2, n_max + 1):
        power = star_product(power, base, P)
        coeffs.append(complex(power.evaluate(phi)) / math.factorial(n))
    return coeffs


def split_check(b, quad, phi_fn, nu):
    """|quadrature of (free + interacting) - the full density| at nu.

    The free part is the operator quadratic form; the interacting part is the
    harmonic term plus the measured linear term plus the curvature quadratic,
    so the sum reproduces the second-order expansion of the full density up to
    the cubic remainder.
    """
    free = -nu * nu * kinetic_quadratic(b, quad, phi_fn)
    lin = measured_linear_coefficient(b, quad, phi_fn)
    interacting = (full_lagrangian(b, quad, phi_fn, 0.0)
                   + nu * lin
                   - nu * nu * curvature_quadratic(b, quad, phi_fn))
    return abs(free + interacting - full_lagrangian(b, quad, phi_fn, nu))
