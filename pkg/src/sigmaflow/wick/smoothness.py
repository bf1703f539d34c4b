"""Desk-scale smoothness proxy for vacuum values along background variations.

The literal microlocal regularity condition is not checkable in finite
arithmetic; instead the vacuum expectation of a power is sampled along a
smooth one-parameter family of backgrounds/kernels and its divided differences
up to third order are required to converge under grid refinement.
"""

import numpy as np


def vacuum_value(family, k, omega_field, P):
    dim = P.dim
    zero = {i: np.zeros(dim) for i in range(len(P))}
    return family.power(k, omega_field, P, zero).real


def divided_differences(fn, s0, h, order):
    """Central finite-difference estimate of the order-th derivative at s0."""
    if order == 1:
        return (fn(s0 + h) - fn(s0 - h)) / (2.0 * h)
    if order == 2:
        return (fn(s0 + h) - 2.0 * fn(s0) + fn(s0 - h)) / (h * h)
    if order == 3:
        return (fn(s0 + 2 * h) - 2.0 * fn(s0 + h) + 2.0 * fn(s0 - h)
                - fn(s0 - 2 * h)) / (2.0 * h ** 3)
    raise ValueError("supported orders are 1..3")


def vacuum_family_smoothness_proxy(family_path, k, omega_field, s0=0.0,
                                   h0=0.08, refinements=3, orders=(1, 2, 3)):
    """Divided differences of s -> vacuum value over a refining step sequence.

    ``family_path`` maps the parameter s to a (family, kernel) pair built on
    the varied background.  Returns {order: [estimates]} with one estimate per
    refinement level h0, h0/2, ...; bounded, converging columns are the
    smoothness proxy.
    """

    def g(s):
        fam, P = family_path(s)
        return vacuum_value(fam, k, omega_field, P)

    out = {}
    for order in orders:
        ests = []
        h = h0
        for _ in range(refinements):
            ests.append(divided_differences(g, s0, h, order))
            h *= 0.5
        out[order] = ests
    return out


def convergence_ratios(estimates):
    """|e_{j+1} - e_j| sequence; shrinking gaps indicate convergence."""
    return [abs(b - a) for a, b in zip(estimates, estimates[1:])]
