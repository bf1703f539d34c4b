"""Point-supported polynomial functionals of discrete sections.

A monomial of degree k at a sample point carries a totally symmetric rank-k
coefficient tensor over the target fibre; the quadrature weight is folded into
the tensor as a density factor.  Evaluation pairs the tensor with the k-th
tensor power of the section at that point.
"""

import itertools

import numpy as np

from .poly import Poly


def symmetrize(tensor):
    t = np.asarray(tensor)
    if t.ndim <= 1:
        return t
    out = np.zeros_like(t, dtype=complex)
    perms = list(itertools.permutations(range(t.ndim)))
    for p in perms:
        out = out + np.transpose(t, p)
    return out / len(perms)


def monomial(degree, point, coeff):
    """The functional phi -> <phi^(x) k, coeff> supported at one point."""
    if degree == 0:
        return Poly.constant(complex(np.asarray(coeff).reshape(())))
    coeff = np.asarray(coeff)
    if coeff.ndim != degree:
        raise ValueError(f"coefficient rank {coeff.ndim} != degree {degree}")
    out = Poly()
    for idx in np.ndindex(*coeff.shape):
        val = coeff[idx]
        if val == 0:
            continue
        key = tuple(sorted((int(point), int(a)) for a in idx))
        out._iadd_term(key, complex(val))
    return out


def local_functional(terms):
    """Sum of monomials; ``terms`` is an iterable of (degree, point, coeff)."""
    total = Poly()
    for degree, point, coeff in terms:
        total = total + monomial(degree, point, coeff)
    return total


def evaluate(functional: Poly, phi):
    return functional.evaluate(phi)


def evaluate_brute(terms, phi):
    """Naive re-summation of (degree, point, coeff) terms; test oracle."""
    total = 0.0 + 0.0j
    for degree, point, coeff in terms:
        if degree == 0:
            total += complex(np.asarray(coeff).reshape(()))
            continue
        vec = np.asarray(phi[point] if not isinstance(phi, dict) else phi.get(point))
        acc = np.asarray(coeff, dtype=complex)
        for _ in range(degree):
            acc = np.tensordot(acc, vec, axes=([0], [0]))
        total += complex(acc)
    return total


def functional_derivative(functional: Poly, phi, n, dim):
    """The n-th derivative as per-point symmetric coefficient tensors.

    Local functionals have derivatives supported on the diagonal, so the
    result is a dict mapping a point index to a rank-n symmetric tensor;
    points with vanishing tensor are omitted.
    """
    if n < 1:
        raise ValueError("derivative order must be >= 1")
    points = sorted({i for (i, _) in functional.variables()})
    out = {}
    for i in points:
        tensor = np.zeros((dim,) * n, dtype=complex)
        for idx in np.ndindex(*tensor.shape):
            d = functional
            for a in idx:
                d = d.derivative((i, a))
                if d.is_zero():
                    break
            else:
                tensor[idx] = d.evaluate(phi)
        if np.any(tensor != 0):
            out[i] = tensor
    return out
