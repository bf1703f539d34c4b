"""The deformed product and the isomorphisms between kernel choices.

The product contracts functional derivatives against kernel blocks,

    F *_P G = F G + sum_{n >= 1} (1/n!) < F^(n), P^(x) n G^(n) >,

and terminates because the functionals are polynomial.  Same-point
contractions use the regularised diagonal plus the smooth coincidence part.
The change-of-kernel map contracts with the difference of two kernels sharing
the same singular part, whose diagonal is the coincidence-part difference.
"""

import math

from ..errors import SigmaflowError
from ..hadamard.parametrix import DiscreteParametrix
from .poly import Poly


def _kernel_entry(P: DiscreteParametrix, u, v):
    (i, a), (j, c) = u, v
    return complex(P.block(i, j)[a, c])


def star_product(F: Poly, G: Poly, P: DiscreteParametrix) -> Poly:
    """F *_P G via iterated single contractions of the pair (F, G)."""
    total = F * G
    pairs = [(1.0 + 0.0j, F, G)]
    n = 0
    while pairs:
        n += 1
        new_pairs = []
        for coeff, a, b in pairs:
            for u in a.variables():
                da = a.derivative(u)
                if da.is_zero():
                    continue
                for v in b.variables():
                    db = b.derivative(v)
                    if db.is_zero():
                        continue
                    k = coeff * _kernel_entry(P, u, v)
                    if k != 0:
                        new_pairs.append((k, da, db))
        if not new_pairs:
            break
        pairs = new_pairs
        fact = 1.0 / math.factorial(n)
        for coeff, a, b in pairs:
            total = total + (a * b).scale(coeff * fact)
    return total


def _difference_entry(P, Pt, u, v):
    (i, a), (j, c) = u, v
    if i == j:
        return complex(P.w_coincide[i][a, c] - Pt.w_coincide[i][a, c])
    return complex(P.block(i, j)[a, c] - Pt.block(i, j)[a, c])


def _check_compatible(P: DiscreteParametrix, Pt: DiscreteParametrix):
    if len(P) != len(Pt):
        raise SigmaflowError("kernel point sets differ in size")
    for p, q in zip(P.points, Pt.points):
        if max(abs(float(x - y)) for x, y in zip(p, q)) > 1e-12:
            raise SigmaflowError("kernel point sets differ")
    if abs(P.ell_H - Pt.ell_H) > 1e-15:
        raise SigmaflowError("kernels carry different reference lengths "
                             "(their singular parts would not cancel)")


def alpha_map(F: Poly, P: DiscreteParametrix, Pt: DiscreteParametrix) -> Poly:
    """Transport a functional from the Pt-algebra to the P-algebra.

    exp[Upsilon_{P - Pt}] F = sum_n 1/(2^n n!) < (P - Pt)^(x) n, F^(2n) >.
    """
    _check_compatible(P, Pt)
    total = F
    cur = F
    n = 0
    while True:
        n += 1
        nxt = Poly()
        for u in cur.variables():
            du = cur.derivative(u)
            if du.is_zero():
                continue
            for v in du.variables():
                dv = du.derivative(v)
                if dv.is_zero():
                    continue
                k = _difference_entry(P, Pt, u, v)
                if k != 0:
                    nxt = nxt + dv.scale(k)
        if nxt.is_zero():
            break
        cur = nxt
        total = total + cur.scale(1.0 / (2.0 ** n * math.factorial(n)))
    return total


def involution(F: Poly) -> Poly:
    """Complex conjugation of coefficients: F*(phi) = conj(F(conj-phi))."""
    return F.conjugate()
