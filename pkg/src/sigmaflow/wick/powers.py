"""Normal-ordered powers of the field and their behaviour under scaling.

The reference family dresses the k-th power with the smooth coincidence part
of the kernel:

    power_k(omega, P, phi) = sum_{2l <= k} k! / (2^l l! (k-2l)!)
                             < [W_P]^(x) l  (x)  phi^(x)(k-2l), omega >.

Under the background scaling the coincidence part shifts by
-2 log(lambda) g^sharp, which is the entire scaling action on the family.
"""

import math

import numpy as np

from ..errors import SigmaflowError
from ..geometry.background import BackgroundGeometry
from ..hadamard.parametrix import DiscreteParametrix
from .algebra import alpha_map
from .functionals import monomial, symmetrize
from .poly import Poly


def pair_contract(tensor, matrix, pairs):
    """Contract the leading 2*pairs indices of a symmetric tensor with copies
    of a symmetric matrix."""
    t = np.asarray(tensor, dtype=complex)
    for _ in range(pairs):
        t = np.tensordot(np.asarray(matrix), t, axes=([0, 1], [0, 1]))
    return t


def wick_monomial(k, point, omega, w_matrix):
    """The dressed degree-k monomial at one point as a polynomial."""
    total = Poly()
    for l in range(k // 2 + 1):
        comb = math.factorial(k) / (2.0 ** l * math.factorial(l) * math.factorial(k - 2 * l))
        contracted = pair_contract(omega, w_matrix, l)
        total = total + monomial(k - 2 * l, point, contracted).scale(comb)
    return total


def interior_product(vector, tensor):
    """One-index contraction (vector . tensor) lowering the rank by one."""
    return np.tensordot(np.asarray(vector, dtype=complex),
                        np.asarray(tensor, dtype=complex), axes=([0], [0]))


class WickFamily:
    """Interface of a coherent assignment of normal-ordered powers."""

    def functional(self, k, omega_field, P: DiscreteParametrix) -> Poly:
        raise NotImplementedError

    def power(self, k, omega_field, P, phi):
        return complex(self.functional(k, omega_field, P).evaluate(phi))


class HadamardWickFamily(WickFamily):
    """The reference family built from the kernel's coincidence part.

    ``shift_log`` accumulates the logarithms of applied scale factors; the
    coincidence part used by the dressing is [W_P] - 2 shift_log g^sharp.
    """

    def __init__(self, background: BackgroundGeometry, shift_log=0.0):
        self.background = background
        self.shift_log = float(shift_log)

    def g_sharp(self, point):
        return self.background.g.inverse(self.background.psi.at(point))

    def w_matrix(self, P: DiscreteParametrix, i):
        w = P.w_coincide[i]
        if self.shift_log != 0.0:
            w = w - 2.0 * self.shift_log * self.g_sharp(P.points[i])
        return w

    def functional(self, k, omega_field, P):
        total = Poly()
        for i, omega in omega_field.items():
            total = total + wick_monomial(k, i, omega, self.w_matrix(P, i))
        return total

    def scaled(self, lam):
        lam = float(lam)
        if lam <= 0.0:
            raise ValueError("scale factor must be positive")
        return HadamardWickFamily(self.background,
                                  shift_log=self.shift_log + math.log(lam))


class DeformedWickFamily(WickFamily):
    """A family differing from a base one by coefficient tensors.

    ``coefficients`` maps a rank l >= 2 to per-point symmetric rank-l tensors;
    the k-th power picks up binomial(k, k-l) base powers smeared with the
    contracted tensors.
    """

    def __init__(self, base: WickFamily, coefficients):
        self.base = base
        self.coefficients = {int(l): {i: np.asarray(t, dtype=complex)
                                      for i, t in per_point.items()}
                             for l, per_point in coefficients.items()}
        if any(l < 2 for l in self.coefficients):
            raise SigmaflowError("ambiguity coefficients start at rank 2")

    def functional(self, k, omega_field, P):
        total = self.base.functional(k, omega_field, P)
        for low in range(0, k - 1):
            l = k - low
            if l not in self.coefficients:
                continue
            per_point = self.coefficients[l]
            comb = math.comb(k, low)
            contracted = {}
            for i, omega in omega_field.items():
                c = per_point.get(i)
                if c is None:
                    continue
                contracted[i] = pair_free_contract(c, omega)
            if contracted:
                total = total + self.base.functional(low, contracted, P).scale(comb)
        return total


def pair_free_contract(coeff, omega):
    """(c -| omega): contract all indices of c into the leading indices of omega."""
    c = np.asarray(coeff, dtype=complex)
    o = np.asarray(omega, dtype=complex)
    axes_c = list(range(c.ndim))
    axes_o = list(range(c.ndim))
    return np.tensordot(c, o, axes=(axes_c, axes_o))


def wick_power(family: WickFamily, k, omega_field, P, phi):
    """Evaluate the k-th normal-ordered power on a smearing and a section."""
    return family.power(k, omega_field, P, phi)


def derivative_condition_check(family: WickFamily, k, omega_field, P, phi1, phi2):
    """Residual of the defining derivative condition.

    The first derivative of power_k at phi1 in direction phi2 must equal
    k * power_{k-1} with phi2 hooked into the smearing tensor.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    lhs_poly = family.functional(k, omega_field, P).directional_derivative(
        {i: np.asarray(v) for i, v in _as_dict(phi2).items()})
    lhs = complex(lhs_poly.evaluate(phi1))
    hooked = {i: interior_product(_as_dict(phi2)[i], omega)
              for i, omega in omega_field.items() if i in _as_dict(phi2)}
    rhs = k * family.power(k - 1, hooked, P, phi1)
    return abs(lhs - rhs)


def _as_dict(phi):
    if isinstance(phi, dict):
        return phi
    return {i: np.asarray(row) for i, row in enumerate(np.asarray(phi))}


def scale_functional(family: HadamardWickFamily, k, omega_field, P, lam):
    """Decompose the rescaled power into powers of log(lambda).

    Returns a dict mapping j to the coefficient polynomial of log(lambda)^j;
    the j = 0 entry is the unscaled power.  For k = 2 the j = 1 coefficient is
    the constant -2 <g^sharp, omega>; for k = 1 there are no log terms.
    """
    if not isinstance(family, HadamardWickFamily):
        raise SigmaflowError("scaling decomposition requires the coincidence-"
                             "part family")
    lam = float(lam)
    if lam <= 0.0:
        raise ValueError("scale factor must be positive")
    out = {}
    for i, omega in omega_field.items():
        w = family.w_matrix(P, i)
        g_sharp = family.g_sharp(P.points[i])
        for l in range(k // 2 + 1):
            comb = math.factorial(k) / (2.0 ** l * math.factorial(l)
                                        * math.factorial(k - 2 * l))
            for m in range(l + 1):
                factor = comb * math.comb(l, m) * (-2.0) ** m
                t = np.asarray(omega, dtype=complex)
                for _ in range(m):
                    t = np.tensordot(g_sharp, t, axes=([0, 1], [0, 1]))
                t = pair_contract(t, w, l - m)
                term = monomial(k - 2 * l, i, t).scale(factor)
                out[m] = out.get(m, Poly()) + term
    return out


class AlgebraElement:
    """An assignment of functionals to kernels, one value per parametrix."""

    def __init__(self, value_at):
        self._value_at = value_at

    def at(self, P: DiscreteParametrix) -> Poly:
        return self._value_at(P)

    @classmethod
    def from_power(cls, family: WickFamily, k, omega_field):
        return cls(lambda P: family.functional(k, omega_field, P))


def equivariance_check(elem: AlgebraElement, P, Pt, phi):
    """|value at P - the transported value from Pt| evaluated on a section."""
    direct = complex(elem.at(P).evaluate(phi))
    transported = complex(alpha_map(elem.at(Pt), P, Pt).evaluate(phi))
    return abs(direct - transported)
