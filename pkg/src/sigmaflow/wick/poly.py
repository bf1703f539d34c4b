"""Sparse polynomials in the per-point fibre variables of a discrete section.

A variable is a pair (point index, fibre component).  Monomial keys are
sorted tuples of variables; coefficients are complex.  All of the functional
algebra (products, contractions, derivative maps) reduces to exact arithmetic
on these dictionaries.
"""

import numpy as np


class Poly:
    __slots__ = ("terms",)

    def __init__(self, terms=None):
        self.terms = {}
        if terms:
            for key, val in terms.items():
                if val != 0:
                    self.terms[key] = complex(val)

    @classmethod
    def constant(cls, value):
        p = cls()
        if value != 0:
            p.terms[()] = complex(value)
        return p

    @classmethod
    def variable(cls, point, component):
        return cls({((int(point), int(component)),): 1.0})

    def copy(self):
        p = Poly()
        p.terms = dict(self.terms)
        return p

    def is_zero(self, tol=0.0):
        if tol == 0.0:
            return not self.terms
        return all(abs(v) <= tol for v in self.terms.values())

    def degree(self):
        return max((len(k) for k in self.terms), default=0)

    def variables(self):
        out = set()
        for key in self.terms:
            out.update(key)
        return out

    def _iadd_term(self, key, val):
        cur = self.terms.get(key)
        if cur is None:
            if val != 0:
                self.terms[key] = val
        else:
            cur = cur + val
            if cur == 0:
                del self.terms[key]
            else:
                self.terms[key] = cur

    def __add__(self, other):
        if not isinstance(other, Poly):
            other = Poly.constant(other)
        out = self.copy()
        for key, val in other.terms.items():
            out._iadd_term(key, val)
        return out

    __radd__ = __add__

    def __sub__(self, other):
        if not isinstance(other, Poly):
            other = Poly.constant(other)
        return self + other.scale(-1.0)

    def scale(self, factor):
        factor = complex(factor)
        if factor == 0:
            return Poly()
        return Poly({k: v * factor for k, v in self.terms.items()})

    def __mul__(self, other):
        if not isinstance(other, Poly):
            return self.scale(other)
        out = Poly()
        for k1, v1 in self.terms.items():
            for k2, v2 in other.terms.items():
                key = tuple(sorted(k1 + k2))
                out._iadd_term(key, v1 * v2)
        return out

    __rmul__ = __mul__

    def derivative(self, var):
        """Partial derivative with respect to one variable."""
        out = Poly()
        for key, val in self.terms.items():
            mult = key.count(var)
            if mult:
                reduced = list(key)
                reduced.remove(var)
                out._iadd_term(tuple(reduced), val * mult)
        return out

    def directional_derivative(self, direction):
        """Sum_v direction[v] dF/dv for a per-point vector field."""
        out = Poly()
        for var in self.variables():
            coeff = _component(direction, var)
            if coeff != 0:
                out = out + self.derivative(var).scale(coeff)
        return out

    def evaluate(self, phi):
        """Evaluate at a discrete section (dict point -> vector, or 2-D array)."""
        total = 0.0 + 0.0j
        for key, val in self.terms.items():
            acc = val
            for var in key:
                acc = acc * _component(phi, var)
                if acc == 0:
                    break
            total += acc
        return total

    def conjugate(self):
        return Poly({k: np.conjugate(v) for k, v in self.terms.items()})

    def max_abs_difference(self, other):
        keys = set(self.terms) | set(other.terms)
        return max((abs(self.terms.get(k, 0.0) - other.terms.get(k, 0.0))
                    for k in keys), default=0.0)

    def to_dict(self):
        """JSON-friendly form: sorted list of (variables, re, im) monomials."""
        items = []
        for key in sorted(self.terms):
            val = self.terms[key]
            items.append({"vars": [[i, a] for (i, a) in key],
                          "re": float(val.real), "im": float(val.imag)})
        return {"monomials": items}

    @classmethod
    def from_dict(cls, data):
        out = cls()
        for item in data["monomials"]:
            key = tuple(sorted((int(i), int(a)) for i, a in item["vars"]))
            out._iadd_term(key, complex(item["re"], item["im"]))
        return out

    def __repr__(self):
        n = len(self.terms)
        return f"Poly({n} terms, degree {self.degree()})"


def _component(phi, var):
    i, a = var
    if phi is None:
        return 0.0
    if isinstance(phi, dict):
        vec = phi.get(i)
        return 0.0 if vec is None else complex(np.asarray(vec)[a])
    return complex(np.asarray(phi)[i][a])


def zero_section(n_points, dim):
    return np.zeros((n_points, dim))
