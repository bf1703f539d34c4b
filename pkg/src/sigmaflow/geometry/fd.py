"""Order-4 central finite-difference stencils used as derivative fallbacks."""

import numpy as np

DEFAULT_H = 1e-4


def grad(f, x, h=DEFAULT_H):
    """First derivatives of f along every coordinate, shape (n,) + shape(f)."""
    x = np.asarray(x, dtype=float)
    n = x.size
    out = []
    for c in range(n):
        e = np.zeros(n)
        e[c] = 1.0
        out.append(
            (8.0 * (np.asarray(f(x + h * e)) - np.asarray(f(x - h * e)))
             - (np.asarray(f(x + 2 * h * e)) - np.asarray(f(x - 2 * h * e)))) / (12.0 * h)
        )
    return np.array(out)


def hess(f, x, h=DEFAULT_H):
    """Second derivatives, shape (n, n) + shape(f); symmetric in the two axes."""
    x = np.asarray(x, dtype=float)
    n = x.size
    f0 = np.asarray(f(x))
    out = np.zeros((n, n) + f0.shape)
    for c in range(n):
        e = np.zeros(n)
        e[c] = 1.0
        out[c, c] = (-np.asarray(f(x + 2 * h * e)) + 16.0 * np.asarray(f(x + h * e))
                     - 30.0 * f0
                     + 16.0 * np.asarray(f(x - h * e)) - np.asarray(f(x - 2 * h * e))) / (12.0 * h * h)
    for c in range(n):
        ec = np.zeros(n)
        ec[c] = 1.0

        def dfc(y, ec=ec):
            return (8.0 * (np.asarray(f(y + h * ec)) - np.asarray(f(y - h * ec)))
                    - (np.asarray(f(y + 2 * h * ec)) - np.asarray(f(y - 2 * h * ec)))) / (12.0 * h)

        for d in range(c + 1, n):
            ed = np.zeros(n)
            ed[d] = 1.0
            mixed = (8.0 * (dfc(x + h * ed) - dfc(x - h * ed))
                     - (dfc(x + 2 * h * ed) - dfc(x - 2 * h * ed))) / (12.0 * h)
            out[c, d] = mixed
            out[d, c] = mixed
    return out
