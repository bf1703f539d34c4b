"""Sample-point kernel matrices with a cell-regularised diagonal.

The off-diagonal blocks are the truncated logarithmic kernel plus a smooth
symmetric remainder; the diagonal of the singular part is replaced by its
exact average over a geodesic disk whose area equals the quadrature weight:

    avg over disk of area A of log(r^2 / (2 ell^2)) = log(A / (2 pi ell^2)) - 1.

Any fixed convention works here: everything built on top of the parametrix is
required (and tested) to depend only on the smooth coincidence part.
"""

import numpy as np

from ..errors import ConvexityError
from ..geometry.background import BackgroundGeometry
from ..geometry.geodesics import geodesic_solve, separation_guard
from .transport import RadialFrame, solve_V0, solve_Vn
from .expansion import DEFAULT_ELL


class DiscreteParametrix:
    """Kernel blocks over a finite base-point set.

    ``kernel[(i, j)]`` for i < j holds K_ij; symmetry K_ji = K_ij^T holds by
    construction through the ``block`` accessor.  ``w_coincide`` is the smooth
    coincidence part and ``diag_reg`` the cell-regularised singular diagonal.
    """

    def __init__(self, points, areas, kernel, w_coincide, diag_reg, ell_H):
        self.points = [np.asarray(p, dtype=float) for p in points]
        self.areas = np.asarray(areas, dtype=float)
        self.kernel = kernel
        self.w_coincide = np.asarray(w_coincide)
        self.diag_reg = np.asarray(diag_reg)
        self.ell_H = float(ell_H)

    def __len__(self):
        return len(self.points)

    @property
    def dim(self):
        return self.w_coincide.shape[-1]

    def block(self, i, j):
        """K_ij including the regularised + smooth diagonal at i == j."""
        if i == j:
            return self.diag_reg[i] + self.w_coincide[i]
        if (i, j) in self.kernel:
            return self.kernel[(i, j)]
        return self.kernel[(j, i)].T

    def smooth_block(self, i, j):
        """The smooth part only; well-defined diagonal (used by the iso maps)."""
        if i == j:
            return self.w_coincide[i]
        return None

    def with_w_coincide(self, new_w, smooth_off_diagonal=None):
        """A parametrix differing by a smooth symmetric remainder."""
        kernel = dict(self.kernel)
        if smooth_off_diagonal is not None:
            kernel = {}
            for (i, j), block in self.kernel.items():
                kernel[(i, j)] = block + smooth_off_diagonal(self.points[i], self.points[j])
        return DiscreteParametrix(self.points, self.areas, kernel,
                                  np.asarray(new_w), self.diag_reg, self.ell_H)


def diagonal_regularisation(v0_coincide, area, ell_H):
    """Exact disk average of the logarithmic kernel over a cell of given area."""
    return np.asarray(v0_coincide) * (np.log(area / (2.0 * np.pi * ell_H ** 2)) - 1.0)


def build_discrete_parametrix(b: BackgroundGeometry, points, weights,
                              order=0, ell_H=DEFAULT_ELL, w_smooth=None,
                              samples=33, stencil_h=0.02) -> DiscreteParametrix:
    """Assemble kernel blocks from pairwise transport solves.

    ``weights`` are coordinate quadrature weights; cell areas used by the
    diagonal regularisation include the metric volume density.  ``w_smooth``
    maps a point pair to a smooth symmetric matrix (None means zero).
    """
    points = [np.asarray(p, dtype=float) for p in points]
    weights = np.asarray(weights, dtype=float)
    guard = separation_guard(b.gamma, b.sigma.chart)
    d = b.dim_target

    kernel = {}
    for i in range(len(points)):
        for j in range(i + 1, len(points)):
            geo = geodesic_solve(b.gamma, points[i], points[j],
                                 chart=b.sigma.chart, samples=samples,
                                 enforce_guard=False)
            if geo.length > guard:
                raise ConvexityError(
                    f"points {i} and {j} are separated by {geo.length:.3g}, "
                    f"beyond the guard {guard:.3g}")
            frame = RadialFrame(b, geo)
            sol = solve_V0(b, geo, frame=frame)
            sigma = geo.sigma
            acc = sol.samples[-1].copy()
            prev = sol
            cache = {}
            for n in range(1, order + 1):
                prev = solve_Vn(b, geo, None, prev, n, frame=frame,
                                stencil_h=stencil_h, cache=cache)
                acc = acc + prev.samples[-1] * sigma ** n
            block = acc * np.log(sigma / ell_H ** 2)
            if w_smooth is not None:
                block = block + np.asarray(w_smooth(points[i], points[j]))
            kernel[(i, j)] = block

    areas = np.array([w * b.gamma.volume_density(p)
                      for p, w in zip(points, weights)])
    w_co = np.empty((len(points), d, d))
    diag = np.empty((len(points), d, d))
    for i, p in enumerate(points):
        wmat = np.zeros((d, d)) if w_smooth is None else np.asarray(w_smooth(p, p))
        w_co[i] = 0.5 * (wmat + wmat.T)
        v0 = b.g.inverse(b.psi.at(p))
        diag[i] = diagonal_regularisation(v0, areas[i], ell_H)
    return DiscreteParametrix(points, areas, kernel, w_co, diag, ell_H)


def constant_w_smooth(matrix):
    m = np.asarray(matrix, dtype=float)
    return lambda p, q: m


def separable_w_smooth(background, coeffs, frequencies):
    """A smooth symmetric remainder sum_m c_m f_m(p) f_m(q) S_m.

    ``coeffs`` is a list of symmetric matrices S_m (scaled by c_m already);
    ``frequencies`` a list of (kx, ky, phase) triples defining f_m.
    """
    mats = [np.asarray(s, dtype=float) for s in coeffs]

    def f(idx, p):
        kx, ky, phase = frequencies[idx]
        return np.cos(kx * p[0] + ky * p[1] + phase)

    def w(p, q):
        total = np.zeros_like(mats[0])
        for idx, s in enumerate(mats):
            total = total + f(idx, p) * f(idx, q) * s
        return total

    return w
