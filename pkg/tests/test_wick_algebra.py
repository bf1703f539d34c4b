import itertools
import math

import numpy as np
import pytest

from sigmaflow import hadamard as had
from sigmaflow import wick

from conftest import build_parametrix


@pytest.fixture(scope="module")
def kernels(sphere_identity_background, cluster_points):
    b = sphere_identity_background
    ws = had.separable_w_smooth(b, [0.2 * np.eye(2)], [(1.0, 0.5, 0.2)])
    P = build_parametrix(b, cluster_points, w_smooth=ws)
    Pt = P.with_w_coincide(P.w_coincide + 0.4 * np.eye(2)[None, :, :],
                           smooth_off_diagonal=lambda p, q: 0.4 * np.eye(2))
    return b, P, Pt


def rand_monomial(rng, n_points, dim, max_degree, min_degree=0):
    k = int(rng.integers(min_degree, max_degree + 1))
    i = int(rng.integers(0, n_points))
    if k == 0:
        return wick.monomial(0, i, rng.normal(scale=0.3))
    return wick.monomial(k, i,
                         wick.symmetrize(rng.normal(scale=0.3, size=(dim,) * k)))


def test_first_order_cross_term(kernels):
    """Degree-1 at i times degree-1 at j: product plus one kernel contraction."""
    b, P, _ = kernels
    rng = np.random.default_rng(0)
    wa = rng.normal(size=2)
    wb = rng.normal(size=2)
    f = wick.monomial(1, 0, wa)
    g = wick.monomial(1, 2, wb)
    prod = wick.star_product(f, g, P)
    phi = {i: rng.normal(size=2) for i in range(4)}
    expected = (f.evaluate(phi) * g.evaluate(phi)
                + wa @ P.block(0, 2) @ wb)
    assert complex(prod.evaluate(phi)) == pytest.approx(expected, abs=1e-12)


def test_scalar_factor(kernels):
    _, P, _ = kernels
    c = wick.monomial(0, 0, 2.0)
    g = wick.monomial(2, 1, np.eye(2))
    prod = wick.star_product(c, g, P)
    phi = {i: np.array([0.3, -0.2]) for i in range(4)}
    assert complex(prod.evaluate(phi)) == pytest.approx(
        2.0 * complex(g.evaluate(phi)), abs=1e-14)


def _brute_double_contraction(f_omega, g_omega, i, j, P, phi):
    """Hand expansion of the product of two quadratic monomials up to the
    double contraction, written directly from the pairing combinatorics."""
    k = P.block(i, j)
    phi_i, phi_j = phi[i], phi[j]
    f_val = phi_i @ f_omega @ phi_i
    g_val = phi_j @ g_omega @ phi_j
    # n = 1: derivative vectors 2 omega phi, one kernel line
    n1 = (2.0 * f_omega @ phi_i) @ k @ (2.0 * g_omega @ phi_j)
    # n = 2: second derivatives 2 omega, two kernel lines, weight 1/2
    n2 = 0.5 * np.einsum("ab,ac,bd,cd->", 2.0 * f_omega, k, k, 2.0 * g_omega)
    return f_val * g_val + n1 + n2


def test_quadratic_pair_against_double_contraction(kernels):
    _, P, _ = kernels
    rng = np.random.default_rng(5)
    f_omega = wick.symmetrize(rng.normal(size=(2, 2))).real
    g_omega = wick.symmetrize(rng.normal(size=(2, 2))).real
    f = wick.monomial(2, 0, f_omega)
    g = wick.monomial(2, 3, g_omega)
    phi = {i: rng.normal(size=2) for i in range(4)}
    direct = complex(wick.star_product(f, g, P).evaluate(phi))
    assert direct == pytest.approx(
        _brute_double_contraction(f_omega, g_omega, 0, 3, P, phi), abs=1e-11)


def test_commutativity_and_associativity(kernels):
    _, P, _ = kernels
    rng = np.random.default_rng(42)
    worst_c = worst_a = 0.0
    for _ in range(40):
        f = rand_monomial(rng, 4, 2, 4)
        g = rand_monomial(rng, 4, 2, 4)
        h = rand_monomial(rng, 4, 2, 4)
        worst_c = max(worst_c, wick.star_product(f, g, P).max_abs_difference(
            wick.star_product(g, f, P)))
        worst_a = max(worst_a, wick.star_product(
            wick.star_product(f, g, P), h, P).max_abs_difference(
            wick.star_product(f, wick.star_product(g, h, P), P)))
    assert worst_c < 1e-11
    assert worst_a < 1e-11


def test_alpha_identity_and_hand_contraction(kernels):
    b, P, _ = kernels
    rng = np.random.default_rng(9)
    f = rand_monomial(rng, 4, 2, 4)
    assert wick.alpha_map(f, P, P).max_abs_difference(f) == 0.0

    # constant shift of the coincidence part on a quadratic monomial adds
    # exactly the half-trace of the shift against the second derivative
    c = 0.37
    shift = c * np.eye(2)
    Pt = P.with_w_coincide(P.w_coincide + shift[None, :, :])
    omega = wick.symmetrize(rng.normal(size=(2, 2))).real
    f2 = wick.monomial(2, 1, omega)
    out = wick.alpha_map(f2, Pt, P)
    added = out - f2
    assert len(added.terms) == 1
    assert complex(added.terms[()]) == pytest.approx(
        c * np.trace(2.0 * omega) / 2.0, abs=1e-14)


def test_alpha_cocycle(kernels):
    _, P, Pt = kernels
    Pq = P.with_w_coincide(P.w_coincide - 0.25 * np.eye(2)[None, :, :])
    rng = np.random.default_rng(13)
    worst = 0.0
    for _ in range(10):
        f = rand_monomial(rng, 4, 2, 4)
        direct = wick.alpha_map(f, P, Pt)
        chained = wick.alpha_map(wick.alpha_map(f, Pq, Pt), P, Pq)
        worst = max(worst, direct.max_abs_difference(chained))
    assert worst < 1e-12


def test_alpha_is_algebra_morphism(kernels):
    _, P, Pt = kernels
    rng = np.random.default_rng(21)
    worst = 0.0
    for _ in range(15):
        f = rand_monomial(rng, 4, 2, 3)
        g = rand_monomial(rng, 4, 2, 3)
        lhs = wick.alpha_map(wick.star_product(f, g, Pt), P, Pt)
        rhs = wick.star_product(wick.alpha_map(f, P, Pt),
                                wick.alpha_map(g, P, Pt), P)
        worst = max(worst, lhs.max_abs_difference(rhs))
    assert worst < 1e-11


def test_alpha_requires_matching_kernels(kernels, sphere_identity_background):
    from sigmaflow.errors import SigmaflowError

    b, P, _ = kernels
    other_pts = [p + 0.01 for p in P.points]
    other = build_parametrix(b, other_pts)
    f = wick.monomial(2, 0, np.eye(2))
    with pytest.raises(SigmaflowError):
        wick.alpha_map(f, P, other)


def test_involution_compatibility(kernels):
    _, P, _ = kernels
    rng = np.random.default_rng(31)
    for _ in range(10):
        f = rand_monomial(rng, 4, 2, 3)
        g = rand_monomial(rng, 4, 2, 3)
        # complex coefficients make the involution non-trivial
        f = f.scale(1.0 + 0.5j)
        lhs = wick.involution(wick.star_product(f, g, P))
        rhs = wick.star_product(wick.involution(f), wick.involution(g), P)
        assert lhs.max_abs_difference(rhs) == 0.0
