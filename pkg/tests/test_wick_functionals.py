import numpy as np
import pytest

from sigmaflow import wick


def test_single_point_square():
    # one-dimensional fibre: with unit coefficient and value 3 the square is 9
    f = wick.monomial(2, 0, np.array([[1.0]]))
    assert f.evaluate({0: np.array([3.0])}) == pytest.approx(9.0)


def test_constant_functional():
    f = wick.monomial(0, 0, 2.5)
    assert f.evaluate({0: np.array([99.0])}) == pytest.approx(2.5)
    assert f.evaluate(None) == pytest.approx(2.5)


def test_multi_point_mixed_degrees_against_brute_force():
    rng = np.random.default_rng(7)
    terms = []
    for _ in range(6):
        k = int(rng.integers(0, 4))
        i = int(rng.integers(0, 3))
        coeff = rng.normal() if k == 0 else wick.symmetrize(rng.normal(size=(2,) * k))
        terms.append((k, i, coeff))
    f = wick.local_functional(terms)
    phi = rng.normal(size=(3, 2))
    assert f.evaluate(phi) == pytest.approx(wick.evaluate_brute(terms, phi),
                                            abs=1e-12)


def test_functional_derivative_quadratic():
    f = wick.monomial(2, 1, np.eye(2))
    d2 = wick.functional_derivative(f, {1: np.zeros(2)}, 2, 2)
    assert set(d2) == {1}
    assert np.allclose(d2[1], 2.0 * np.eye(2))


def test_functional_derivative_above_degree_vanishes():
    f = wick.monomial(2, 0, np.eye(2))
    assert wick.functional_derivative(f, {0: np.zeros(2)}, 3, 2) == {}


def test_functional_derivative_against_finite_difference():
    rng = np.random.default_rng(11)
    omega = wick.symmetrize(rng.normal(size=(2, 2, 2)))
    f = wick.monomial(3, 0, omega)
    phi = {0: rng.normal(size=2)}
    direction = {0: rng.normal(size=2)}
    d1 = wick.functional_derivative(f, phi, 1, 2)
    analytic = float(np.real(d1[0] @ direction[0]))
    eps = 1e-6
    plus = f.evaluate({0: phi[0] + eps * direction[0]})
    minus = f.evaluate({0: phi[0] - eps * direction[0]})
    fd = float(np.real(plus - minus)) / (2 * eps)
    assert analytic == pytest.approx(fd, abs=1e-8)


def test_poly_roundtrip_serialisation():
    rng = np.random.default_rng(3)
    f = wick.monomial(3, 2, wick.symmetrize(rng.normal(size=(2, 2, 2))
                                            + 1j * rng.normal(size=(2, 2, 2))))
    g = wick.Poly.from_dict(f.to_dict())
    assert f.max_abs_difference(g) == 0.0


def test_degree_zero_monomial_needs_scalar():
    with pytest.raises(ValueError):
        wick.monomial(2, 0, np.zeros((2, 2, 2)))
