import numpy as np
import pytest

from sigmaflow import geometry as geo
from sigmaflow import hadamard as had
from sigmaflow import rgflow, wick

from conftest import build_parametrix


def test_flat_metric_unchanged():
    g = geo.euclidean_metric(2)
    out = rgflow.renormalized_metric(g, 2.0, 0.3)
    p = np.array([0.4, -0.7])
    assert np.allclose(out.at(p), np.eye(2), atol=1e-12)


def test_identity_at_unit_scale():
    g = geo.sphere_metric(1.0)
    assert rgflow.renormalized_metric(g, 1.0, 0.5) is g


def test_unit_sphere_contracts_by_ricci():
    g = geo.sphere_metric(1.0)
    out = rgflow.renormalized_metric(g, np.e, 0.1)
    p = np.array([1.0, 0.3])
    assert np.allclose(out.at(p), 0.99 * g.at(p), atol=1e-12)


def test_degeneration_warning():
    g = geo.sphere_metric(1.0)
    probe = [np.array([1.0, 0.3])]
    fine = rgflow.renormalized_metric(g, np.e, 0.1, probe_points=probe)
    assert fine.degeneration_warning is False
    bad = rgflow.renormalized_metric(g, np.e ** 2, 1.0, probe_points=probe)
    assert bad.degeneration_warning is True


def test_group_property_up_to_higher_order():
    def gfun(x):
        f = 1.0 + 0.3 * np.sin(x[0]) * np.cos(x[1])
        o = 0.1 * np.sin(x[0] + x[1])
        return np.array([[f, o], [o, 1.2 - 0.2 * np.cos(x[1])]])

    m = geo.MetricField(2, gfun)
    probe = np.array([0.7, 1.3])
    gaps = []
    for nu in (0.2, 0.1, 0.05):
        twice = rgflow.renormalized_metric(
            rgflow.renormalized_metric(m, 2.0, nu), 3.0, nu)
        once = rgflow.renormalized_metric(m, 6.0, nu)
        gaps.append(np.max(np.abs(twice.at(probe) - once.at(probe))))
    slope = np.polyfit(np.log([0.2, 0.1, 0.05]), np.log(gaps), 1)[0]
    assert slope >= 3.5


@pytest.fixture(scope="module")
def identity_setup(sphere_identity_background, cluster_points):
    b = sphere_identity_background
    quad = geo.SigmaQuadrature(np.array(cluster_points),
                               np.full(len(cluster_points), 0.05))
    P = build_parametrix(b, cluster_points,
                         w_smooth=had.constant_w_smooth(0.3 * np.eye(2)))
    fam = wick.HadamardWickFamily(b)
    rng = np.random.default_rng(2)
    f = 0.5 + rng.random(len(cluster_points))
    phi = {i: rng.normal(size=2, scale=0.3) for i in range(len(cluster_points))}
    return b, quad, P, fam, f, phi


def test_identity_trivial_cases(identity_setup):
    b, quad, P, fam, f, phi = identity_setup
    out = rgflow.renormalization_identity_check(b, quad, f, fam, 0.1, 1.0, P, phi)
    assert out["residual"] < 1e-14

    bflat = geo.BackgroundGeometry("torus", "flat:2", geo.identity_map(2))
    pts = [np.array([0.5, 0.5]), np.array([0.9, 0.8])]
    qf = geo.SigmaQuadrature(np.array(pts), np.array([0.1, 0.1]))
    Pf = build_parametrix(bflat, pts)
    fam_f = wick.HadamardWickFamily(bflat)
    phif = {0: np.array([0.1, 0.2]), 1: np.array([-0.3, 0.4])}
    for lam in (0.5, 2.0, np.e):
        out = rgflow.renormalization_identity_check(
            bflat, qf, np.ones(2), fam_f, 0.1, lam, Pf, phif)
        assert out["residual"] < 1e-12


def test_identity_on_sphere_target(identity_setup):
    b, quad, P, fam, f, phi = identity_setup
    for lam in (0.5, 2.0, np.e):
        out = rgflow.renormalization_identity_check(
            b, quad, f, fam, 0.1, lam, P, phi)
        assert out["residual"] < 1e-8
        assert out["lhs"] == pytest.approx(out["rhs"], abs=1e-8)


def test_identity_with_source_term(identity_setup):
    """The linear term carries no scaling correction: the identity holds with
    a nonzero source exactly as well."""
    b, quad, P, fam, f, phi = identity_setup

    def q_source(x):
        return np.array([np.cos(x[0]), np.sin(x[1])])

    out = rgflow.renormalization_identity_check(
        b, quad, f, fam, 0.1, 2.0, P, phi, q_source=q_source)
    assert out["residual"] < 1e-8
