import numpy as np
import pytest

from sigmaflow import geometry as geo
from sigmaflow.geometry.synge import ShootingWorld, background_world


def test_flat_laplacian_and_coincidence():
    b = geo.BackgroundGeometry("flat", "flat:2", geo.constant_map([0.0, 0.0]))
    g = geo.geodesic_solve(b.gamma, np.array([0.0, 0.0]), np.array([0.6, 0.45]),
                           chart=b.sigma.chart, samples=17)
    syn = geo.synge_data(b.gamma, g, world=background_world(b))
    assert np.allclose(syn.lap_sigma, 2.0, atol=1e-9)
    # coincidence sample sits at the fixed endpoint
    assert np.max(np.abs(syn.dsigma[-1])) < 1e-10
    assert syn.sigma_path[-1] == 0.0


def test_eikonal_identity_along_path():
    b = geo.BackgroundGeometry("sphere:1", "flat:2", geo.constant_map([0.0, 0.0]))
    g = geo.geodesic_solve(b.gamma, np.array([1.2, 0.4]), np.array([1.42, 0.62]),
                           chart=b.sigma.chart, samples=17)
    syn = geo.synge_data(b.gamma, g, world=background_world(b))
    worst = 0.0
    for x, ds, sig in zip(g.xs, syn.dsigma, syn.sigma_path):
        ginv = b.gamma.inverse(x)
        worst = max(worst, abs(float(ds @ ginv @ ds) - 2.0 * sig))
    assert worst < 1e-6


def test_sphere_laplacian_closed_form():
    b = geo.BackgroundGeometry("sphere:1", "flat:2", geo.constant_map([0.0, 0.0]))
    g = geo.geodesic_solve(b.gamma, np.array([1.2, 0.4]), np.array([1.42, 0.62]),
                           chart=b.sigma.chart, samples=17)
    syn = geo.synge_data(b.gamma, g, world=background_world(b))
    s = g.length
    assert syn.lap_sigma[0] == pytest.approx(1.0 + s / np.tan(s), abs=1e-8)
    # interior samples follow the same law at their own distance
    for i in (4, 8, 12):
        si = (1.0 - g.ts[i]) * s
        assert syn.lap_sigma[i] == pytest.approx(1.0 + si / np.tan(si), abs=1e-8)


def test_shooting_world_agrees_with_closed_form():
    fam = geo.family("sphere:1")
    world = ShootingWorld(fam.metric, fam.chart)
    p, q = np.array([1.25, 0.3]), np.array([1.4, 0.55])
    assert float(world(p, q)) == pytest.approx(float(fam.world_function(p, q)),
                                               abs=1e-10)


def test_synge_fixed_first_orientation():
    b = geo.BackgroundGeometry("flat", "flat:2", geo.constant_map([0.0, 0.0]))
    g = geo.geodesic_solve(b.gamma, np.array([0.0, 0.0]), np.array([1.0, 0.0]),
                           chart=b.sigma.chart, samples=9)
    syn = geo.synge_data(b.gamma, g, world=background_world(b), fixed="first")
    assert syn.sigma_path[0] == 0.0
    assert np.max(np.abs(syn.dsigma[0])) < 1e-10
    assert syn.sigma_path[-1] == pytest.approx(0.5)
