import numpy as np
import pytest

from sigmaflow import geometry as geo
from sigmaflow import hadamard as had


@pytest.fixture(scope="session")
def torus_sphere_background():
    """Torus base mapped into the round sphere with a wavy immersion."""

    def psi_eval(x):
        return np.array([np.pi / 2 + 0.3 * np.sin(x[0]), x[1] + 0.2 * np.cos(x[0])])

    return geo.BackgroundGeometry("torus", "sphere:1", geo.SigmaMap(psi_eval))


@pytest.fixture(scope="session")
def sphere_flat_background():
    return geo.BackgroundGeometry("sphere:1", "flat:2",
                                  geo.constant_map([0.0, 0.0]))


@pytest.fixture(scope="session")
def sphere_identity_background():
    return geo.BackgroundGeometry("sphere:1", "sphere:1", geo.identity_map(2))


@pytest.fixture(scope="session")
def flat_background():
    return geo.BackgroundGeometry("flat", "flat:2", geo.constant_map([0.0, 0.0]))


@pytest.fixture(scope="session")
def sphere_segment(sphere_flat_background):
    b = sphere_flat_background
    geod = geo.geodesic_solve(b.gamma, np.array([1.2, 0.4]),
                              np.array([1.42, 0.62]), chart=b.sigma.chart,
                              samples=33)
    syn = geo.synge_data(b.gamma, geod, world=geo.synge.background_world(b))
    return b, geod, syn


@pytest.fixture(scope="session")
def cluster_points():
    center = np.array([1.1, 0.4])
    offsets = np.array([[0.0, 0.0], [0.16, 0.1], [0.08, 0.22], [-0.12, 0.14]])
    return [center + off for off in offsets]


def build_parametrix(background, points, order=0, ell_H=0.3, w_smooth=None):
    weights = np.full(len(points), 0.05)
    return had.build_discrete_parametrix(background, points, weights,
                                         order=order, ell_H=ell_H,
                                         w_smooth=w_smooth)
