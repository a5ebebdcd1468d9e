import numpy as np
import pytest

from rollsim import RigidBody, Scene, ellipsoid, plane, sphere


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def plane_world():
    # horizontal plane with downward normal: the body sits on top
    return plane(extent=50.0, orientation=-1)


@pytest.fixture
def bowl_world():
    return sphere(3.0, orientation=-1)


@pytest.fixture
def sphere_body():
    return RigidBody(1.3, np.diag([0.3, 0.4, 0.5]), sphere(1.0))


@pytest.fixture
def uniform_sphere_body():
    return RigidBody(1.0, 0.4 * np.eye(3), sphere(1.0))


@pytest.fixture
def ellipsoid_body():
    return RigidBody(1.0, np.diag([0.4, 0.55, 0.7]), ellipsoid(1.0, 1.3, 1.6))


@pytest.fixture
def sphere_plane_scene(sphere_body, plane_world):
    return Scene(sphere_body, plane_world)


@pytest.fixture
def ellipsoid_plane_scene(ellipsoid_body, plane_world):
    return Scene(ellipsoid_body, plane_world)
