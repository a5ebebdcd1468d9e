import numpy as np
import pytest

from rollsim.body import RigidBody, augmented_inertia
from rollsim.geometry import hat, sphere


def test_augmented_inertia_at_origin_is_inertia(sphere_body):
    assert np.allclose(augmented_inertia(sphere_body, np.zeros(3)),
                       sphere_body.inertia)


def test_uniform_sphere_contact_inertia():
    # I = (2/5) m r^2 Id with the contact point a radius below the center
    m, r = 2.0, 0.7
    body = RigidBody(m, 0.4 * m * r * r * np.eye(3), sphere(r))
    itil = augmented_inertia(body, np.array([0.0, 0.0, -r]))
    assert np.allclose(itil, m * r * r * np.diag([1.4, 1.4, 0.4]),
                       atol=1e-14)


def test_matches_hat_squared_formula(rng):
    for _ in range(50):
        a = rng.standard_normal((3, 3))
        inertia = a @ a.T + 0.1 * np.eye(3)
        body = RigidBody(rng.uniform(0.1, 5.0), inertia, sphere(1.0))
        s = rng.standard_normal(3)
        expect = inertia - body.mass * (hat(s) @ hat(s))
        assert np.allclose(augmented_inertia(body, s), expect, atol=1e-12)


def test_always_spd(rng):
    for _ in range(1000):
        a = rng.standard_normal((3, 3))
        inertia = a @ a.T + 0.05 * np.eye(3)
        body = RigidBody(rng.uniform(0.1, 5.0), inertia, sphere(1.0))
        s = 3.0 * rng.standard_normal(3)
        itil = augmented_inertia(body, s)
        assert np.allclose(itil, itil.T, atol=1e-14)
        assert (np.linalg.eigvalsh(itil).min()
                >= np.linalg.eigvalsh(inertia).min() - 1e-12)


def test_validation_errors():
    ch = sphere(1.0)
    with pytest.raises(ValueError, match="mass"):
        RigidBody(0.0, np.eye(3), ch)
    with pytest.raises(ValueError, match="gravity"):
        RigidBody(1.0, np.eye(3), ch, gravity=-1.0)
    with pytest.raises(ValueError, match="3x3"):
        RigidBody(1.0, np.eye(2), ch)
    with pytest.raises(ValueError, match="symmetric"):
        RigidBody(1.0, np.array([[1.0, 0.5, 0], [0, 1, 0], [0, 0, 1]]), ch)
    with pytest.raises(ValueError, match="positive definite"):
        RigidBody(1.0, -np.eye(3), ch)
