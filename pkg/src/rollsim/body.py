"""Rigid body description and the contact-augmented inertia tensor."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import SurfaceChart


@dataclass(frozen=True)
class RigidBody:
    """A rigid body: mass, body-frame inertia about the center of mass
    (which sits at the origin of the body chart's ambient frame), the
    chart of the body surface, and gravitational acceleration."""

    mass: float
    inertia: np.ndarray  # (3, 3) SPD, body frame
    surface: SurfaceChart
    gravity: float = 9.81

    def __post_init__(self):
        inertia = np.asarray(self.inertia, dtype=float)
        object.__setattr__(self, "inertia", inertia)
        if self.mass <= 0.0:
            raise ValueError(f"mass must be positive, got {self.mass}")
        if self.gravity < 0.0:
            raise ValueError(f"gravity must be >= 0, got {self.gravity}")
        if inertia.shape != (3, 3):
            raise ValueError(f"inertia must be 3x3, got {inertia.shape}")
        if not np.allclose(inertia, inertia.T, atol=1e-12):
            raise ValueError("inertia must be symmetric")
        if np.any(np.linalg.eigvalsh(inertia) <= 0.0):
            raise ValueError("inertia must be positive definite")


def augmented_inertia(body: RigidBody, s) -> np.ndarray:
    """Inertia about the contact point s: I - m hat(s)^2.

    Equals I + m (|s|^2 Id - s s^t), hence always SPD.
    """
    s0, s1, s2 = s
    m = body.mass
    t = np.empty((3, 3))
    t[0, 0] = m * (s1 * s1 + s2 * s2)
    t[1, 1] = m * (s0 * s0 + s2 * s2)
    t[2, 2] = m * (s0 * s0 + s1 * s1)
    t[0, 1] = t[1, 0] = -m * s0 * s1
    t[0, 2] = t[2, 0] = -m * s0 * s2
    t[1, 2] = t[2, 1] = -m * s1 * s2
    return body.inertia + t
