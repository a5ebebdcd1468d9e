"""The SE(2)-reduced system for rolling on the horizontal plane.

Quotienting the planar-world system by horizontal rotations and
translations closes the equations in (s, Omega):

    L_M ds/dt = Omega x n_M,
    Itil dOmega/dt = (Itil Omega) x Omega
                     + m s x (ds/dt x Omega - g n_M),
    E = 1/2 Omega^t Itil Omega + m g n_M . s.

Two equivalent formulations are provided: one intrinsic (ambient shape
operator, solved in the orthonormal tangent frame) and one directly in
chart coordinates with L = [L_ab] and B = hat(n_M) ds/dy:

    L dy/dt = B^t Omega,
    Itil dOmega/dt + (m hat(s) hat(Omega) ds/dy) dy/dt
        = (Itil Omega) x Omega + m g n_M x s.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .body import RigidBody, augmented_inertia
from .dynamics_full import FullState, FullTangent, Scene, make_full_state
from .errors import SingularShapeOperator
from .geometry import chart_point, cond2, cross3, solve2, solve3_sym

SHAPE_COND_MAX = 1e8


@dataclass(frozen=True)
class ReducedState:
    """A point of the reduced phase space M x R^3."""

    y: np.ndarray      # (2,) body chart coordinates of the contact point
    Omega: np.ndarray  # (3,) body-frame angular velocity


@dataclass(frozen=True)
class ReducedTangent:
    dy: np.ndarray      # (2,)
    dOmega: np.ndarray  # (3,)


def vector_field_reduced(body: RigidBody, state: ReducedState,
                         cond_max: float = SHAPE_COND_MAX) -> ReducedTangent:
    """The reduced field via the ambient shape operator of M."""
    chart = body.surface
    chart.require_inside(state.y)
    p = chart_point(chart, state.y)
    omega = state.Omega
    lm = p.w_frame
    if cond2(lm) > cond_max:
        raise SingularShapeOperator(
            f"body shape operator condition number exceeds {cond_max:g}")
    sdot = p.frame @ solve2(lm, p.frame.T @ cross3(omega, p.n))
    dy = p.ginv @ (p.jac.T @ sdot)
    itil = augmented_inertia(body, p.s)
    torque = (cross3(itil @ omega, omega)
              + body.mass * cross3(p.s, cross3(sdot, omega)
                                   - body.gravity * p.n))
    return ReducedTangent(dy, solve3_sym(itil, torque))


def vector_field_reduced_coords(body: RigidBody, state: ReducedState
                                ) -> ReducedTangent:
    """The reduced field assembled directly in chart coordinates."""
    chart = body.surface
    chart.require_inside(state.y)
    p = chart_point(chart, state.y)
    omega = state.Omega
    h = chart.hessian(state.y)
    l2 = p.n[0] * h[0] + p.n[1] * h[1] + p.n[2] * h[2]
    det = l2[0, 0] * l2[1, 1] - l2[0, 1] * l2[1, 0]
    scale = float(np.sum(l2 * l2))
    if abs(det) < 1e-12 * max(scale, 1e-300):
        raise SingularShapeOperator(
            "second fundamental form numerically singular "
            f"(det {det:.3e} vs scale {scale:.3e})")
    b = np.column_stack((cross3(p.n, p.jac[:, 0]), cross3(p.n, p.jac[:, 1])))
    dy = solve2(l2, b.T @ omega)
    sdot = p.jac @ dy
    itil = augmented_inertia(body, p.s)
    rhs = (cross3(itil @ omega, omega)
           + body.mass * body.gravity * cross3(p.n, p.s)
           - body.mass * cross3(p.s, cross3(omega, sdot)))
    return ReducedTangent(dy, solve3_sym(itil, rhs))


def energy_reduced(body: RigidBody, state: ReducedState) -> float:
    """E = 1/2 Omega^t Itil Omega + m g n_M . s."""
    p = chart_point(body.surface, state.y)
    itil = augmented_inertia(body, p.s)
    return (0.5 * state.Omega @ itil @ state.Omega
            + body.mass * body.gravity * float(p.n @ p.s))


def project_full_to_reduced(scene: Scene, state: FullState) -> ReducedState:
    """The quotient map (A, yM, yH, Omega) -> (yM, Omega) of the planar
    SE(2) symmetry."""
    scene.require_planar("project_full_to_reduced")
    return ReducedState(state.yM, state.Omega)


def embed_reduced_in_full(scene: Scene, state: ReducedState,
                          theta: float = 0.0, x0=(0.0, 0.0)) -> FullState:
    """Choose a representative full state in the fiber over a reduced
    state, placing the contact at world chart coordinates x0 with SO(2)
    angle theta."""
    scene.require_planar("embed_reduced_in_full")
    return make_full_state(scene, state.y, np.asarray(x0, dtype=float),
                           theta, state.Omega)


def project_full_tangent(scene: Scene, tangent: FullTangent) -> ReducedTangent:
    """Push a full tangent through the quotient map."""
    scene.require_planar("project_full_tangent")
    return ReducedTangent(tangent.dyM, tangent.dOmega)
