"""The general rolling vector field on the constrained phase space.

States are (A, yM, yH, Omega): the body attitude, chart coordinates of
the contact point on the body surface M and on the fixed surface H, and
the body-frame angular velocity.  The contact constraint is
A n_M(s(yM)) = n_H(x(yH)); the rolling constraint is dx/dt = A ds/dt.

The equations of motion:

    Lambda ds/dt = Omega x n_M,      Lambda = L_M - A^-1 L_H A,
    Itil dOmega/dt = (Itil Omega) x Omega
                     + m s x (ds/dt x Omega + g A^-1 k),
    A^-1 dA/dt = hat(Omega),         dx/dt = A ds/dt,

with Itil = I - m hat(s)^2 the augmented inertia.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .body import RigidBody, augmented_inertia
from .errors import NotPlanarScene, SingularLambda
from .geometry import (SurfaceChart, chart_point, cond2, cross3,
                       rotation_aligning, solve2, solve3_sym)

K_WORLD = np.array([0.0, 0.0, 1.0])  # gravity acts along -k

# Test hook: negates the gravity torque in the Omega equation when set to
# -1.0, which must break energy conservation (used as a negative control).
GRAVITY_TORQUE_SIGN = 1.0

LAMBDA_COND_MAX = 1e8


@dataclass(frozen=True)
class Scene:
    """A rigid body together with the fixed surface it rolls on."""

    body: RigidBody
    world: SurfaceChart

    def require_planar(self, what: str):
        if self.world.name != "plane":
            raise NotPlanarScene(
                f"{what} requires a plane world surface, got "
                f"'{self.world.name}'")


@dataclass(frozen=True)
class FullState:
    """A point of the full phase space."""

    A: np.ndarray       # (3, 3) rotation, body -> world
    yM: np.ndarray      # (2,) body chart coordinates of the contact point
    yH: np.ndarray      # (2,) world chart coordinates of the contact point
    Omega: np.ndarray   # (3,) body-frame angular velocity


@dataclass(frozen=True)
class FullTangent:
    """A tangent vector at a FullState; the A-component is the body-frame
    angular velocity (A^-1 dA/dt, unhatted)."""

    Omega_frame: np.ndarray  # (3,)
    dyM: np.ndarray          # (2,)
    dyH: np.ndarray          # (2,)
    dOmega: np.ndarray       # (3,)


def lambda_operator(scene: Scene, state: FullState) -> np.ndarray:
    """Matrix of Lambda = L_M - A^-1 L_H A restricted to the tangent plane
    of M at the contact point, in the orthonormal frame of M."""
    pm = chart_point(scene.body.surface, state.yM)
    ph = chart_point(scene.world, state.yH)
    a = state.A
    lam = pm.weingarten - a.T @ ph.weingarten @ a
    return pm.frame.T @ lam @ pm.frame


def _contact_velocity(pm, ph, a, omega, cond_max):
    """Solve for (ds/dt, dyM, dx/dt, dyH) from the Lambda equation."""
    if ph.flat:
        lam = pm.w_frame
    else:
        lam_amb = pm.weingarten - a.T @ ph.weingarten @ a
        lam = pm.frame.T @ lam_amb @ pm.frame
    if cond2(lam) > cond_max:
        raise SingularLambda(
            f"contact operator condition number exceeds {cond_max:g} "
            "(loss of regularity)")
    rhs = pm.frame.T @ cross3(omega, pm.n)
    sdot = pm.frame @ solve2(lam, rhs)
    dym = pm.ginv @ (pm.jac.T @ sdot)
    xdot = a @ sdot
    dyh = ph.ginv @ (ph.jac.T @ xdot)
    return sdot, dym, xdot, dyh


def vector_field_full(scene: Scene, state: FullState,
                      cond_max: float = LAMBDA_COND_MAX) -> FullTangent:
    """Evaluate the rolling vector field at a state of the full system."""
    body = scene.body
    body.surface.require_inside(state.yM)
    scene.world.require_inside(state.yH)
    pm = chart_point(body.surface, state.yM)
    ph = chart_point(scene.world, state.yH)
    a, omega = state.A, state.Omega
    sdot, dym, _, dyh = _contact_velocity(pm, ph, a, omega, cond_max)
    s = pm.s
    itil = augmented_inertia(body, s)
    a_inv_k = a.T @ K_WORLD
    torque = (cross3(itil @ omega, omega)
              + body.mass * cross3(
                  s, cross3(sdot, omega)
                  + (GRAVITY_TORQUE_SIGN * body.gravity) * a_inv_k))
    domega = solve3_sym(itil, torque)
    return FullTangent(omega, dym, dyh, domega)


def energy_full(scene: Scene, state: FullState) -> float:
    """E = 1/2 Omega^t Itil Omega + m g (x - A s) . k."""
    body = scene.body
    s = body.surface.eval(state.yM)
    x = scene.world.eval(state.yH)
    itil = augmented_inertia(body, s)
    height = (x - state.A @ s) @ K_WORLD
    return 0.5 * state.Omega @ itil @ state.Omega + body.mass * body.gravity * height


def lagrangian_on_constraint(scene: Scene, state: FullState) -> float:
    """The Lagrangian evaluated with the rolling substitution v = -Omega x s:
    1/2 Omega^t I Omega + 1/2 m |Omega x s|^2 - m g (x - A s) . k."""
    body = scene.body
    s = body.surface.eval(state.yM)
    x = scene.world.eval(state.yH)
    v = cross3(state.Omega, s)
    height = (x - state.A @ s) @ K_WORLD
    return (0.5 * state.Omega @ body.inertia @ state.Omega
            + 0.5 * body.mass * (v @ v)
            - body.mass * body.gravity * height)


def tangent_membership_residual(scene: Scene, state: FullState,
                                tangent: FullTangent) -> float:
    """How far a tangent is from the rolling distribution: the larger of
    |Omega x n_M - (L_M sdot - A^-1 L_H xdot)| and |xdot - A sdot|."""
    pm = chart_point(scene.body.surface, state.yM)
    ph = chart_point(scene.world, state.yH)
    sdot = pm.jac @ tangent.dyM
    xdot = ph.jac @ tangent.dyH
    a = state.A
    r1 = (cross3(tangent.Omega_frame, pm.n)
          - (pm.weingarten @ sdot - a.T @ (ph.weingarten @ xdot)))
    r2 = xdot - a @ sdot
    return max(float(np.linalg.norm(r1)), float(np.linalg.norm(r2)))


def momentum_J(scene: Scene, state: FullState, xi) -> float:
    """Momentum of the planar SE(2) symmetry for the generator
    xi = (xi_r, xi_a) with xi_r a scalar and xi_a a horizontal 2-vector:

        J = (A Itil Omega - m x cross A(Omega x s)) . (xi_r k)
            - m A(Omega x s) . xi_a

    Defined only when the world surface is the horizontal plane.
    """
    scene.require_planar("momentum_J")
    xi_r, xi_a = xi
    xi_a = np.asarray(xi_a, dtype=float).reshape(-1)
    body = scene.body
    s = body.surface.eval(state.yM)
    x = scene.world.eval(state.yH)
    a, omega = state.A, state.Omega
    itil = augmented_inertia(body, s)
    contact_vel = a @ cross3(omega, s)  # world frame, = -A v
    j = xi_r * float((a @ (itil @ omega)
                      - body.mass * cross3(x, contact_vel)) @ K_WORLD)
    j -= body.mass * float(contact_vel[0] * xi_a[0] + contact_vel[1] * xi_a[1])
    return j


def make_full_state(scene: Scene, yM, yH, theta: float, Omega) -> FullState:
    """Build a feasible state: A is the rotation aligning the body contact
    normal with the world contact normal, theta picking the point on the
    SO(2) circle of solutions."""
    yM = np.asarray(yM, dtype=float)
    yH = np.asarray(yH, dtype=float)
    n_m = chart_point(scene.body.surface, yM).n
    n_h = chart_point(scene.world, yH).n
    a = rotation_aligning(n_m, n_h, theta)
    return FullState(a, yM, yH, np.asarray(Omega, dtype=float))


def constraint_residuals(scene: Scene, state: FullState):
    """(so3 residual, contact residual) = (|A^t A - Id|_F, |A n_M - n_H|)."""
    a = state.A
    so3 = float(np.linalg.norm(a.T @ a - np.eye(3)))
    n_m = chart_point(scene.body.surface, state.yM).n
    n_h = chart_point(scene.world, state.yH).n
    contact = float(np.linalg.norm(a @ n_m - n_h))
    return so3, contact
