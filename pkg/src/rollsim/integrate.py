"""Fixed-step 4th-order integration with optional manifold projection.

The rotation component is integrated multiplicatively: within a step the
attitude is written A = A0 exp(hat(u)) and u is advanced by classical
RK4 with the inverse-dexp correction

    du/dt = Omega + 1/2 u x Omega + 1/12 u x (u x Omega),

truncated consistently with 4th order.  The step then applies
A0 exp(hat(u)) in closed (Rodrigues) form, so A stays near SO(3) even
without projection.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .dynamics_full import (FullState, Scene, constraint_residuals,
                            energy_full)
from .dynamics_reduced import ReducedState, energy_reduced
from .errors import ProjectionDiverged, RollingBodyError
from .geometry import (chart_point, cross3, rotation_aligning, so3_exp,
                       solve2)


@dataclass(frozen=True)
class IntegratorConfig:
    h: float
    T: float
    sample_stride: int = 1
    project_rotation: bool = True
    project_contact: bool = True
    lambda_cond_max: float = 1e8

    def __post_init__(self):
        if self.h <= 0.0:
            raise ValueError(f"step size must be positive, got {self.h}")
        if self.T < 0.0:
            raise ValueError(f"final time must be >= 0, got {self.T}")
        if self.T > 0.0 and self.h > self.T:
            raise ValueError(f"step size {self.h} exceeds final time {self.T}")
        if self.sample_stride < 1:
            raise ValueError("sample_stride must be >= 1")


@dataclass
class Trajectory:
    """Sampled integration output with per-sample diagnostics.  The
    residual lists are populated for full states only."""

    times: list = field(default_factory=list)
    states: list = field(default_factory=list)
    energy: list = field(default_factory=list)
    so3_residual: list = field(default_factory=list)
    contact_residual: list = field(default_factory=list)

    def __len__(self):
        return len(self.times)


def _dexpinv(u, v):
    # inverse of the left-trivialized exponential differential for the
    # body-frame update A = A0 exp(hat(u)), dA/dt = A hat(Omega)
    c1 = cross3(u, v)
    return v + 0.5 * c1 + (1.0 / 12.0) * cross3(u, c1)


def _rk4_step_full(field_fn, state: FullState, h: float) -> FullState:
    a0 = state.A
    ym0, yh0, om0 = state.yM, state.yH, state.Omega

    k1 = field_fn(state)
    u1 = k1.Omega_frame  # dexpinv at u = 0

    hu = 0.5 * h
    u_b = hu * u1
    s_b = FullState(a0 @ so3_exp(u_b), ym0 + hu * k1.dyM,
                    yh0 + hu * k1.dyH, om0 + hu * k1.dOmega)
    k2 = field_fn(s_b)
    u2 = _dexpinv(u_b, k2.Omega_frame)

    u_c = hu * u2
    s_c = FullState(a0 @ so3_exp(u_c), ym0 + hu * k2.dyM,
                    yh0 + hu * k2.dyH, om0 + hu * k2.dOmega)
    k3 = field_fn(s_c)
    u3 = _dexpinv(u_c, k3.Omega_frame)

    u_d = h * u3
    s_d = FullState(a0 @ so3_exp(u_d), ym0 + h * k3.dyM,
                    yh0 + h * k3.dyH, om0 + h * k3.dOmega)
    k4 = field_fn(s_d)
    u4 = _dexpinv(u_d, k4.Omega_frame)

    w = h / 6.0
    u = w * (u1 + 2.0 * (u2 + u3) + u4)
    return FullState(
        a0 @ so3_exp(u),
        ym0 + w * (k1.dyM + 2.0 * (k2.dyM + k3.dyM) + k4.dyM),
        yh0 + w * (k1.dyH + 2.0 * (k2.dyH + k3.dyH) + k4.dyH),
        om0 + w * (k1.dOmega + 2.0 * (k2.dOmega + k3.dOmega) + k4.dOmega),
    )


def _rk4_step_reduced(field_fn, state: ReducedState, h: float) -> ReducedState:
    y0, om0 = state.y, state.Omega
    k1 = field_fn(state)
    hu = 0.5 * h
    k2 = field_fn(ReducedState(y0 + hu * k1.dy, om0 + hu * k1.dOmega))
    k3 = field_fn(ReducedState(y0 + hu * k2.dy, om0 + hu * k2.dOmega))
    k4 = field_fn(ReducedState(y0 + h * k3.dy, om0 + h * k3.dOmega))
    w = h / 6.0
    return ReducedState(
        y0 + w * (k1.dy + 2.0 * (k2.dy + k3.dy) + k4.dy),
        om0 + w * (k1.dOmega + 2.0 * (k2.dOmega + k3.dOmega) + k4.dOmega),
    )


def rk4_step(field_fn: Callable, state, h: float):
    """One explicit 4th-order step.  `field_fn` maps a state to its
    tangent; rotation components are handled multiplicatively."""
    if isinstance(state, FullState):
        return _rk4_step_full(field_fn, state, h)
    return _rk4_step_reduced(field_fn, state, h)


def _orthonormalize(a):
    q1 = a[:, 0] / np.sqrt(a[:, 0] @ a[:, 0])
    q2 = a[:, 1] - (q1 @ a[:, 1]) * q1
    q2 = q2 / np.sqrt(q2 @ q2)
    q3 = a[:, 2] - (q1 @ a[:, 2]) * q1 - (q2 @ a[:, 2]) * q2
    q3 = q3 / np.sqrt(q3 @ q3)
    if q1 @ cross3(q2, q3) < 0.0:
        q3 = -q3
    out = np.empty((3, 3))
    out[:, 0] = q1
    out[:, 1] = q2
    out[:, 2] = q3
    return out


CONTACT_PROJECT_TOL = 1e-10


def project_state(scene: Scene, state: FullState,
                  config: IntegratorConfig) -> FullState:
    """Re-impose the state invariants per the config flags: orthonormalize
    A (Gram-Schmidt, determinant corrected) and restore the contact
    constraint, first by Newton steps on yH, then, if the world normal
    cannot reach the target (a flat world makes the Newton system
    singular), by a minimal rotation correction of A."""
    a, yh = state.A, state.yH
    if config.project_rotation:
        a = _orthonormalize(a)
    if config.project_contact:
        n_m = chart_point(scene.body.surface, state.yM).n
        an_m = a @ n_m
        ph = chart_point(scene.world, yh)
        r = an_m - ph.n
        res = np.sqrt(r @ r)
        if res >= 0.1:
            raise ProjectionDiverged(
                f"contact residual {res:.3e} too large to project")
        for _ in range(5):
            if res <= CONTACT_PROJECT_TOL:
                break
            # d(A n_M - n_H)/dyH = W_H J_H in the tangent frame of H
            jr = ph.frame.T @ (ph.weingarten @ ph.jac)
            det = jr[0, 0] * jr[1, 1] - jr[0, 1] * jr[1, 0]
            if abs(det) < 1e-14 * max(1.0, float(np.sum(jr * jr))):
                break  # flat world: yH cannot move the residual
            yh = yh - solve2(jr, ph.frame.T @ r)
            ph = chart_point(scene.world, yh)
            r = an_m - ph.n
            res = np.sqrt(r @ r)
        if res > CONTACT_PROJECT_TOL:
            a = rotation_aligning(an_m, ph.n) @ a
            r = a @ n_m - ph.n
            res = np.sqrt(r @ r)
        if res > CONTACT_PROJECT_TOL:
            raise ProjectionDiverged(
                f"contact projection stalled at residual {res:.3e}")
    return FullState(a, state.yM, yh, state.Omega)


def _record(traj, t, state, context, is_full):
    traj.times.append(t)
    traj.states.append(state)
    if is_full:
        traj.energy.append(energy_full(context, state))
        so3, contact = constraint_residuals(context, state)
        traj.so3_residual.append(so3)
        traj.contact_residual.append(contact)
    else:
        traj.energy.append(energy_reduced(context, state))


def integrate(context, field, state0, config: IntegratorConfig) -> Trajectory:
    """Integrate `field(context, state)` from `state0` with fixed steps,
    sampling every `sample_stride` steps.  `context` is the Scene for the
    full system or the RigidBody for the reduced one.

    Step and projection errors are re-raised with `time` and `partial`
    (the trajectory so far) attached.
    """
    is_full = isinstance(state0, FullState)
    traj = Trajectory()
    _record(traj, 0.0, state0, context, is_full)
    n_steps = int(round(config.T / config.h))
    state = state0
    field_fn = lambda st: field(context, st)
    do_project = is_full and (config.project_rotation or config.project_contact)
    for i in range(1, n_steps + 1):
        try:
            state = rk4_step(field_fn, state, config.h)
            if do_project:
                state = project_state(context, state, config)
        except RollingBodyError as err:
            err.time = (i - 1) * config.h
            err.partial = traj
            raise
        if i % config.sample_stride == 0:
            _record(traj, i * config.h, state, context, is_full)
    return traj
