"""Cross-module invariant suite: seeded random-state checks of the
structural properties of the vector fields (energy invariance, tangent
membership, constraint preservation), the finite-difference curvature
oracle, agreement of the two reduced formulations, commutation of
reduction with the dynamics, and the integrator order measurement.

Used by the `check` CLI command and by the acceptance tests.
"""

from __future__ import annotations

import numpy as np

from .body import RigidBody
from .dynamics_full import (FullState, Scene, constraint_residuals,
                            energy_full, make_full_state,
                            tangent_membership_residual, vector_field_full)
from .dynamics_reduced import (ReducedState, embed_reduced_in_full,
                               project_full_tangent, vector_field_reduced,
                               vector_field_reduced_coords)
from .geometry import chart_point, ellipsoid, normal, paraboloid, plane, \
    so3_exp, sphere, weingarten_ambient
from .integrate import IntegratorConfig, integrate

FD_EPS = 1e-6


# ---------------------------------------------------------------------------
# standard scenes and random states

def sphere_body(gravity: float = 9.81) -> RigidBody:
    return RigidBody(1.3, np.diag([0.3, 0.4, 0.5]), sphere(1.0), gravity)


def ellipsoid_body(gravity: float = 9.81) -> RigidBody:
    return RigidBody(1.0, np.diag([0.4, 0.55, 0.7]),
                     ellipsoid(1.0, 1.3, 1.6), gravity)


def plane_world():
    return plane(extent=50.0, orientation=-1)  # n_H = -k, body above


def bowl_world():
    # spherical bowl, inward normal: the body rolls inside
    return sphere(3.0, orientation=-1)


def standard_scenes():
    bodies = [("sphere", sphere_body()), ("ellipsoid", ellipsoid_body())]
    worlds = [("plane", plane_world()), ("bowl", bowl_world())]
    return [(f"{bn}-on-{wn}", Scene(body, world))
            for bn, body in bodies for wn, world in worlds]


def _random_chart_coords(chart, rng):
    if chart.name in ("sphere", "ellipsoid"):
        return np.array([rng.uniform(0.6, np.pi - 0.6), rng.uniform(-2.5, 2.5)])
    lo1, hi1, lo2, hi2 = chart.domain
    pad1, pad2 = 0.1 * (hi1 - lo1), 0.1 * (hi2 - lo2)
    return np.array([rng.uniform(lo1 + pad1, hi1 - pad1),
                     rng.uniform(lo2 + pad2, hi2 - pad2)])


def sample_full_state(scene: Scene, rng) -> FullState:
    ym = _random_chart_coords(scene.body.surface, rng)
    yh = _random_chart_coords(scene.world, rng)
    theta = rng.uniform(0.0, 2.0 * np.pi)
    omega = rng.standard_normal(3)
    return make_full_state(scene, ym, yh, theta, omega)


def sample_reduced_state(body: RigidBody, rng) -> ReducedState:
    return ReducedState(_random_chart_coords(body.surface, rng),
                        rng.standard_normal(3))


def displace_full(state: FullState, tangent, eps: float) -> FullState:
    """Move a state by eps along a tangent, exactly on SO(3)."""
    return FullState(state.A @ so3_exp(eps * tangent.Omega_frame),
                     state.yM + eps * tangent.dyM,
                     state.yH + eps * tangent.dyH,
                     state.Omega + eps * tangent.dOmega)


def energy_rate_fd(scene: Scene, state: FullState, eps: float = FD_EPS) -> float:
    """dE/dt along the flow by central differences of the energy along a
    short exact-exponential displacement."""
    tan = vector_field_full(scene, state)
    e_plus = energy_full(scene, displace_full(state, tan, eps))
    e_minus = energy_full(scene, displace_full(state, tan, -eps))
    return (e_plus - e_minus) / (2.0 * eps)


# ---------------------------------------------------------------------------
# invariant families

def check_energy_invariance(rng, n_per_scene: int = 250):
    worst = 0.0
    count = 0
    for _, scene in standard_scenes():
        for _ in range(n_per_scene):
            state = sample_full_state(scene, rng)
            e = energy_full(scene, state)
            rel = abs(energy_rate_fd(scene, state)) / (1.0 + abs(e))
            worst = max(worst, rel)
            count += 1
    return {"name": "energy-invariance", "worst": worst, "tol": 1e-6,
            "n": count}


def check_tangent_membership(rng, n_per_scene: int = 250):
    worst = 0.0
    count = 0
    for _, scene in standard_scenes():
        for _ in range(n_per_scene):
            state = sample_full_state(scene, rng)
            tan = vector_field_full(scene, state)
            worst = max(worst, tangent_membership_residual(scene, state, tan))
            count += 1
    return {"name": "tangent-membership", "worst": worst, "tol": 1e-10,
            "n": count}


def check_contact_preservation(rng, n_per_scene: int = 100):
    worst = 0.0
    count = 0
    for _, scene in standard_scenes():
        for _ in range(n_per_scene):
            state = sample_full_state(scene, rng)
            tan = vector_field_full(scene, state)
            rp = constraint_residuals(scene, displace_full(state, tan, FD_EPS))[1]
            rm = constraint_residuals(scene, displace_full(state, tan, -FD_EPS))[1]
            worst = max(worst, abs(rp - rm) / (2.0 * FD_EPS))
            count += 1
    return {"name": "contact-preservation", "worst": worst, "tol": 1e-6,
            "n": count}


def oracle_charts():
    return [plane(orientation=1), plane(orientation=-1),
            sphere(1.0), sphere(2.0, orientation=-1),
            ellipsoid(1.0, 2.0, 3.0), paraboloid(0.8)]


def check_shape_oracle(rng, n_per_chart: int = 100):
    """Analytic ambient Weingarten map against -d(normal)/dv by central
    finite differences of the unit normal."""
    worst = 0.0
    count = 0
    for chart in oracle_charts():
        for _ in range(n_per_chart):
            y = _random_chart_coords(chart, rng)
            u = rng.standard_normal(2)
            p = chart_point(chart, y)
            v = p.jac @ u
            dn = (normal(chart, y + FD_EPS * u)
                  - normal(chart, y - FD_EPS * u)) / (2.0 * FD_EPS)
            diff = np.linalg.norm(weingarten_ambient(chart, y) @ v + dn)
            worst = max(worst, float(diff))
            count += 1
    return {"name": "shape-operator-oracle", "worst": worst, "tol": 1e-6,
            "n": count}


def check_reduced_agreement(rng, n: int = 250):
    body = ellipsoid_body()
    worst = 0.0
    for _ in range(n):
        state = sample_reduced_state(body, rng)
        t1 = vector_field_reduced(body, state)
        t2 = vector_field_reduced_coords(body, state)
        worst = max(worst,
                    float(np.linalg.norm(t1.dy - t2.dy)),
                    float(np.linalg.norm(t1.dOmega - t2.dOmega)))
    return {"name": "reduced-forms-agreement", "worst": worst, "tol": 1e-10,
            "n": n}


def check_reduction_commutes(rng, n: int = 250):
    worst = 0.0
    count = 0
    for body in (sphere_body(), ellipsoid_body()):
        scene = Scene(body, plane_world())
        for _ in range(n):
            red = sample_reduced_state(body, rng)
            full = embed_reduced_in_full(scene, red,
                                         theta=rng.uniform(0.0, 2.0 * np.pi),
                                         x0=rng.uniform(-2.0, 2.0, size=2))
            down = project_full_tangent(scene, vector_field_full(scene, full))
            direct = vector_field_reduced(body, red)
            scale = 1.0 + max(float(np.linalg.norm(direct.dy)),
                              float(np.linalg.norm(direct.dOmega)))
            dev = max(float(np.linalg.norm(down.dy - direct.dy)),
                      float(np.linalg.norm(down.dOmega - direct.dOmega)))
            worst = max(worst, dev / scale)
            count += 1
    return {"name": "reduction-commutes", "worst": worst, "tol": 1e-9,
            "n": count}


def energy_drift(traj) -> float:
    e0 = traj.energy[0]
    return max(abs(e - e0) for e in traj.energy) / max(abs(e0), 1.0)


def order_check_runs(h: float = 0.008, t_final: float = 2.0):
    """Energy drift of a sphere-on-plane run at h and h/2; the ratio
    measures the integrator order (16 for a 4th-order method)."""
    scene = Scene(sphere_body(), plane_world())
    state0 = make_full_state(scene, (1.4, 0.0), (0.0, 0.0), 0.3,
                             (0.8, -1.1, 1.3))
    drifts = []
    for step in (h, 0.5 * h):
        cfg = IntegratorConfig(h=step, T=t_final, sample_stride=25,
                               project_rotation=True, project_contact=True)
        drifts.append(energy_drift(integrate(scene, vector_field_full,
                                             state0, cfg)))
    return drifts[0], drifts[1]


def check_integrator_order():
    d1, d2 = order_check_runs()
    ratio = d1 / d2 if d2 > 0.0 else np.inf
    res = {"name": "integrator-order", "worst": ratio, "tol": (12.0, 20.0),
           "n": 2}
    res["passed"] = 12.0 <= ratio <= 20.0
    return res


def run_all(seed: int = 0, quick: bool = False):
    """Run every invariant family; deterministic for a fixed seed."""
    rng = np.random.default_rng(seed)
    scale = 4 if quick else 1
    results = [
        check_shape_oracle(rng, 100 // scale),
        check_energy_invariance(rng, 250 // scale),
        check_tangent_membership(rng, 250 // scale),
        check_contact_preservation(rng, 100 // scale),
        check_reduced_agreement(rng, 250 // scale),
        check_reduction_commutes(rng, 250 // scale),
        check_integrator_order(),
    ]
    for res in results:
        if "passed" not in res:
            res["passed"] = res["worst"] <= res["tol"]
    return results
