"""Parametric surface charts, fundamental forms, Weingarten maps, and
small SO(3) helpers (hat map, Rodrigues exponential, normal alignment).

A chart is a map s: U in R^2 -> R^3 with analytic jacobian and hessian.
All curvature quantities use the *unit* normal sigma * (d1 s x d2 s)/|.|,
where sigma is the chart's orientation sign.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

from .errors import ChartBoundary, DegenerateChart

DEGENERACY_EPS = 1e-12

_ID3 = np.eye(3)


# ---------------------------------------------------------------------------
# small vector helpers (hand-rolled for speed on 3-vectors / 2x2 systems)

def cross3(a, b):
    a0, a1, a2 = a
    b0, b1, b2 = b
    out = np.empty(3)
    out[0] = a1 * b2 - a2 * b1
    out[1] = a2 * b0 - a0 * b2
    out[2] = a0 * b1 - a1 * b0
    return out


def solve3_sym(m, b):
    """Solve a symmetric 3x3 system by the adjugate formula."""
    m00, m01, m02 = m[0]
    m11, m12 = m[1, 1], m[1, 2]
    m22 = m[2, 2]
    c00 = m11 * m22 - m12 * m12
    c01 = m02 * m12 - m01 * m22
    c02 = m01 * m12 - m02 * m11
    det = m00 * c00 + m01 * c01 + m02 * c02
    c11 = m00 * m22 - m02 * m02
    c12 = m01 * m02 - m00 * m12
    c22 = m00 * m11 - m01 * m01
    b0, b1, b2 = b
    out = np.empty(3)
    out[0] = (c00 * b0 + c01 * b1 + c02 * b2) / det
    out[1] = (c01 * b0 + c11 * b1 + c12 * b2) / det
    out[2] = (c02 * b0 + c12 * b1 + c22 * b2) / det
    return out


def solve2(m, b):
    """Solve a 2x2 system by Cramer's rule."""
    det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
    return np.array([
        (m[1, 1] * b[0] - m[0, 1] * b[1]) / det,
        (m[0, 0] * b[1] - m[1, 0] * b[0]) / det,
    ])


def inv2(m):
    det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
    return np.array([[m[1, 1], -m[0, 1]], [-m[1, 0], m[0, 0]]]) / det


def cond2(m):
    """Spectral condition number of a 2x2 matrix (inf when singular)."""
    a, b = m[0]
    c, d2 = m[1]
    t = a * a + b * b + c * c + d2 * d2
    d = a * d2 - b * c
    disc = max(t * t - 4.0 * d * d, 0.0)
    r = math.sqrt(disc)
    smax2 = 0.5 * (t + r)
    smin2 = 0.5 * (t - r)
    if smin2 <= 0.0:
        return np.inf
    return math.sqrt(smax2 / smin2)


def hat(v):
    """hat(v) w = v x w; the usual so(3) isomorphism."""
    return np.array([
        [0.0, -v[2], v[1]],
        [v[2], 0.0, -v[0]],
        [-v[1], v[0], 0.0],
    ])


def so3_exp(v):
    """Rodrigues closed form of exp(hat(v))."""
    v0, v1, v2 = v
    th2 = v0 * v0 + v1 * v1 + v2 * v2
    th = math.sqrt(th2)
    if th < 1e-8:
        # series: sin(t)/t and (1-cos t)/t^2
        a = 1.0 - th2 / 6.0
        b = 0.5 - th2 / 24.0
    else:
        a = math.sin(th) / th
        b = (1.0 - math.cos(th)) / th2
    # I + a hat(v) + b (v v^t - th2 I), written out elementwise
    b01, b02, b12 = b * v0 * v1, b * v0 * v2, b * v1 * v2
    a0, a1, a2 = a * v0, a * v1, a * v2
    out = np.empty((3, 3))
    out[0, 0] = 1.0 + b * (v0 * v0 - th2)
    out[0, 1] = b01 - a2
    out[0, 2] = b02 + a1
    out[1, 0] = b01 + a2
    out[1, 1] = 1.0 + b * (v1 * v1 - th2)
    out[1, 2] = b12 - a0
    out[2, 0] = b02 - a1
    out[2, 1] = b12 + a0
    out[2, 2] = 1.0 + b * (v2 * v2 - th2)
    return out


def rotation_about(axis, angle):
    """Rotation by `angle` about the unit 3-vector `axis`."""
    k = hat(axis)
    return _ID3 + np.sin(angle) * k + (1.0 - np.cos(angle)) * (k @ k)


def _align_nonantipodal(u, w):
    # stable for u.w >= 0
    c = float(u @ w)
    r = cross3(u, w)
    k = hat(r)
    return _ID3 + k + (k @ k) / (1.0 + c)


def rotation_aligning(u, w, theta=0.0):
    """A rotation R with R u = w, for unit u, w.

    The circle of solutions is parametrized by post-composing a rotation
    by theta about w.  The antipodal case u ~ -w is resolved by first
    rotating pi about the coordinate axis with the largest projection
    orthogonal to u (ties broken toward x), then aligning -u with w.
    """
    c = float(u @ w)
    if c >= 0.0:
        r0 = _align_nonantipodal(u, w)
    else:
        i = int(np.argmax(1.0 - u * u))
        a = _ID3[i] - u[i] * u
        a = a / np.linalg.norm(a)
        p = 2.0 * np.outer(a, a) - _ID3  # pi about a
        r0 = _align_nonantipodal(-u, w) @ p
    if theta == 0.0:
        return r0
    return rotation_about(w, theta) @ r0


# ---------------------------------------------------------------------------
# charts

@dataclass(frozen=True)
class SurfaceChart:
    """An oriented immersed surface patch.

    eval      y (2,) -> s(y) (3,)
    jacobian  y -> (3, 2) matrix ds/dy
    hessian   y -> (3, 2, 2) array, [i, a, b] = d2 s_i / dy^a dy^b
    domain    open rectangle (y1min, y1max, y2min, y2max)
    orientation  sign applied to the cross-product normal
    """

    eval: Callable[[np.ndarray], np.ndarray]
    jacobian: Callable[[np.ndarray], np.ndarray]
    hessian: Callable[[np.ndarray], np.ndarray]
    domain: tuple[float, float, float, float]
    orientation: int = 1
    name: str = "custom"
    # optional fast paths: a fused y -> (s, jac, hess) evaluator, a
    # closed-form y -> ChartPoint evaluator, and a flag for charts whose
    # jacobian and hessian do not depend on y
    fused: Callable[[np.ndarray], tuple] | None = None
    point: Callable[[np.ndarray], "ChartPoint"] | None = None
    constant_geometry: bool = False

    def contains(self, y) -> bool:
        d = self.domain
        return d[0] < y[0] < d[1] and d[2] < y[1] < d[3]

    def require_inside(self, y):
        d = self.domain
        if not (d[0] < y[0] < d[1] and d[2] < y[1] < d[3]):
            raise ChartBoundary(
                f"chart '{self.name}': point ({y[0]:g}, {y[1]:g}) "
                f"outside open domain {self.domain}")

    def flipped(self) -> "SurfaceChart":
        """Same patch with the opposite orientation sign."""
        return SurfaceChart(self.eval, self.jacobian, self.hessian,
                            self.domain, -self.orientation, self.name,
                            self.fused, None, self.constant_geometry)


@dataclass(frozen=True)
class TangentFrame:
    """Orthonormal basis (e1, e2) of the tangent plane with n = e1 x e2."""

    e1: np.ndarray
    e2: np.ndarray
    n: np.ndarray
    chart_to_frame: np.ndarray  # (2, 2), chart velocity -> frame components


class ChartPoint(NamedTuple):
    """Everything needed at one chart point (single evaluation pass)."""

    s: np.ndarray       # (3,) position
    jac: np.ndarray     # (3, 2)
    n: np.ndarray       # (3,) unit normal (oriented)
    g: np.ndarray       # (2, 2) first fundamental form
    ginv: np.ndarray    # (2, 2)
    weingarten: np.ndarray  # (3, 3) ambient shape operator
    frame: np.ndarray   # (3, 2) columns e1, e2
    w_frame: np.ndarray  # (2, 2) shape operator in the orthonormal frame
    flat: bool          # True when the second form vanishes here


def chart_point(chart: SurfaceChart, y) -> ChartPoint:
    if chart.constant_geometry:
        cached = chart.__dict__.get("_const_point")
        if cached is None:
            full = _chart_point_compute(chart, y)
            object.__setattr__(chart, "_const_point", full[1:])
            return full
        return ChartPoint(chart.eval(y), *cached)
    y0, y1 = float(y[0]), float(y[1])
    last = chart.__dict__.get("_last_point")
    if last is not None and last[0] == y0 and last[1] == y1:
        return last[2]
    if chart.point is not None:
        p = chart.point(y)
    else:
        p = _chart_point_compute(chart, y)
    object.__setattr__(chart, "_last_point", (y0, y1, p))
    return p


def _chart_point_compute(chart: SurfaceChart, y) -> ChartPoint:
    if chart.fused is not None:
        s, j, h = chart.fused(y)
    else:
        s, j, h = chart.eval(y), chart.jacobian(y), chart.hessian(y)
    j0, j1 = j[:, 0], j[:, 1]
    cr = cross3(j0, j1)
    nn = math.sqrt(cr @ cr)
    if nn < DEGENERACY_EPS:
        raise DegenerateChart(
            f"chart '{chart.name}' degenerate at ({y[0]:g}, {y[1]:g}): "
            f"|d1 s x d2 s| = {nn:.3e}")
    n = (chart.orientation / nn) * cr
    g = j.T @ j
    ginv = inv2(g)
    l2 = n[0] * h[0] + n[1] * h[1] + n[2] * h[2]  # second fundamental form
    w = j @ (ginv @ l2 @ ginv) @ j.T
    e1 = j0 / math.sqrt(j0 @ j0)
    e2 = cross3(n, e1)
    frame = np.empty((3, 2))
    frame[:, 0] = e1
    frame[:, 1] = e2
    flat = l2[0, 0] == 0.0 and l2[1, 1] == 0.0 and l2[0, 1] == 0.0
    w_frame = frame.T @ (w @ frame)
    return ChartPoint(s, j, n, g, ginv, w, frame, w_frame, flat)


def normal(chart: SurfaceChart, y):
    """Oriented unit normal sigma (d1 s x d2 s)/|.|."""
    return chart_point(chart, y).n


def first_form(chart: SurfaceChart, y):
    """First fundamental form g_ab = d_a s . d_b s."""
    j = chart.jacobian(y)
    g = j.T @ j
    if g[0, 0] * g[1, 1] - g[0, 1] * g[1, 0] < 1e-18:
        raise DegenerateChart(
            f"chart '{chart.name}': first form singular at ({y[0]:g}, {y[1]:g})")
    return g


def second_form(chart: SurfaceChart, y):
    """Second fundamental form L_ab = n . d2 s / dy^a dy^b (unit normal)."""
    n = chart_point(chart, y).n
    h = chart.hessian(y)
    return n[0] * h[0] + n[1] * h[1] + n[2] * h[2]


def shape_operator(chart: SurfaceChart, y):
    """Weingarten map in chart indices, L^a_b = g^{ac} L_cb."""
    p = chart_point(chart, y)
    h = chart.hessian(y)
    l2 = p.n[0] * h[0] + p.n[1] * h[1] + p.n[2] * h[2]
    return p.ginv @ l2


def weingarten_ambient(chart: SurfaceChart, y):
    """The shape operator as a 3x3 map: W (d_a s) = L^b_a d_b s, W n = 0.

    For tangent v, W v = - (derivative of the unit normal along v).
    """
    return chart_point(chart, y).weingarten


def tangent_frame(chart: SurfaceChart, y) -> TangentFrame:
    p = chart_point(chart, y)
    e1 = p.frame[:, 0]
    e2 = p.frame[:, 1]
    return TangentFrame(e1, e2, p.n, p.frame.T @ p.jac)


# ---------------------------------------------------------------------------
# built-in charts

def plane(extent: float = 10.0, orientation: int = 1) -> SurfaceChart:
    """The z = 0 plane, s(y) = (y1, y2, 0).  orientation=-1 gives n = -k."""
    jac = np.array([[1.0, 0.0], [0.0, 1.0], [0.0, 0.0]])
    hes = np.zeros((3, 2, 2))

    def ev(y):
        return np.array([y[0], y[1], 0.0])

    return SurfaceChart(ev, lambda y: jac, lambda y: hes,
                        (-extent, extent, -extent, extent),
                        orientation, "plane", constant_geometry=True)


def sphere(radius: float = 1.0, orientation: int = 1) -> SurfaceChart:
    """Sphere of given radius in spherical coordinates (theta, phi), poles
    excluded.  orientation=+1 gives the outward normal."""
    r = float(radius)

    def ev(y):
        st, ct = np.sin(y[0]), np.cos(y[0])
        sp, cp = np.sin(y[1]), np.cos(y[1])
        return np.array([r * st * cp, r * st * sp, r * ct])

    def jac(y):
        st, ct = np.sin(y[0]), np.cos(y[0])
        sp, cp = np.sin(y[1]), np.cos(y[1])
        return np.array([
            [r * ct * cp, -r * st * sp],
            [r * ct * sp, r * st * cp],
            [-r * st, 0.0],
        ])

    def hes(y):
        st, ct = np.sin(y[0]), np.cos(y[0])
        sp, cp = np.sin(y[1]), np.cos(y[1])
        return np.array([
            [[-r * st * cp, -r * ct * sp], [-r * ct * sp, -r * st * cp]],
            [[-r * st * sp, r * ct * cp], [r * ct * cp, -r * st * sp]],
            [[-r * ct, 0.0], [0.0, 0.0]],
        ])

    def fused(y):
        return _sphere_fused(r, 1.0, 1.0, 1.0, float(y[0]), float(y[1]))

    def point(y):
        return _scaled_sphere_point(r, r, r, float(orientation), y)

    return SurfaceChart(ev, jac, hes, (0.0, np.pi, -np.pi, np.pi),
                        orientation, "sphere", fused=fused, point=point)


def _sphere_fused(r, ax, ay, az, t, p):
    """Single-pass (s, jacobian, hessian) of the axis-scaled sphere of
    radius r at spherical coordinates (t, p)."""
    st, ct = math.sin(t), math.cos(t)
    sp, cp = math.sin(p), math.cos(p)
    rx, ry, rz = ax * r, ay * r, az * r
    x_stcp, x_stsp = rx * st * cp, rx * st * sp
    x_ctcp, x_ctsp = rx * ct * cp, rx * ct * sp
    y_stcp, y_stsp = ry * st * cp, ry * st * sp
    y_ctcp, y_ctsp = ry * ct * cp, ry * ct * sp
    s = np.empty(3)
    s[0] = x_stcp
    s[1] = y_stsp
    s[2] = rz * ct
    j = np.empty((3, 2))
    j[0, 0] = x_ctcp
    j[0, 1] = -x_stsp
    j[1, 0] = y_ctsp
    j[1, 1] = y_stcp
    j[2, 0] = -rz * st
    j[2, 1] = 0.0
    h = np.empty((3, 2, 2))
    h[0, 0, 0] = -x_stcp
    h[0, 0, 1] = h[0, 1, 0] = -x_ctsp
    h[0, 1, 1] = -x_stcp
    h[1, 0, 0] = -y_stsp
    h[1, 0, 1] = h[1, 1, 0] = y_ctcp
    h[1, 1, 1] = -y_stsp
    h[2, 0, 0] = -rz * ct
    h[2, 0, 1] = h[2, 1, 0] = h[2, 1, 1] = 0.0
    return s, j, h


def _scaled_sphere_point(rx, ry, rz, sigma, y):
    """Closed-form ChartPoint of s = (rx st cp, ry st sp, rz ct)."""
    st, ct = math.sin(float(y[0])), math.cos(float(y[0]))
    sp, cp = math.sin(float(y[1])), math.cos(float(y[1]))
    s0, s1, s2 = rx * st * cp, ry * st * sp, rz * ct
    j00, j10, j20 = rx * ct * cp, ry * ct * sp, -rz * st
    j01, j11 = -rx * st * sp, ry * st * cp
    s = np.empty(3)
    s[0], s[1], s[2] = s0, s1, s2
    j = np.empty((3, 2))
    j[0, 0], j[0, 1] = j00, j01
    j[1, 0], j[1, 1] = j10, j11
    j[2, 0], j[2, 1] = j20, 0.0
    # d1 s x d2 s = st (ry rz st cp, rx rz st sp, rx ry ct)
    c0 = ry * rz * st * st * cp
    c1 = rx * rz * st * st * sp
    c2 = rx * ry * st * ct
    nn = math.sqrt(c0 * c0 + c1 * c1 + c2 * c2)
    if nn < DEGENERACY_EPS:
        raise DegenerateChart(
            f"scaled sphere degenerate at ({y[0]:g}, {y[1]:g})")
    f = sigma / nn
    n0, n1, n2 = f * c0, f * c1, f * c2
    n = np.empty(3)
    n[0], n[1], n[2] = n0, n1, n2
    g00 = j00 * j00 + j10 * j10 + j20 * j20
    g01 = j00 * j01 + j10 * j11
    g11 = j01 * j01 + j11 * j11
    det = g00 * g11 - g01 * g01
    gi00, gi01, gi11 = g11 / det, -g01 / det, g00 / det
    g = np.empty((2, 2))
    g[0, 0], g[1, 1] = g00, g11
    g[0, 1] = g[1, 0] = g01
    ginv = np.empty((2, 2))
    ginv[0, 0], ginv[1, 1] = gi00, gi11
    ginv[0, 1] = ginv[1, 0] = gi01
    # second form against the hessian columns (-s, (j01, j11, 0) scaled)
    l00 = -(n0 * s0 + n1 * s1 + n2 * s2)
    l01 = ct * (n1 * ry * cp - n0 * rx * sp)
    l11 = -(n0 * s0 + n1 * s1)
    # q = ginv l2 ginv, then W = j q j^t as rank-2 sums over the columns
    t00, t01 = gi00 * l00 + gi01 * l01, gi00 * l01 + gi01 * l11
    t10, t11 = gi01 * l00 + gi11 * l01, gi01 * l01 + gi11 * l11
    q00 = t00 * gi00 + t01 * gi01
    q01 = t00 * gi01 + t01 * gi11
    q11 = t10 * gi01 + t11 * gi11
    w = np.empty((3, 3))
    w[0, 0] = q00 * j00 * j00 + 2.0 * q01 * j00 * j01 + q11 * j01 * j01
    w[1, 1] = q00 * j10 * j10 + 2.0 * q01 * j10 * j11 + q11 * j11 * j11
    w[2, 2] = q00 * j20 * j20
    w01 = q00 * j00 * j10 + q01 * (j00 * j11 + j01 * j10) + q11 * j01 * j11
    w02 = q00 * j00 * j20 + q01 * j01 * j20
    w12 = q00 * j10 * j20 + q01 * j11 * j20
    w[0, 1] = w[1, 0] = w01
    w[0, 2] = w[2, 0] = w02
    w[1, 2] = w[2, 1] = w12
    nj0 = math.sqrt(g00)
    e00, e01, e02 = j00 / nj0, j10 / nj0, j20 / nj0
    e10 = n1 * e02 - n2 * e01
    e11 = n2 * e00 - n0 * e02
    e12 = n0 * e01 - n1 * e00
    frame = np.empty((3, 2))
    frame[0, 0], frame[1, 0], frame[2, 0] = e00, e01, e02
    frame[0, 1], frame[1, 1], frame[2, 1] = e10, e11, e12
    w_frame = frame.T @ (w @ frame)
    return ChartPoint(s, j, n, g, ginv, w, frame, w_frame, False)


def ellipsoid(a: float = 1.0, b: float = 1.0, c: float = 1.0,
              orientation: int = 1) -> SurfaceChart:
    """Ellipsoid with semi-axes (a, b, c), spherical parametrization."""
    ax = np.array([float(a), float(b), float(c)])
    base = sphere(1.0, 1)

    def ev(y):
        return ax * base.eval(y)

    def jac(y):
        return ax[:, None] * base.jacobian(y)

    def hes(y):
        return ax[:, None, None] * base.hessian(y)

    def fused(y):
        return _sphere_fused(1.0, ax[0], ax[1], ax[2], float(y[0]), float(y[1]))

    def point(y):
        return _scaled_sphere_point(ax[0], ax[1], ax[2], float(orientation), y)

    return SurfaceChart(ev, jac, hes, base.domain, orientation, "ellipsoid",
                        fused=fused, point=point)


def paraboloid(coeff: float = 1.0, extent: float = 10.0,
               orientation: int = 1) -> SurfaceChart:
    """Circular paraboloid z = coeff (y1^2 + y2^2) / 2."""
    k = float(coeff)

    def ev(y):
        return np.array([y[0], y[1], 0.5 * k * (y[0] * y[0] + y[1] * y[1])])

    def jac(y):
        return np.array([[1.0, 0.0], [0.0, 1.0], [k * y[0], k * y[1]]])

    hes = np.zeros((3, 2, 2))
    hes[2] = k * np.eye(2)

    def fused(y):
        return ev(y), jac(y), hes

    return SurfaceChart(ev, jac, lambda y: hes,
                        (-extent, extent, -extent, extent),
                        orientation, "paraboloid", fused=fused)


CHART_BUILDERS = {
    "plane": plane,
    "sphere": sphere,
    "ellipsoid": ellipsoid,
    "paraboloid": paraboloid,
}


def make_chart(name: str, orientation: int = 1, **params) -> SurfaceChart:
    """Construct a built-in chart by name ('plane', 'sphere', 'ellipsoid',
    'paraboloid') with keyword parameters."""
    try:
        builder = CHART_BUILDERS[name]
    except KeyError:
        raise ValueError(f"unknown surface '{name}'; "
                         f"choices: {sorted(CHART_BUILDERS)}") from None
    return builder(orientation=orientation, **params)
