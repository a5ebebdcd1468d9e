"""Scenario-driven command line front end.

Commands:
    simulate <scenario.toml> -o out.csv [--reduced]   integrate one system
    compare  <scenario.toml> -o dev.csv               full vs reduced on the plane
    check    [--seed N]                               run the invariant suite

Scenarios are TOML files with [body], [world], [initial], and
[integrator] sections; see the scenarios/ directory for examples.

Exit codes: 0 success, 1 configuration error, 2 runtime termination
(singular contact operator / chart boundary), 3 comparison failure.
"""

from __future__ import annotations

import argparse
import re
import sys

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from . import checks
from .body import RigidBody
from .dynamics_full import Scene, make_full_state, vector_field_full
from .dynamics_reduced import ReducedState, vector_field_reduced
from .errors import NotPlanarScene, RollingBodyError
from .geometry import make_chart
from .integrate import IntegratorConfig, integrate

FULL_HEADER = ("t,A11,A12,A13,A21,A22,A23,A31,A32,A33,"
               "yM1,yM2,yH1,yH2,Ox,Oy,Oz,E,res_so3,res_contact")
REDUCED_HEADER = "t,y1,y2,Ox,Oy,Oz,E"
COMPARE_HEADER = "t,dev_y,dev_omega,dev_E"


class ScenarioError(Exception):
    def __init__(self, section, key, message):
        super().__init__(message)
        self.section = section
        self.key = key


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _key_line(path: str, section: str, key) -> int | None:
    """Best-effort line number of `key` within `[section]` of a TOML file."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError:
        return None
    in_section = section is None
    sec_line = None
    for i, line in enumerate(lines, start=1):
        m = re.match(r"\s*\[([^\]]+)\]", line)
        if m:
            in_section = m.group(1).strip() == section
            if in_section:
                sec_line = i
            continue
        if in_section and key and re.match(rf"\s*{re.escape(key)}\s*=", line):
            return i
    return sec_line


class _Section:
    """Table accessor that raises keyed errors for missing/invalid entries."""

    def __init__(self, name, table):
        self.name = name
        self.table = table

    def get(self, key, default=None, required=False):
        if key not in self.table:
            if required:
                raise ScenarioError(self.name, key, "missing required key")
            return default
        return self.table[key]

    def vector(self, key, length, required=True, default=None):
        raw = self.get(key, required=required, default=default)
        if raw is None:
            return None
        try:
            vec = np.asarray(raw, dtype=float)
        except (TypeError, ValueError):
            raise ScenarioError(self.name, key, f"expected {length} numbers")
        if vec.shape != (length,):
            raise ScenarioError(self.name, key,
                                f"expected {length} numbers, got shape {vec.shape}")
        return vec

    def number(self, key, default=None, required=False):
        raw = self.get(key, default=default, required=required)
        if raw is None:
            return None
        if not isinstance(raw, (int, float)) or isinstance(raw, bool):
            raise ScenarioError(self.name, key, "expected a number")
        return float(raw)


def _build_surface(sec: _Section, default_orientation: int):
    name = sec.get("surface", required=True)
    params = sec.get("parameters", default={})
    orientation = sec.get("orientation", default=default_orientation)
    if orientation not in (1, -1):
        raise ScenarioError(sec.name, "orientation", "must be 1 or -1")
    if not isinstance(params, dict):
        raise ScenarioError(sec.name, "parameters", "expected a table")
    try:
        return make_chart(name, orientation=orientation, **params)
    except (ValueError, TypeError) as exc:
        raise ScenarioError(sec.name, "surface", str(exc))


def _build_inertia(sec: _Section):
    raw = sec.get("inertia", required=True)
    arr = np.asarray(raw, dtype=float)
    if arr.shape == (3,):
        return np.diag(arr)
    if arr.shape == (3, 3):
        return arr
    raise ScenarioError(sec.name, "inertia",
                        "expected 3 principal values or a full 3x3 matrix")


def load_scenario(path: str):
    """Parse and validate a scenario file; returns (scene, initial, config)."""
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except OSError as exc:
        raise ScenarioError(None, None, f"cannot read scenario: {exc}")
    except tomllib.TOMLDecodeError as exc:
        raise ScenarioError(None, None, f"TOML parse error: {exc}")

    for section in ("body", "world", "initial", "integrator"):
        if section not in data:
            raise ScenarioError(section, None, f"missing [{section}] section")

    bsec = _Section("body", data["body"])
    wsec = _Section("world", data["world"])
    isec = _Section("initial", data["initial"])
    gsec = _Section("integrator", data["integrator"])

    try:
        body = RigidBody(
            mass=bsec.number("mass", required=True),
            inertia=_build_inertia(bsec),
            surface=_build_surface(bsec, default_orientation=1),
            gravity=bsec.number("gravity", default=9.81),
        )
    except ValueError as exc:
        raise ScenarioError("body", "mass", str(exc))
    scene = Scene(body, _build_surface(wsec, default_orientation=-1))

    initial = {
        "yM": isec.vector("yM", 2),
        "yH": isec.vector("yH", 2),
        "theta": isec.number("theta", default=0.0),
        "omega": isec.vector("omega", 3),
    }
    if not body.surface.contains(initial["yM"]):
        raise ScenarioError("initial", "yM", "outside the body chart domain")
    if not scene.world.contains(initial["yH"]):
        raise ScenarioError("initial", "yH", "outside the world chart domain")

    try:
        config = IntegratorConfig(
            h=gsec.number("h", required=True),
            T=gsec.number("T", required=True),
            sample_stride=int(gsec.get("sample_stride", default=1)),
            project_rotation=bool(gsec.get("project_rotation", default=True)),
            project_contact=bool(gsec.get("project_contact", default=True)),
            lambda_cond_max=gsec.number("lambda_cond_max", default=1e8),
        )
    except ValueError as exc:
        raise ScenarioError("integrator", "h", str(exc))
    return scene, initial, config


# ---------------------------------------------------------------------------
# output

def _write_csv(path, header, rows, comment=None):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(header + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")
        if comment:
            fh.write(comment + "\n")


def _full_rows(traj):
    for i, state in enumerate(traj.states):
        yield (traj.times[i], *state.A.reshape(-1), *state.yM, *state.yH,
               *state.Omega, traj.energy[i], traj.so3_residual[i],
               traj.contact_residual[i])


def _reduced_rows(traj):
    for i, state in enumerate(traj.states):
        yield (traj.times[i], *state.y, *state.Omega, traj.energy[i])


def _emit_gnuplot(path, csv_path, column, title):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("set datafile separator ','\n")
        fh.write(f"set xlabel 't [s]'\nset ylabel '{title}'\n")
        fh.write(f"plot '{csv_path}' every ::1 using 1:{column} "
                 f"with lines title '{title}'\n")


# ---------------------------------------------------------------------------
# commands

def cmd_simulate(args) -> int:
    scene, initial, config = load_scenario(args.scenario)
    vf_full = lambda sc, st: vector_field_full(sc, st, config.lambda_cond_max)
    if args.reduced:
        scene.require_planar("--reduced")
        state0 = ReducedState(initial["yM"], initial["omega"])
        context, field = scene.body, vector_field_reduced
        header, rows_of = REDUCED_HEADER, _reduced_rows
        energy_col = 7
    else:
        state0 = make_full_state(scene, initial["yM"], initial["yH"],
                                 initial["theta"], initial["omega"])
        context, field = scene, vf_full
        header, rows_of = FULL_HEADER, _full_rows
        energy_col = 18
    code = 0
    comment = None
    try:
        traj = integrate(context, field, state0, config)
    except RollingBodyError as err:
        traj = err.partial
        comment = f"# terminated: {type(err).__name__} t={_fmt(err.time)}"
        print(f"terminated: {type(err).__name__} at t={err.time:g}: {err}",
              file=sys.stderr)
        code = 2
    _write_csv(args.output, header, rows_of(traj), comment)
    if args.emit_gnuplot:
        _emit_gnuplot(args.emit_gnuplot, args.output, energy_col, "E")
    return code


def cmd_compare(args) -> int:
    scene, initial, config = load_scenario(args.scenario)
    scene.require_planar("compare")
    state_full = make_full_state(scene, initial["yM"], initial["yH"],
                                 initial["theta"], initial["omega"])
    state_red = ReducedState(initial["yM"], initial["omega"])
    body_red = scene.body
    if args.hook_gravity_scale != 1.0:
        # test hook: deliberately mismatch gravity between the two runs
        body_red = RigidBody(body_red.mass, body_red.inertia,
                             body_red.surface,
                             body_red.gravity * args.hook_gravity_scale)
    vf_full = lambda sc, st: vector_field_full(sc, st, config.lambda_cond_max)
    traj_f = integrate(scene, vf_full, state_full, config)
    traj_r = integrate(body_red, vector_field_reduced, state_red, config)
    rows = []
    max_y = max_om = max_e = 0.0
    for i, t in enumerate(traj_f.times):
        sf, sr = traj_f.states[i], traj_r.states[i]
        dev_y = float(np.linalg.norm(sf.yM - sr.y))
        dev_om = float(np.linalg.norm(sf.Omega - sr.Omega))
        dev_e = abs(traj_f.energy[i] - traj_r.energy[i])
        rows.append((t, dev_y, dev_om, dev_e))
        max_y, max_om, max_e = (max(max_y, dev_y), max(max_om, dev_om),
                                max(max_e, dev_e))
    _write_csv(args.output, COMPARE_HEADER, rows)
    if args.emit_gnuplot:
        _emit_gnuplot(args.emit_gnuplot, args.output, 2, "dev_y")
    print(f"max deviations: y={max_y:.3e} omega={max_om:.3e} E={max_e:.3e}")
    return 0 if max(max_y, max_om, max_e) <= 1e-6 else 3


def cmd_check(args) -> int:
    from . import dynamics_full
    sign = dynamics_full.GRAVITY_TORQUE_SIGN
    if args.hook_negate_gravity_torque:
        # test hook: corrupt the gravity torque sign (negative control)
        dynamics_full.GRAVITY_TORQUE_SIGN = -1.0
    try:
        results = checks.run_all(seed=args.seed, quick=args.quick)
    finally:
        dynamics_full.GRAVITY_TORQUE_SIGN = sign
    all_pass = True
    print(f"invariant suite, seed={args.seed}")
    for res in results:
        status = "PASS" if res["passed"] else "FAIL"
        all_pass &= res["passed"]
        tol = res["tol"]
        tol_str = (f"[{tol[0]:g}, {tol[1]:g}]" if isinstance(tol, tuple)
                   else f"{tol:.1e}")
        print(f"{status} {res['name']:<24} worst={res['worst']:.3e} "
              f"tol={tol_str} n={res['n']}")
    return 0 if all_pass else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rollsim",
        description="Rolling rigid body simulation and verification")
    sub = parser.add_subparsers(dest="command", required=True)

    p_sim = sub.add_parser("simulate", help="integrate a scenario to CSV")
    p_sim.add_argument("scenario")
    p_sim.add_argument("-o", "--output", required=True)
    p_sim.add_argument("--reduced", action="store_true",
                       help="integrate the planar-reduced system")
    p_sim.add_argument("--emit-gnuplot", metavar="PATH", default=None)
    p_sim.set_defaults(func=cmd_simulate)

    p_cmp = sub.add_parser("compare",
                           help="integrate full and reduced systems, "
                                "write per-sample deviations")
    p_cmp.add_argument("scenario")
    p_cmp.add_argument("-o", "--output", required=True)
    p_cmp.add_argument("--emit-gnuplot", metavar="PATH", default=None)
    p_cmp.add_argument("--hook-gravity-scale", type=float, default=1.0,
                       help=argparse.SUPPRESS)
    p_cmp.set_defaults(func=cmd_compare)

    p_chk = sub.add_parser("check", help="run the invariant check suite")
    p_chk.add_argument("--seed", type=int, default=0)
    p_chk.add_argument("--quick", action="store_true",
                       help="smaller sample counts")
    p_chk.add_argument("--hook-negate-gravity-torque", action="store_true",
                       help=argparse.SUPPRESS)
    p_chk.set_defaults(func=cmd_check)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ScenarioError as exc:
        where = getattr(args, "scenario", "<config>")
        line = _key_line(where, exc.section, exc.key)
        loc = f"{where}:{line}" if line else where
        sec = f"[{exc.section}] " if exc.section else ""
        key = f"{exc.key}: " if exc.key else ""
        print(f"{loc}: {sec}{key}{exc}", file=sys.stderr)
        return 1
    except NotPlanarScene as exc:
        print(f"NotPlanarScene: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
