"""Command-line front end: simulate, impact-test, check, sweep.

Configuration is a single JSON file with nested sections (documented in
the README); outputs are a trajectory CSV, a summary JSON, and an
optional SVG plot. Exit codes: 0 success with all checks passing, 2 on a
check failure or non-completed run, 1 on configuration or input errors.
"""

from __future__ import annotations

import argparse
import copy
import json
import os
import sys as _sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .billiards import (
    BilliardSpec,
    Circle,
    Ellipse,
    angular_momentum,
    circular_impact_closed_form,
    elliptical_impact_closed_form,
    make_circular_billiard,
    make_elliptical_billiard,
)
from .checks import (
    FLOW_TOL,
    IMPACT_TOL,
    check_dissipated_quantity,
    check_energy_decay,
    check_impact_conditions,
    CheckReport,
)
from .core import (
    ContactStateH,
    ContactStateL,
    SystemSpec,
    hamiltonian_from_lagrangian,
    lagrangian_energy,
    legendre_forward,
    natural_lagrangian_system,
)
from .errors import ConfigError, ContactSimError, GrazingContact
from .hybrid import COMPLETED, HybridSystem, simulate
from .impact import SwitchingSurface, resolve_impact_natural, tangent_basis
from .integrate import EventConfig, StepperConfig
from .io import (
    format_float,
    read_trajectory_csv,
    write_summary_json,
    write_trajectory_csv,
    write_svg,
)

CONTAINMENT_TOL = 1e-10


@dataclass
class RunConfig:
    """Validated run configuration (see README for the file schema)."""

    system: dict
    q0: np.ndarray
    v0: Optional[np.ndarray]
    p0: Optional[np.ndarray]
    z0: float
    t_final: float
    formulation: str
    max_events: int
    stepper: StepperConfig
    events: EventConfig
    samples: int
    svg: bool
    raw: dict = field(repr=False, default_factory=dict)


def _get(cfg: dict, path: str, default=None, required: bool = False):
    node = cfg
    for part in path.split("."):
        if not isinstance(node, dict) or part not in node:
            if required:
                raise ConfigError(f"missing required config field '{path}'")
            return default
        node = node[part]
    return node


def _positive(value, path: str) -> float:
    try:
        v = float(value)
    except (TypeError, ValueError):
        raise ConfigError(f"'{path}' must be a number, got {value!r}")
    if not v > 0.0:
        raise ConfigError(f"'{path}' must be > 0, got {v}")
    return v


def load_config(path: str) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}")
    except json.JSONDecodeError as e:
        raise ConfigError(
            f"config parse error in {path} at line {e.lineno}, column {e.colno}: {e.msg}"
        )


def parse_config(cfg: dict, samples_override=None, svg_override=None,
                 formulation_override=None) -> RunConfig:
    kind = _get(cfg, "system.kind", required=True)
    if kind not in ("circle", "ellipse", "custom"):
        raise ConfigError(f"'system.kind' must be circle, ellipse, or custom, got {kind!r}")
    gamma = float(_get(cfg, "system.gamma", 0.0))
    if gamma < 0.0:
        raise ConfigError(f"'system.gamma' must be >= 0, got {gamma}")
    if kind == "circle":
        _positive(_get(cfg, "system.radius", 1.0), "system.radius")
        _positive(_get(cfg, "system.mass", 1.0), "system.mass")
        n = 2
    elif kind == "ellipse":
        _positive(_get(cfg, "system.a", required=True), "system.a")
        _positive(_get(cfg, "system.b", required=True), "system.b")
        _positive(_get(cfg, "system.mass", 1.0), "system.mass")
        n = 2
    else:
        n = int(_get(cfg, "system.n", required=True))
        if n < 1:
            raise ConfigError(f"'system.n' must be >= 1, got {n}")
        M = np.asarray(_get(cfg, "system.mass_matrix", required=True), dtype=float)
        if M.shape != (n, n):
            raise ConfigError(
                f"'system.mass_matrix' must be {n}x{n}, got shape {M.shape}")
        if _get(cfg, "system.surface.kind", required=True) != "sphere":
            raise ConfigError("'system.surface.kind' must be 'sphere'")
        _positive(_get(cfg, "system.surface.radius", required=True),
                  "system.surface.radius")

    q0 = np.asarray(_get(cfg, "initial.q", required=True), dtype=float)
    if q0.size != n:
        raise ConfigError(f"'initial.q' must have length {n}, got {q0.size}")
    v_raw = _get(cfg, "initial.v")
    p_raw = _get(cfg, "initial.p")
    if (v_raw is None) == (p_raw is None):
        raise ConfigError("exactly one of 'initial.v' or 'initial.p' is required")
    v0 = None if v_raw is None else np.asarray(v_raw, dtype=float)
    p0 = None if p_raw is None else np.asarray(p_raw, dtype=float)
    given = v0 if v0 is not None else p0
    if given.size != n:
        raise ConfigError(f"initial velocity/momentum must have length {n}")
    z0 = float(_get(cfg, "initial.z", 0.0))

    t_final = _positive(_get(cfg, "run.t_final", required=True), "run.t_final")
    formulation = formulation_override or _get(cfg, "run.formulation", "lagrangian")
    if formulation not in ("lagrangian", "hamiltonian"):
        raise ConfigError(
            f"'run.formulation' must be lagrangian or hamiltonian, got {formulation!r}")
    if p_raw is not None and formulation != "hamiltonian":
        raise ConfigError("'initial.p' requires the hamiltonian formulation")
    max_events = int(_get(cfg, "run.max_events", 10 ** 6))
    if _get(cfg, "run.deterministic", True) is not True:
        raise ConfigError("'run.deterministic' cannot be disabled; runs are seed-free")

    try:
        stepper = StepperConfig(
            rtol=float(_get(cfg, "stepper.rtol", 1e-10)),
            atol=float(_get(cfg, "stepper.atol", 1e-10)),
            h_init=float(_get(cfg, "stepper.h_init", 1e-3)),
            h_max=float(_get(cfg, "stepper.h_max", 1.0)),
            max_steps=int(_get(cfg, "stepper.max_steps", 10 ** 6)),
        )
        events = EventConfig(
            t_tol=float(_get(cfg, "events.t_tol", 1e-12)),
            h_tol=float(_get(cfg, "events.h_tol", 1e-12)),
            grazing_threshold=float(_get(cfg, "events.grazing_threshold", 1e-9)),
        )
    except ValueError as e:
        raise ConfigError(str(e))

    samples = int(samples_override if samples_override is not None
                  else _get(cfg, "output.samples", 1000))
    if samples < 2:
        raise ConfigError(f"'output.samples' must be >= 2, got {samples}")
    svg = bool(svg_override if svg_override is not None
               else _get(cfg, "output.svg", True))
    return RunConfig(system=cfg["system"], q0=q0, v0=v0, p0=p0, z0=z0,
                     t_final=t_final, formulation=formulation,
                     max_events=max_events, stepper=stepper, events=events,
                     samples=samples, svg=svg, raw=cfg)


def build_system(rc: RunConfig):
    """Returns (HybridSystem in the requested formulation, Lagrangian spec,
    boundary description for plotting)."""
    kind = rc.system["kind"]
    gamma = float(rc.system.get("gamma", 0.0))
    if kind == "circle":
        r = float(rc.system.get("radius", 1.0))
        spec = BilliardSpec(boundary=Circle(r), gamma=gamma,
                            mass=float(rc.system.get("mass", 1.0)))
        hs = make_circular_billiard(spec)
        boundary = ("circle", r)
    elif kind == "ellipse":
        spec = BilliardSpec(boundary=Ellipse(float(rc.system["a"]),
                                             float(rc.system["b"])),
                            gamma=gamma, mass=float(rc.system.get("mass", 1.0)))
        hs = make_elliptical_billiard(spec)
        boundary = ("ellipse", spec.boundary.a, spec.boundary.b)
    else:
        n = int(rc.system["n"])
        M = np.asarray(rc.system["mass_matrix"], dtype=float)
        r = float(rc.system["surface"]["radius"])
        lag = natural_lagrangian_system(n=n, mass=M, gamma=gamma)
        surface = SwitchingSurface(
            h=lambda q: r * r - float(q @ q),
            grad_h=lambda q: -2.0 * q,
        )
        hs = HybridSystem(dynamics=lag, surface=surface, resolver="natural")
        boundary = ("circle", r) if n == 2 else None

    lag_spec: SystemSpec = hs.dynamics
    if rc.formulation == "hamiltonian":
        hspec = hamiltonian_from_lagrangian(lag_spec)
        hs = HybridSystem(dynamics=hspec, surface=hs.surface, resolver="hamiltonian")
    return hs, lag_spec, boundary


def initial_state(rc: RunConfig, hs: HybridSystem, lag_spec: SystemSpec):
    if rc.formulation == "lagrangian":
        return ContactStateL(q=rc.q0, qdot=rc.v0, z=rc.z0, t=0.0)
    if rc.p0 is not None:
        return ContactStateH(q=rc.q0, p=rc.p0, z=rc.z0, t=0.0)
    return legendre_forward(lag_spec, ContactStateL(q=rc.q0, qdot=rc.v0, z=rc.z0, t=0.0))


def _mass_scalar(rc: RunConfig) -> float:
    return float(rc.system.get("mass", 1.0))


def _hamiltonian_ell(hsys, s: ContactStateH) -> float:
    """x vy - y vx with the velocity recovered as Minv p."""
    v = hsys.minv(s.q) @ s.p
    return float(s.q[0] * v[1] - s.q[1] * v[0])


def _table_columns(rc: RunConfig, hs: HybridSystem, lag_spec, table):
    """Energy and angular-quantity columns for the sample table."""
    n = hs.n
    energies = np.empty(table.times.size)
    ells = np.zeros(table.times.size)
    for k in range(table.times.size):
        y = table.states[k]
        t = float(table.times[k])
        if rc.formulation == "lagrangian":
            s = ContactStateL.from_vector(y, n, t)
            energies[k] = lagrangian_energy(lag_spec, s)
            if n == 2:
                ells[k] = angular_momentum(s)
        else:
            s = ContactStateH.from_vector(y, n, t)
            energies[k] = hs.dynamics.value(s.q, s.p, s.z)
            if n == 2:
                ells[k] = _hamiltonian_ell(hs.dynamics, s)
    return energies, ells


def _ell_evaluator(rc: RunConfig, hs: HybridSystem):
    if rc.formulation == "lagrangian":
        return angular_momentum
    return lambda s: _hamiltonian_ell(hs.dynamics, s)


def run_simulation(cfg: dict, out_dir: str, samples_override=None,
                   svg_override=None, formulation_override=None) -> dict:
    """Full simulate pipeline; returns the summary dict (also written to disk)."""
    rc = parse_config(cfg, samples_override, svg_override, formulation_override)
    hs, lag_spec, boundary = build_system(rc)
    if hs.surface.value(rc.q0) <= 0.0:
        raise ConfigError("'initial.q' must be strictly interior to the boundary")
    s0 = initial_state(rc, hs, lag_spec)
    traj = simulate(hs, s0, rc.t_final, rc.stepper, rc.events, rc.max_events)
    if not traj.segments:
        os.makedirs(out_dir, exist_ok=True)
        summary = {"status": traj.status, "formulation": rc.formulation,
                   "n_events": len(traj.events), "checks": [], "config": rc.raw}
        write_summary_json(os.path.join(out_dir, "summary.json"), summary)
        return summary

    t_grid = np.linspace(traj.t0, traj.t_end, rc.samples)
    times = np.unique(np.concatenate([t_grid, [e.t for e in traj.events]]))
    table = traj.sample(times)
    energies, ells = _table_columns(rc, hs, lag_spec, table)

    os.makedirs(out_dir, exist_ok=True)
    csv_path = os.path.join(out_dir, "trajectory.csv")
    write_trajectory_csv(csv_path, table.times, table.states, table.flags,
                         energies, ells, hs.n)

    checks = [check_energy_decay(traj, hs.dynamics, FLOW_TOL)]
    if rc.system["kind"] == "circle" and hs.n == 2:
        checks.append(check_dissipated_quantity(
            traj, _ell_evaluator(rc, hs), hs.dynamics, FLOW_TOL,
            name="angular_quantity_decay"))
    worst_impact = CheckReport(name="impact_conditions", max_violation=0.0,
                               tolerance=IMPACT_TOL)
    for event in traj.events:
        rep = check_impact_conditions(event, hs.dynamics, hs.surface, IMPACT_TOL)
        if rep.max_violation > worst_impact.max_violation:
            worst_impact = rep
    checks.append(worst_impact)
    h_vals = np.array([hs.surface.value(table.states[k][:hs.n])
                       for k in range(table.times.size)])
    checks.append(CheckReport(name="containment",
                              max_violation=float(max(0.0, -np.min(h_vals))),
                              tolerance=CONTAINMENT_TOL,
                              location=float(table.times[int(np.argmin(h_vals))])))

    E0 = float(energies[0])
    fit_rate = None
    if np.all(energies > 0.0) and traj.t_end > traj.t0:
        slope = np.polyfit(table.times, np.log(energies), 1)[0]
        fit_rate = float(slope)
    summary = {
        "status": traj.status,
        "formulation": rc.formulation,
        "t0": traj.t0,
        "t_end": traj.t_end,
        "n_events": len(traj.events),
        "energy": {
            "initial": E0,
            "final": float(energies[-1]),
            "fitted_decay_rate": fit_rate,
            "expected_decay_rate": -float(rc.system.get("gamma", 0.0)),
        },
        "events": [
            {
                "t": e.t,
                "q": [float(v) for v in e.q],
                "v_minus": [float(v) for v in _jump_block(e.state_minus)],
                "v_plus": [float(v) for v in _jump_block(e.state_plus)],
                "lambda": e.lam,
                "residual_tangential": e.residual_tangential,
                "residual_energy": e.residual_energy,
            }
            for e in traj.events
        ],
        "checks": [c.to_dict() for c in checks],
        "config": rc.raw,
        "artifacts": {"trajectory_csv": os.path.basename(csv_path)},
    }
    if rc.svg:
        svg_path = os.path.join(out_dir, "trajectory.svg")
        flow = table.states[:, :2] if hs.n >= 2 else np.column_stack(
            [table.times, table.states[:, 0]])
        write_svg(svg_path, boundary if hs.n >= 2 else None, flow)
        summary["artifacts"]["trajectory_svg"] = os.path.basename(svg_path)
    write_summary_json(os.path.join(out_dir, "summary.json"), summary)
    return summary


def _jump_block(state):
    return state.qdot if isinstance(state, ContactStateL) else state.p


def _summary_exit_code(summary: dict) -> int:
    ok = summary["status"] == COMPLETED and all(
        c["passed"] for c in summary["checks"])
    return 0 if ok else 2


def cmd_simulate(args) -> int:
    cfg = load_config(args.config)
    summary = run_simulation(cfg, args.out, args.samples, args.svg,
                             args.formulation)
    print(f"status: {summary['status']}  events: {summary['n_events']}")
    for c in summary["checks"]:
        mark = "pass" if c["passed"] else "FAIL"
        print(f"  [{mark}] {c['name']}: max violation {c['max_violation']:.3e} "
              f"(tol {c['tolerance']:.1e})")
    return _summary_exit_code(summary)


def cmd_impact_test(args) -> int:
    q = np.array(args.point, dtype=float)
    v = np.array(args.velocity, dtype=float)
    gamma = args.gamma
    mass = args.mass
    if args.geometry == "circle":
        spec = BilliardSpec(boundary=Circle(args.radius), gamma=gamma, mass=mass)
        hs = make_circular_billiard(spec)
        if args.radius != 1.0:
            oracle = None
        else:
            oracle = circular_impact_closed_form(q[0], q[1], v[0], v[1])
    else:
        spec = BilliardSpec(boundary=Ellipse(args.a, args.b), gamma=gamma, mass=mass)
        hs = make_elliptical_billiard(spec)
        oracle = elliptical_impact_closed_form(args.a, args.b, q[0], q[1], v[0], v[1])

    s_minus = ContactStateL(q=q, qdot=v, z=0.0, t=0.0)
    try:
        result = resolve_impact_natural(hs.dynamics, s_minus, hs.surface)
    except GrazingContact as e:
        print(f"grazing contact: {e}")
        return 2
    v_plus = result.state_plus.qdot
    print(f"pre-impact velocity:  ({format_float(v[0])}, {format_float(v[1])})")
    print(f"solver post-impact:   ({format_float(v_plus[0])}, {format_float(v_plus[1])})")
    if oracle is not None:
        print(f"closed-form oracle:   ({format_float(oracle[0])}, {format_float(oracle[1])})")
        diff = max(abs(v_plus[0] - oracle[0]), abs(v_plus[1] - oracle[1]))
        print(f"max difference:       {diff:.3e}")
    print(f"impulse multiplier:   {format_float(result.lam)}")
    print(f"residuals (tan, en):  {result.residual_tangential:.3e}, "
          f"{result.residual_energy:.3e}")
    return 0


def cmd_check(args) -> int:
    cfg = load_config(args.config)
    rc = parse_config(cfg)
    data = read_trajectory_csv(args.csv)
    if data["n"] != (2 if rc.system["kind"] in ("circle", "ellipse")
                     else int(rc.system["n"])):
        raise ConfigError(
            f"CSV dimension n={data['n']} does not match the config system")
    hs, lag_spec, _ = build_system(rc)
    n = data["n"]
    mass = _mass_scalar(rc)
    gamma = float(rc.system.get("gamma", 0.0))

    reports = []
    # per-row energy / angular-quantity consistency against the state columns
    column_tol = 1e-12
    bad_row = None   # first offending 1-based file row, header included
    worst = 0.0
    for k in range(data["t"].size):
        if rc.formulation == "lagrangian":
            s = ContactStateL(q=data["q"][k], qdot=data["v"][k], z=data["z"][k],
                              t=data["t"][k])
            e = lagrangian_energy(lag_spec, s)
            ell = angular_momentum(s) if n == 2 else 0.0
        else:
            s = ContactStateH(q=data["q"][k], p=data["v"][k], z=data["z"][k],
                              t=data["t"][k])
            e = hs.dynamics.value(s.q, s.p, s.z)
            ell = _hamiltonian_ell(hs.dynamics, s) if n == 2 else 0.0
        err = max(abs(e - data["E"][k]), abs(ell - data["ell"][k])) / max(1.0, abs(e))
        worst = max(worst, err)
        if err > column_tol and bad_row is None:
            bad_row = k + 2
    reports.append(CheckReport(name="column_consistency", max_violation=worst,
                               tolerance=column_tol,
                               location=None if bad_row is None else float(bad_row)))

    # energy decay law against E0 e^(-gamma t) on the stored samples
    E0 = float(data["E"][0])
    ref = E0 * np.exp(-gamma * (data["t"] - data["t"][0]))
    viol = np.abs(data["E"] - ref) / max(1.0, abs(E0))
    reports.append(CheckReport(name="energy_decay", max_violation=float(np.max(viol)),
                               tolerance=FLOW_TOL,
                               location=float(data["t"][int(np.argmax(viol))])))
    if rc.system["kind"] == "circle" and n == 2:
        l0 = float(data["ell"][0])
        ref = l0 * np.exp(-gamma * (data["t"] - data["t"][0]))
        denom = abs(l0) if l0 != 0.0 else 1.0
        viol = np.abs(data["ell"] - ref) / denom
        reports.append(CheckReport(name="angular_quantity_decay",
                                   max_violation=float(np.max(viol)),
                                   tolerance=FLOW_TOL,
                                   location=float(data["t"][int(np.argmax(viol))])))

    # impact conditions at stored pre/post pairs
    worst_imp = 0.0
    worst_t = None
    pre_rows = np.where(data["flag"] == 1)[0]
    for i in pre_rows:
        if i + 1 >= data["t"].size or data["flag"][i + 1] != 2:
            raise ValueError(f"{args.csv}: pre-impact row {i + 2} has no post-impact row")
        g = hs.surface.gradient(data["q"][i])
        T = tangent_basis(g)
        p_minus = mass * data["v"][i] if rc.formulation == "lagrangian" else data["v"][i]
        p_plus = mass * data["v"][i + 1] if rc.formulation == "lagrangian" else data["v"][i + 1]
        r_tan = (float(np.max(np.abs((p_plus - p_minus) @ T))) /
                 max(1.0, float(np.max(np.abs(p_minus))))) if T.shape[1] else 0.0
        r_en = abs(data["E"][i + 1] - data["E"][i]) / max(1.0, abs(data["E"][i]))
        v = max(r_tan, r_en)
        if v > worst_imp:
            worst_imp, worst_t = v, float(data["t"][i])
    reports.append(CheckReport(name="impact_conditions", max_violation=worst_imp,
                               tolerance=IMPACT_TOL, location=worst_t))

    h_vals = np.array([hs.surface.value(data["q"][k]) for k in range(data["t"].size)])
    reports.append(CheckReport(name="containment",
                               max_violation=float(max(0.0, -np.min(h_vals))),
                               tolerance=CONTAINMENT_TOL,
                               location=float(data["t"][int(np.argmin(h_vals))])))

    out = {"csv": args.csv, "checks": [r.to_dict() for r in reports]}
    text = json.dumps(out, indent=2, sort_keys=True)
    print(text)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    return 0 if all(r.passed for r in reports) else 2


def _sweep_worker(packed):
    index, cfg, out_dir = packed
    summary = run_simulation(cfg, out_dir)
    return index, summary


def cmd_sweep(args) -> int:
    cfg = load_config(args.config)
    sweep = cfg.get("sweep")
    if not isinstance(sweep, dict) or "path" not in sweep or "values" not in sweep:
        raise ConfigError("sweep config needs a 'sweep' section with 'path' and 'values'")
    path = sweep["path"]
    values = sweep["values"]
    if not isinstance(values, list) or not values:
        raise ConfigError("'sweep.values' must be a non-empty list")

    jobs = []
    for i, val in enumerate(values):
        run_cfg = copy.deepcopy(cfg)
        run_cfg.pop("sweep", None)
        node = run_cfg
        parts = path.split(".")
        for part in parts[:-1]:
            if part not in node or not isinstance(node[part], dict):
                raise ConfigError(f"'sweep.path' does not resolve: {path}")
            node = node[part]
        if parts[-1] not in node:
            raise ConfigError(f"'sweep.path' does not resolve: {path}")
        node[parts[-1]] = val
        jobs.append((i, run_cfg, os.path.join(args.out, f"run_{i:03d}")))

    results = [None] * len(jobs)
    if args.workers > 1:
        with ProcessPoolExecutor(max_workers=args.workers) as pool:
            for index, summary in pool.map(_sweep_worker, jobs):
                results[index] = summary
    else:
        for job in jobs:
            index, summary = _sweep_worker(job)
            results[index] = summary

    merged = {
        "sweep_path": path,
        "runs": [
            {
                "value": values[i],
                "out_dir": f"run_{i:03d}",
                "status": results[i]["status"],
                "n_events": results[i]["n_events"],
                "all_checks_passed": all(c["passed"] for c in results[i]["checks"]),
            }
            for i in range(len(values))
        ],
    }
    os.makedirs(args.out, exist_ok=True)
    write_summary_json(os.path.join(args.out, "sweep_summary.json"), merged)
    ok = all(r["status"] == COMPLETED and r["all_checks_passed"]
             for r in merged["runs"])
    print(f"sweep over {path}: {len(values)} runs, "
          f"{'all passed' if ok else 'FAILURES present'}")
    return 0 if ok else 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="contactsim",
        description="Dissipative billiard and hybrid contact-system simulator.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_sim = sub.add_parser("simulate", help="run a configured simulation")
    p_sim.add_argument("--config", required=True, help="JSON run configuration")
    p_sim.add_argument("--out", default="out", help="output directory")
    p_sim.add_argument("--samples", type=int, default=None)
    p_sim.add_argument("--svg", action=argparse.BooleanOptionalAction, default=None)
    p_sim.add_argument("--formulation", choices=["lagrangian", "hamiltonian"],
                       default=None)
    p_sim.set_defaults(func=cmd_simulate)

    p_imp = sub.add_parser("impact-test", help="resolve one impact and compare "
                                               "against the closed-form map")
    p_imp.add_argument("geometry", choices=["circle", "ellipse"])
    p_imp.add_argument("--radius", type=float, default=1.0)
    p_imp.add_argument("--a", type=float, default=1.0)
    p_imp.add_argument("--b", type=float, default=1.0)
    p_imp.add_argument("--point", type=float, nargs=2, required=True)
    p_imp.add_argument("--velocity", type=float, nargs=2, required=True)
    p_imp.add_argument("--gamma", type=float, default=0.0)
    p_imp.add_argument("--mass", type=float, default=1.0)
    p_imp.set_defaults(func=cmd_impact_test)

    p_chk = sub.add_parser("check", help="re-run invariant checks on a stored CSV")
    p_chk.add_argument("--csv", required=True)
    p_chk.add_argument("--config", required=True)
    p_chk.add_argument("--out", default=None, help="also write the JSON report here")
    p_chk.set_defaults(func=cmd_check)

    p_swp = sub.add_parser("sweep", help="fan out simulations over a parameter list")
    p_swp.add_argument("--config", required=True)
    p_swp.add_argument("--out", required=True)
    p_swp.add_argument("--workers", type=int, default=1)
    p_swp.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as e:
        print(f"config error: {e}", file=_sys.stderr)
        return 1
    except (ContactSimError, ValueError, OSError) as e:
        print(f"error: {e}", file=_sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
