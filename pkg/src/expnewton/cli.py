"""Command-line front end.

    expnewton solve --method parametric --format json
    expnewton picard --epsilon 0.2 --check-pairs 20 --seed 0
    expnewton phase --x 1 --theta 1.07 --orientation field
    expnewton resistance --cone 1 1
    expnewton sweep --lambdas 0.1 0.5 0.8

Exit status: 0 on success, 2 on invalid input, 3 when the numerics fail.
Errors are reported as one JSON line on standard error.  Flags override
values from ``--config FILE`` (a JSON object keyed by option name).
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import io as xio
from .errors import ExpNewtonError, NumericalFailure, ValidationError
from .model import series_eval
from .phase import (OrbitConfig, PhaseState, classify_orbit, find_equilibria, integrate_orbit,
                    orbit_summary)
from .picard import PicardConfig, contraction_ratios, picard_solve
from .radial import SolveConfig, solve_from_axis
from .resistance import (ResistanceDomain, cone_profile, nonexistence_demo, resistance_cone,
                         resistance_radial)

COMMANDS = ("solve", "phase", "picard", "resistance", "sweep")

DEFAULTS = {
    "solve": {"method": "parametric", "eps0": 1e-3, "abs_tol": 1e-12, "rel_tol": 1e-10,
              "max_step": 0.05, "event_tol": 1e-10, "guard": 1e-4},
    "picard": {"epsilon": 0.2, "R": None, "quad_nodes": 8, "panels": 64, "max_iter": 100,
               "conv_tol": 1e-12, "override_radius": False, "check_pairs": 0},
    "phase": {"x": None, "theta": None, "y": 0.0, "axis": False, "eps0": 1e-3, "equilibria": False,
              "orientation": "arclength", "reverse": False, "tau_max": 400.0, "rtol": 1e-10,
              "atol": 1e-12, "event_tol": 1e-10, "closure_tol": 1e-4},
    "resistance": {"cone": None, "lambdas": None, "R": 1.0, "profile": None, "inner": None,
                   "outer": None, "threshold": 1e-3},
    "sweep": {"lambdas": None, "start": None, "start_slope": None, "orientation": "field",
              "reverse": False, "tau_max": 400.0, "rtol": 1e-10, "atol": 1e-12, "event_tol": 1e-10,
              "closure_tol": 1e-4, "jobs": 1},
}
COMMON = {"format": "csv", "output": None, "seed": 0}


@dataclass
class RunConfig:
    command: str
    options: dict = field(default_factory=dict)
    output_path: str | None = None
    format: str = "csv"
    seed: int = 0


@dataclass
class Artifact:
    text: str


# --------------------------------------------------------------- commands

def _solve(cfg: RunConfig) -> Artifact:
    o = cfg.options
    sc = SolveConfig(eps0=o["eps0"], abs_tol=o["abs_tol"], rel_tol=o["rel_tol"], max_step=o["max_step"],
                     event_tol=o["event_tol"], method=o["method"], guard=o["guard"]).validate()
    prof = solve_from_axis(sc)
    if cfg.format == "csv":
        return Artifact(xio.profile_csv(prof))
    t = prof.terminal
    results = {"method": sc.method, "r_max": t.r, "u_end": t.u, "slope_end": t.p, "samples": len(prof)}
    return Artifact(xio.summary_json("solve", o, results, prof.diagnostics))


def _picard(cfg: RunConfig) -> Artifact:
    o = cfg.options
    pc = PicardConfig(epsilon=o["epsilon"], R=o["R"], quad_nodes=int(o["quad_nodes"]), panels=int(o["panels"]),
                      max_iter=int(o["max_iter"]), conv_tol=o["conv_tol"],
                      override_radius=bool(o["override_radius"]))
    pc.resolve()
    if int(o["check_pairs"]) < 0:
        raise ValidationError("check_pairs must be nonnegative")
    rep = picard_solve(pc)
    if cfg.format == "csv":
        return Artifact(xio.profile_csv(rep.final))
    results = {"R": rep.radius.R, "m2": rep.radius.m2, "L_finv": rep.radius.L_finv, "L_g": rep.radius.L_g,
               "iterations": rep.iterations, "observed_ratio": rep.observed_ratio,
               "fixed_point_residual": rep.fixed_point_residual,
               "u_R": float(rep.final.u[-1]), "du_R": float(rep.final.p[-1])}
    if int(o["check_pairs"]):
        ratios = contraction_ratios(pc, int(o["check_pairs"]), cfg.seed)
        results["contraction"] = {"pairs": int(o["check_pairs"]), "seed": cfg.seed, "max_ratio": float(ratios.max())}
    return Artifact(xio.summary_json("picard", o, results, {"iterations": rep.iterations, "diffs": rep.diffs}))


def _orbit_config(o) -> OrbitConfig:
    if o["orientation"] not in ("arclength", "field"):
        raise ValidationError(f"orientation must be 'arclength' or 'field', got {o['orientation']!r}")
    for k in ("tau_max", "rtol", "atol", "event_tol", "closure_tol"):
        if not (isinstance(o[k], (int, float)) and o[k] > 0):
            raise ValidationError(f"{k} must be positive")
    return OrbitConfig(rtol=o["rtol"], atol=o["atol"], event_tol=o["event_tol"], tau_max=o["tau_max"],
                       orientation=o["orientation"], closure_tol=o["closure_tol"], reverse=bool(o["reverse"]))


def _phase(cfg: RunConfig) -> Artifact:
    o = cfg.options
    if o["equilibria"]:
        reports = find_equilibria()
        rows = []
        for rep in reports:
            loc = rep.location
            eig = rep.eigenvalues if rep.eigenvalues is not None else [math.nan, math.nan]
            rows.append([rep.kind, loc.x if loc else None, loc.theta if loc else None,
                         float(np.real(eig[0])), float(np.imag(eig[0])), float(np.real(eig[1])),
                         float(np.imag(eig[1])), rep.crossing_slope])
        if cfg.format == "csv":
            return Artifact(xio.to_csv(("kind", "x", "theta", "eig1_re", "eig1_im", "eig2_re", "eig2_im",
                                        "crossing_slope"), rows))
        results = [{"kind": r[0], "x": r[1], "theta": r[2], "eigenvalues": [[r[3], r[4]], [r[5], r[6]]],
                    "crossing_slope": r[7]} for r in rows]
        return Artifact(xio.summary_json("phase", o, results, {}))
    oc = _orbit_config(o)
    if o["axis"]:
        s = series_eval(o["eps0"])
        start = PhaseState(s.r, math.atan(s.p), s.u)
    else:
        if o["x"] is None or o["theta"] is None:
            raise ValidationError("phase needs --x and --theta, --axis, or --equilibria")
        start = PhaseState(float(o["x"]), float(o["theta"]), float(o["y"]))
    orbit = integrate_orbit(start, oc, axis=bool(o["axis"]))
    if cfg.format == "csv":
        return Artifact(xio.orbit_csv(orbit))
    return Artifact(xio.summary_json("phase", o, orbit_summary(orbit), orbit.stats))


def _resistance(cfg: RunConfig) -> Artifact:
    o = cfg.options
    if o["profile"] is not None:
        try:
            prof = xio.read_profile_csv(o["profile"])
        except (OSError, ValueError) as exc:
            raise ValidationError(f"cannot read profile {o['profile']!r}: {exc}") from exc
        inner = prof.r[0] if o["inner"] is None else o["inner"]
        outer = prof.r[-1] if o["outer"] is None else o["outer"]
        res = resistance_radial(prof, ResistanceDomain(float(inner), float(outer)))
        if cfg.format == "csv":
            return Artifact(xio.to_csv(("inner", "outer", "E", "err"), [(inner, outer, res.value, res.error_est)]))
        return Artifact(xio.summary_json("resistance", o, {"E": res.value, "err": res.error_est}, {}))
    if o["cone"] is not None:
        lam, R = map(float, o["cone"])
        res = resistance_radial(cone_profile(lam, R))
        if cfg.format == "csv":
            return Artifact(xio.to_csv(xio.RESISTANCE_HEADER, [(lam, res.value, res.error_est)]))
        results = {"lambda": lam, "R": R, "E": res.value, "err": res.error_est,
                   "closed_form": resistance_cone(lam, R).value}
        return Artifact(xio.summary_json("resistance", o, results, {}))
    if o["lambdas"]:
        tab = nonexistence_demo(float(o["R"]), o["lambdas"], float(o["threshold"]))
        if cfg.format == "csv":
            return Artifact(xio.to_csv(xio.RESISTANCE_HEADER, tab.rows))
        results = {"rows": [{"lambda": a, "E": b, "err": c} for a, b, c in tab.rows],
                   "ratio_last_first": tab.ratio, "tail_decreasing": tab.tail_decreasing,
                   "below_threshold": tab.below_threshold}
        return Artifact(xio.summary_json("resistance", o, results, {}))
    raise ValidationError("resistance needs --cone LAMBDA R, --lambdas ..., or --profile FILE")


SWEEP_HEADER = ("index", "x0", "theta0", "class", "termination", "events", "tau_end", "x_end",
                "theta_end", "y_end", "return_distance", "error")


def _sweep_row(job):
    index, start, oc = job
    try:
        orbit = integrate_orbit(start, oc)
    except ExpNewtonError as exc:
        return [index, start.x, start.theta, "", "", "", None, None, None, None, None,
                f"{type(exc).__name__}: {exc}"]
    t = orbit.terminal
    names = ";".join(e.name for e in orbit.events)
    return [index, start.x, start.theta, classify_orbit(orbit).value, orbit.termination, names,
            float(orbit.tau[-1]), t.x, t.theta, t.y, orbit.return_distance, ""]


def sweep(starts, oc: OrbitConfig = OrbitConfig(orientation="field"), jobs: int = 1) -> list[list]:
    """Integrate and classify one orbit per start; rows keep the input order."""
    starts = [s if isinstance(s, PhaseState) else PhaseState(float(s[0]), math.atan(float(s[1])))
              for s in starts]
    if not starts:
        raise ValidationError("sweep needs at least one start")
    work = [(i, s, oc) for i, s in enumerate(starts)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_sweep_row, work))
    return [_sweep_row(w) for w in work]


def _parse_pair(text, what):
    try:
        a, b = (float(v) for v in str(text).split(","))
    except ValueError as exc:
        raise ValidationError(f"{what} expects 'A,B', got {text!r}") from exc
    return a, b


def _sweep(cfg: RunConfig) -> Artifact:
    o = cfg.options
    oc = _orbit_config(o)
    starts = []
    for lam in o["lambdas"] or []:
        starts.append(PhaseState(1.0, math.pi / 2 - float(lam)))
    for text in o["start"] or []:
        starts.append(PhaseState(*_parse_pair(text, "--start")))
    for text in o["start_slope"] or []:
        r0, p0 = _parse_pair(text, "--start-slope")
        starts.append(PhaseState(r0, math.atan(p0)))
    jobs = int(o["jobs"])
    if jobs < 1:
        raise ValidationError("jobs must be >= 1")
    rows = sweep(starts, oc, jobs)
    if cfg.format == "csv":
        return Artifact(xio.to_csv(SWEEP_HEADER, rows))
    return Artifact(xio.summary_json("sweep", o, [dict(zip(SWEEP_HEADER, r)) for r in rows], {"rows": len(rows)}))


DISPATCH = {"solve": _solve, "picard": _picard, "phase": _phase, "resistance": _resistance, "sweep": _sweep}


def run(cfg: RunConfig) -> int:
    """Dispatch ``cfg``; write the artifact atomically (or to stdout)."""
    if cfg.command not in DISPATCH:
        raise ValidationError(f"unknown command {cfg.command!r}")
    if cfg.format not in ("csv", "json"):
        raise ValidationError(f"format must be csv or json, got {cfg.format!r}")
    art = DISPATCH[cfg.command](cfg)
    if cfg.output_path:
        xio.atomic_write(cfg.output_path, art.text)
    else:
        sys.stdout.write(art.text)
    return 0


# --------------------------------------------------------------- parsing

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="expnewton", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--format", choices=("csv", "json"), default=None)
        p.add_argument("--output", "-o", default=None, help="write here instead of stdout")
        p.add_argument("--config", default=None, help="JSON file with option values")
        p.add_argument("--seed", type=int, default=None)

    p = sub.add_parser("solve", help="axis solution and its maximal domain")
    p.add_argument("--method", choices=("direct", "parametric"), default=None)
    for name in ("eps0", "abs-tol", "rel-tol", "max-step", "event-tol", "guard"):
        p.add_argument(f"--{name}", type=float, default=None)
    common(p)

    p = sub.add_parser("picard", help="fixed-point iteration near the axis")
    for name in ("epsilon", "R", "conv-tol"):
        p.add_argument(f"--{name}", type=float, default=None)
    for name in ("quad-nodes", "panels", "max-iter", "check-pairs"):
        p.add_argument(f"--{name}", type=int, default=None)
    p.add_argument("--override-radius", action="store_const", const=True, default=None)
    common(p)

    def orbit_opts(p):
        p.add_argument("--orientation", choices=("arclength", "field"), default=None)
        p.add_argument("--reverse", action="store_const", const=True, default=None)
        for name in ("tau-max", "rtol", "atol", "event-tol", "closure-tol"):
            p.add_argument(f"--{name}", type=float, default=None)

    p = sub.add_parser("phase", help="integrate and classify one phase-plane orbit")
    for name in ("x", "theta", "y", "eps0"):
        p.add_argument(f"--{name}", type=float, default=None)
    p.add_argument("--axis", action="store_const", const=True, default=None,
                   help="launch from the series start near the axis")
    p.add_argument("--equilibria", action="store_const", const=True, default=None)
    orbit_opts(p)
    common(p)

    p = sub.add_parser("resistance", help="resistance of cones or sampled profiles")
    p.add_argument("--cone", nargs=2, type=float, metavar=("LAMBDA", "R"), default=None)
    p.add_argument("--lambdas", nargs="+", type=float, default=None)
    p.add_argument("--R", type=float, default=None)
    p.add_argument("--profile", default=None, help="profile CSV with header r,u,du")
    for name in ("inner", "outer", "threshold"):
        p.add_argument(f"--{name}", type=float, default=None)
    common(p)

    p = sub.add_parser("sweep", help="classify a batch of orbits")
    p.add_argument("--lambdas", nargs="+", type=float, default=None, help="starts (1, pi/2 - lambda)")
    p.add_argument("--start", action="append", default=None, metavar="X,THETA")
    p.add_argument("--start-slope", action="append", default=None, metavar="R0,P0")
    p.add_argument("--jobs", type=int, default=None)
    orbit_opts(p)
    common(p)
    return ap


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    file_opts = {}
    if ns.config:
        try:
            with open(ns.config) as fh:
                file_opts = json.load(fh)
        except (OSError, ValueError) as exc:
            raise ValidationError(f"cannot read config {ns.config!r}: {exc}") from exc
        if not isinstance(file_opts, dict):
            raise ValidationError("config file must hold a JSON object")
        file_opts = {k.replace("-", "_"): v for k, v in file_opts.items()}
    merged = {}
    for key, default in {**DEFAULTS[ns.command], **COMMON}.items():
        flag = getattr(ns, key, None)
        merged[key] = flag if flag is not None else file_opts.get(key, default)
    unknown = set(file_opts) - set(merged)
    if unknown:
        raise ValidationError(f"unknown config keys: {sorted(unknown)}")
    fmt, out, seed = merged.pop("format"), merged.pop("output"), merged.pop("seed")
    return RunConfig(ns.command, merged, out, fmt, int(seed))


def _report(exc: Exception, code: int) -> int:
    line = {"error": type(exc).__name__, "message": str(exc), "exit_code": code}
    sys.stderr.write(json.dumps(line) + "\n")
    return code


def main(argv=None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    try:
        return run(config_from_args(ns))
    except ValidationError as exc:
        return _report(exc, 2)
    except NumericalFailure as exc:
        return _report(exc, 3)


if __name__ == "__main__":
    sys.exit(main())
