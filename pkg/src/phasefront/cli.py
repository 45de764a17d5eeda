"""Command-line entry point.

Subcommands:
  simulate   run the front tracker from a config file; writes
             snapshots.csv, events.csv, functionals.csv, params.json,
             pressure_curves.csv into the output directory
  riemann    solve a single Riemann problem and print the fan
  damping    tabulate the damping coefficient curve as CSV
  verify     run the inequality certificates and the variation-measure
             property suite; writes a JSON report and threshold.csv

Exit codes: 0 ok, 2 infeasible hypotheses (without --force), 3 audit
failure, 4 certificate failure.

Config files use INI sections; see the bundled fixtures for examples.
All numeric output is printed with 17 significant digits, and a fixed
seed makes every output byte-identical across runs.
"""

from __future__ import annotations

import argparse
import configparser
import io
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import analysis, output, riemann
from .fronttracker import (
    InfeasibleDataError,
    PiecewiseProfile,
    SchemeAuditError,
    prepare_simulation,
    profile_nishida,
    profile_phase_jump,
    profile_random_bv,
    profile_riemann,
    profile_two_shock,
)
from .functionals import tv, wtv
from .model import PressureModel, State

EXIT_OK = 0
EXIT_INFEASIBLE = 2
EXIT_AUDIT = 3
EXIT_CERTIFICATE = 4

OVERRIDE_KEYS = ("eta", "rho", "xi", "K", "K_np", "s_hat")


@dataclass
class RunConfig:
    k0: float = 1.0
    k1: float = 4.0
    kind: str = "phase_jump"
    left: tuple = (1.0, 0.0, 0.3)
    right: tuple = (1.2, -0.4, 0.5)
    x: float = 0.0
    breaks: tuple = ()
    states: tuple = ()
    bv_seed: int = 1
    n_jumps: int = 6
    m: float = 1.5
    nu: int = 2
    t_end: float = 4.0
    snapshots: tuple = ()
    seed: int = 0
    overrides: dict = field(default_factory=dict)
    out_dir: str = "out"
    force: bool = False

    def pressure_model(self):
        return PressureModel(self.k0, self.k1)

    def profile(self, pm):
        if self.kind == "riemann":
            return profile_riemann(State(*self.left), State(*self.right), x=self.x)
        if self.kind == "phase_jump":
            return profile_phase_jump(pm)
        if self.kind == "two_shock":
            return profile_two_shock(pm)
        if self.kind == "nishida":
            return profile_nishida()
        if self.kind == "random_bv":
            return profile_random_bv(self.bv_seed, pm, m=self.m, n_jumps=self.n_jumps)
        if self.kind == "segments":
            return PiecewiseProfile(self.breaks, tuple(State(*s) for s in self.states))
        raise ValueError(f"unknown initial-data kind: {self.kind}")


def _parse_state_list(text):
    out = []
    for chunk in text.split("|"):
        chunk = chunk.strip()
        if chunk:
            out.append(tuple(float(x) for x in chunk.split(",")))
    return tuple(out)


def parse_config(text):
    """Read a RunConfig from INI text."""
    cp = configparser.ConfigParser()
    cp.read_string(text)
    cfg = RunConfig()
    if cp.has_section("pressure"):
        cfg.k0 = cp.getfloat("pressure", "k0", fallback=cfg.k0)
        cfg.k1 = cp.getfloat("pressure", "k1", fallback=cfg.k1)
    if cp.has_section("initial"):
        sec = cp["initial"]
        cfg.kind = sec.get("kind", cfg.kind).strip()
        if "left" in sec:
            cfg.left = tuple(float(x) for x in sec["left"].split(","))
        if "right" in sec:
            cfg.right = tuple(float(x) for x in sec["right"].split(","))
        cfg.x = sec.getfloat("x", fallback=cfg.x)
        if "breaks" in sec:
            cfg.breaks = tuple(float(x) for x in sec["breaks"].split())
        if "states" in sec:
            cfg.states = _parse_state_list(sec["states"])
        cfg.bv_seed = sec.getint("bv_seed", fallback=cfg.bv_seed)
        cfg.n_jumps = sec.getint("n_jumps", fallback=cfg.n_jumps)
    if cp.has_section("scheme"):
        sec = cp["scheme"]
        cfg.m = sec.getfloat("m", fallback=cfg.m)
        cfg.nu = sec.getint("nu", fallback=cfg.nu)
        cfg.t_end = sec.getfloat("t_end", fallback=cfg.t_end)
        if "snapshots" in sec:
            cfg.snapshots = tuple(float(x) for x in sec["snapshots"].split())
        cfg.seed = sec.getint("seed", fallback=cfg.seed)
        for key in OVERRIDE_KEYS:
            if key in sec:
                cfg.overrides[key] = sec.getfloat(key)
    if cp.has_section("output"):
        cfg.out_dir = cp["output"].get("dir", cfg.out_dir).strip()
    return cfg


def serialize_config(cfg):
    """Canonical INI text; parse(serialize(parse(t))) == parse(t)."""
    cp = configparser.ConfigParser()
    cp["pressure"] = {"k0": output.fmt(cfg.k0), "k1": output.fmt(cfg.k1)}
    initial = {"kind": cfg.kind}
    if cfg.kind == "riemann":
        initial["left"] = ",".join(output.fmt(x) for x in cfg.left)
        initial["right"] = ",".join(output.fmt(x) for x in cfg.right)
        initial["x"] = output.fmt(cfg.x)
    if cfg.kind == "segments":
        initial["breaks"] = " ".join(output.fmt(x) for x in cfg.breaks)
        initial["states"] = " | ".join(
            ",".join(output.fmt(x) for x in s) for s in cfg.states
        )
    if cfg.kind == "random_bv":
        initial["bv_seed"] = str(cfg.bv_seed)
        initial["n_jumps"] = str(cfg.n_jumps)
    cp["initial"] = initial
    scheme = {
        "m": output.fmt(cfg.m),
        "nu": str(cfg.nu),
        "t_end": output.fmt(cfg.t_end),
        "seed": str(cfg.seed),
    }
    if cfg.snapshots:
        scheme["snapshots"] = " ".join(output.fmt(x) for x in cfg.snapshots)
    for key in OVERRIDE_KEYS:
        if key in cfg.overrides:
            scheme[key] = output.fmt(cfg.overrides[key])
    cp["scheme"] = scheme
    cp["output"] = {"dir": cfg.out_dir}
    buf = io.StringIO()
    cp.write(buf)
    return buf.getvalue()


# ----------------------------------------------------------------------


def cmd_simulate(cfg, stdout=None):
    stdout = stdout if stdout is not None else sys.stdout
    pm = cfg.pressure_model()
    profile = cfg.profile(pm)
    out_dir = Path(cfg.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    ov = cfg.overrides
    try:
        sim = prepare_simulation(
            profile, pm, m=cfg.m, nu=cfg.nu, t_end=cfg.t_end,
            snapshot_times=cfg.snapshots, seed=cfg.seed,
            eta=ov.get("eta"), rho=ov.get("rho"), xi=ov.get("xi"),
            K=ov.get("K"), K_np=ov.get("K_np"), s_hat=ov.get("s_hat"),
            force=cfg.force,
        )
    except InfeasibleDataError as exc:
        print(f"infeasible: {exc}", file=stdout)
        return EXIT_INFEASIBLE
    try:
        traj = sim.run()
    except SchemeAuditError as exc:
        print(f"audit failure: {exc}", file=stdout)
        return EXIT_AUDIT

    output.write_snapshots_csv(out_dir / "snapshots.csv", traj.snapshots)
    output.write_events_csv(
        out_dir / "events.csv", traj.events, initial_fronts=sim.initial_groups
    )
    output.write_functionals_csv(out_dir / "functionals.csv", traj.functional_rows)
    lams = sorted({0.0, 1.0} | {s.lam for s in profile.states})
    output.write_pressure_curves_csv(out_dir / "pressure_curves.csv", pm, lams)
    output.write_json(out_dir / "params.json", _params_payload(cfg, sim))
    print(
        f"simulated to t={cfg.t_end}: {traj.n_interactions} interactions, "
        f"{len(sim.ordered_fronts())} fronts, total NP size {output.fmt(traj.np_total)}",
        file=stdout,
    )
    return EXIT_OK


def _params_payload(cfg, sim):
    p = sim.params
    c = sim.config
    ov = cfg.overrides

    def entry(name, value):
        return {"value": value, "source": "override" if name in ov else "auto"}

    payload = {
        "m": {"value": p.m, "source": "config"},
        "nu": {"value": c.nu, "source": "config"},
        "A_o": {"value": p.A_o, "source": "measured"},
        "d": {"value": p.d, "source": "computed"},
        "c": {"value": p.c, "source": "computed"},
        "k_of_m": {"value": p.k_of_m, "source": "computed"},
        "C_o": {"value": p.C_o, "source": "computed"},
        "mu": {"value": p.mu, "source": "computed"},
        "contraction_interaction": {"value": p.contraction_interaction, "source": "computed"},
        "contraction_twowave": {"value": p.contraction_twowave, "source": "computed"},
        "xi": entry("xi", p.xi),
        "K": entry("K", p.K),
        "K_np": entry("K_np", p.K_np),
        "eta": entry("eta", c.eta),
        "rho": entry("rho", c.rho),
        "s_hat": entry("s_hat", c.s_hat),
        "k_cut": {"value": c.k_cut, "source": "computed"},
        "L0": {"value": sim.L0, "source": "measured"},
        "F0": {"value": sim.F0, "source": "measured"},
        "seed": {"value": c.seed, "source": "config"},
    }
    return payload


def cmd_riemann(args, stdout=None):
    stdout = stdout if stdout is not None else sys.stdout
    pm = PressureModel(args.k0, args.k1)
    left = State(*[float(x) for x in args.left.split(",")])
    right = State(*[float(x) for x in args.right.split(",")])
    fan = riemann.solve(left, right, pm)
    s = fan.strengths
    if s.eps1 == 0.0 and s.eps2 == 0.0 and s.eps3 == 0.0:
        print("no waves", file=stdout)
        return EXIT_OK
    names = {"shock": "shock", "rarefaction": "rarefaction", "contact": "contact"}
    for family, eps, speed, states in (
        (1, s.eps1, fan.speeds[0], (fan.left, fan.mid1)),
        (2, s.eps2, fan.speeds[1], (fan.mid1, fan.mid2)),
        (3, s.eps3, fan.speeds[2], (fan.mid2, fan.right)),
    ):
        if eps == 0.0:
            continue
        kind = names[speed.kind]
        rng = (
            output.fmt(speed.head)
            if speed.head == speed.tail
            else f"{output.fmt(speed.head)} .. {output.fmt(speed.tail)}"
        )
        print(
            f"{family}-{kind}: strength {output.fmt(eps)}, speed {rng}, "
            f"right state (v={output.fmt(states[1].v)}, u={output.fmt(states[1].u)}, "
            f"lam={output.fmt(states[1].lam)})",
            file=stdout,
        )
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            import csv as _csv

            w = _csv.writer(fh)
            w.writerow(["family", "strength", "speed_head", "speed_tail"])
            for family, eps, speed in (
                (1, s.eps1, fan.speeds[0]),
                (2, s.eps2, fan.speeds[1]),
                (3, s.eps3, fan.speeds[2]),
            ):
                if eps != 0.0:
                    w.writerow([
                        family, output.fmt(eps),
                        output.fmt(speed.head), output.fmt(speed.tail),
                    ])
    return EXIT_OK


def cmd_damping(args, stdout=None):
    stdout = stdout if stdout is not None else sys.stdout
    ms = [args.m_max * (i + 1) / args.grid for i in range(args.grid)]
    curve = analysis.damping_curve(ms, grid=args.resolution)
    output.write_damping_csv(args.out, curve)
    print(f"wrote {args.out}: {args.grid} rows up to m={output.fmt(args.m_max)}", file=stdout)
    return EXIT_OK


def _wtv_suite(seed):
    """Property checks for the weighted variation; returns (ok, results)."""
    results = {}
    # Richardson extrapolation of WTV(exp) toward TV(log exp) = 1.
    vals = []
    for k in (6, 7, 8, 9):
        n = 2 ** k
        samples = [math.exp(i / n) for i in range(n + 1)]
        vals.append(wtv(samples))
    extrapolated = vals[-1] + (vals[-1] - vals[-2]) / 3.0
    results["wtv_log_limit_error"] = abs(extrapolated - 1.0)
    ok = results["wtv_log_limit_error"] <= 1e-6

    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(200):
        n = int(rng.integers(2, 12))
        xs = list(rng.uniform(0.1, 10.0, n))
        w = wtv(xs)
        tvlog = tv([math.log(x) for x in xs])
        lo = (min(xs) / max(xs)) * tvlog
        if not lo <= w + 1e-12 or not w <= tvlog + 1e-12:
            worst = max(worst, lo - w, w - tvlog)
            ok = False
    results["wtv_sandwich_violation"] = worst
    # strict gap at a two-valued function
    c, d = 1.0, 3.0
    gap = abs(math.log(c / d)) - 2.0 * abs(c - d) / (c + d)
    results["two_value_gap"] = gap
    ok = ok and gap > 0.0
    return ok, results


def cmd_verify(args, stdout=None):
    stdout = stdout if stdout is not None else sys.stdout
    spec = analysis.CertificateGrid(
        m=args.m, n_samples=args.samples, seed=args.seed, n_z=args.n_z
    )
    report = analysis.verify_appendix_inequalities(spec)
    wtv_ok, wtv_results = _wtv_suite(args.seed)

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    zs = [spec.m * (i + 1) / 200 for i in range(200)]
    output.write_threshold_csv(
        out_dir / "threshold.csv", zs, [analysis.threshold_x0(z) for z in zs]
    )
    payload = {
        "passed": bool(report.passed and wtv_ok),
        "certificates": {
            "passed": report.passed,
            "checks": report.checks,
            "failures": [
                {"check": name, "node": node, "value": value}
                for name, node, value in report.failures
            ],
            "grid_hash": report.grid_hash,
            "tol": report.tol,
        },
        "wtv_suite": {"passed": wtv_ok, "results": wtv_results},
    }
    output.write_json(out_dir / "verify_report.json", payload)
    if payload["passed"]:
        print(f"all certificates passed (grid {report.grid_hash[:12]})", file=stdout)
        return EXIT_OK
    for f in report.failures[:10]:
        print(f"certificate failure: {f[0]} at {f[1]}: {f[2]}", file=stdout)
    if not wtv_ok:
        print(f"variation-measure suite failed: {wtv_results}", file=stdout)
    return EXIT_CERTIFICATE


# ----------------------------------------------------------------------


def build_parser():
    ap = argparse.ArgumentParser(prog="phasefront")
    sub = ap.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run the front-tracking scheme")
    sim.add_argument("--config", required=True, help="INI config path")
    sim.add_argument("--out", default=None, help="output directory override")
    sim.add_argument("--seed", type=int, default=None)
    sim.add_argument("--t-end", type=float, default=None)
    sim.add_argument("--snapshots", default=None, help="comma-separated times")
    sim.add_argument("--force", action="store_true",
                     help="run even when the hypotheses fail")

    rp = sub.add_parser("riemann", help="solve a single Riemann problem")
    rp.add_argument("--left", required=True, help="v,u,lam")
    rp.add_argument("--right", required=True, help="v,u,lam")
    rp.add_argument("--k0", type=float, default=1.0)
    rp.add_argument("--k1", type=float, default=4.0)
    rp.add_argument("--csv", default=None)

    dp = sub.add_parser("damping", help="tabulate the damping coefficient")
    dp.add_argument("--m-max", type=float, default=3.0)
    dp.add_argument("--grid", type=int, default=30, help="number of m samples")
    dp.add_argument("--resolution", type=int, default=201,
                    help="inner maximization grid")
    dp.add_argument("--out", default="damping.csv")

    vf = sub.add_parser("verify", help="run the inequality certificates")
    vf.add_argument("--m", type=float, default=1.5)
    vf.add_argument("--samples", type=int, default=400)
    vf.add_argument("--n-z", dest="n_z", type=int, default=400)
    vf.add_argument("--seed", type=int, default=20240901)
    vf.add_argument("--out", default="verify_out")
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    if args.command == "simulate":
        cfg = parse_config(Path(args.config).read_text())
        if args.out is not None:
            cfg.out_dir = args.out
        if args.seed is not None:
            cfg.seed = args.seed
        if args.t_end is not None:
            cfg.t_end = args.t_end
        if args.snapshots is not None:
            cfg.snapshots = tuple(float(x) for x in args.snapshots.split(","))
        if args.force:
            cfg.force = True
        return cmd_simulate(cfg)
    if args.command == "riemann":
        return cmd_riemann(args)
    if args.command == "damping":
        return cmd_damping(args)
    if args.command == "verify":
        return cmd_verify(args)
    raise AssertionError(args.command)


if __name__ == "__main__":
    sys.exit(main())
