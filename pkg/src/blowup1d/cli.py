"""Command-line entry points.

Subcommands:
  simulate  run one configured simulation, writing CSV/manifest/checkpoints
  verify    numerical certification suites (kernels, quadforms, inequalities)
  bounds    integrate a comparison ODE and emit its envelope
  sweep     run simulate over a parameter grid, one subdirectory per value
  report    render figures from a finished run's timeseries.csv

Exit codes: 0 success, 1 verification failure, 2 usage or config error,
3 runtime numeric failure.
"""
from __future__ import annotations

import argparse
import copy
import os
import sys

import numpy as np

from . import bounds as bounds_mod
from . import config as config_mod
from . import diagnostics, fields, grids, kernels, output
from .errors import Blowup1dError, ConfigError

EXIT_OK = 0
EXIT_VERIFY_FAIL = 1
EXIT_CONFIG = 2
EXIT_NUMERIC = 3


def _cmd_simulate(args) -> int:
    cfg = config_mod.load_config(args.config)
    summary = output.run_simulation(
        cfg, out_dir=args.out, resolution=args.resolution, resume=args.resume
    )
    print(
        f"simulate: {cfg.model.model} terminated '{summary['termination']}' "
        f"at t = {summary['t_final']:.6g} after {summary['steps']} steps"
    )
    print(f"simulate: wrote {summary['timeseries']}")
    if args.report:
        from .report import render_report

        for p in render_report(summary["out_dir"]):
            print(f"simulate: wrote {p}")
    if summary["termination"] == "nan-detected":
        print("simulate: non-finite values encountered; trajectory saved", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


def _print_report_line(name: str, worst: float, loc, passed: bool) -> None:
    status = "PASS" if passed else "FAIL"
    print(f"  [{status}] {name}: worst violation {worst:+.3e} at {loc}")


def _verify_kernels(args) -> bool:
    plan = kernels.SamplingPlan(
        n_deterministic=args.trials if args.trials else 10_000,
        n_random=args.trials if args.trials else 10_000,
        seed=args.seed,
        tolerance=args.tolerance,
    )
    reports = kernels.verify_kernel_properties(plan)
    ok = True
    for r in reports:
        _print_report_line(r.property_id, r.worst_violation, r.worst_location, r.passed)
        ok = ok and r.passed
    return ok


def _verify_quadforms(args) -> bool:
    trials = args.trials or 1000
    rng = np.random.default_rng(args.seed)
    ok = True

    grid = grids.make_periodic_grid(2 * np.pi, 256)
    worst, worst_a = np.inf, None
    for _ in range(trials):
        omega = fields.random_admissible_omega(grid, rng)
        a = rng.uniform(0.0, grid.L / 2)
        norm2 = float(np.sum(omega**2) * grid.dx)
        val = diagnostics.quadform_periodic(omega, a, grid)
        margin = val / max(norm2, 1e-300)
        if margin < worst:
            worst, worst_a = margin, a
    passed = worst >= -1e-6
    _print_report_line(
        f"periodic quadratic form >= 0 ({trials} trials)", min(worst, 0.0), worst_a, passed
    )
    ok = ok and passed

    lgrid = grids.make_log_grid(-6.0, 10.0, 1024)
    worst, worst_xi = np.inf, None
    for _ in range(trials):
        Omega = fields.random_log_bumps(lgrid, rng)
        xi = rng.uniform(lgrid.xi_min, lgrid.xi_max)
        norm2 = float(np.sum(Omega**2) * lgrid.h)
        val = diagnostics.quadform_line(Omega, xi, lgrid)
        margin = val / max(norm2, 1e-300)
        if margin < worst:
            worst, worst_xi = margin, xi
    passed = worst >= -1e-8
    _print_report_line(
        f"line quadratic form >= 0 ({trials} trials)", min(worst, 0.0), worst_xi, passed
    )
    return ok and passed


def _verify_inequalities(args) -> bool:
    ok = True
    res = bounds_mod.h_comparison_solution(1.0, 1.0, horizon=5.0)
    passed = res["residual_max"] <= 1e-8
    _print_report_line("comparison ODE first integral", res["residual_max"], "-", passed)
    ok = ok and passed

    val = bounds_mod.closed_form_bound(1.0, 1.0, 1.0)
    ref = 1.0 + 3.0 * 1.5 ** (-2.0 / 3.0)
    passed = abs(val - ref) <= 1e-12
    _print_report_line("closed-form bound value", abs(val - ref), "alpha=c0=t0=1", passed)
    ok = ok and passed

    rng = np.random.default_rng(args.seed)
    worst = -np.inf
    for _ in range(20):
        I0 = rng.uniform(0.2, 3.0)
        c0 = rng.uniform(0.2, 3.0)
        env = bounds_mod.gengron_envelope(I0, 0.0, c0, horizon=200.0)
        if env["capped"]:
            gap = env["T_star"] - env["T_star_upper"]
            worst = max(worst, gap)
    passed = worst <= 1e-6
    _print_report_line("equality-ODE blow-up time <= closed-form bound", worst, "-", passed)
    ok = ok and passed

    env = bounds_mod.entropy_envelope(1.0, 0.0, horizon=50.0)
    d2 = np.diff(env["I"], 2)
    passed = bool(np.min(d2) >= -1e-10)
    _print_report_line("entropy envelope convex", float(min(np.min(d2), 0.0)), "-", passed)
    return ok and passed


def _cmd_verify(args) -> int:
    suites = ("kernels", "quadforms", "inequalities") if args.suite == "all" else (args.suite,)
    ok = True
    for s in suites:
        print(f"verify: suite '{s}'")
        fn = {"kernels": _verify_kernels, "quadforms": _verify_quadforms,
              "inequalities": _verify_inequalities}[s]
        ok = fn(args) and ok
    print(f"verify: {'all properties hold' if ok else 'FAILURES found'}")
    return EXIT_OK if ok else EXIT_VERIFY_FAIL


def _parse_params(text: str) -> dict:
    params = {}
    for item in text.split(","):
        if not item.strip():
            continue
        if "=" not in item:
            raise ConfigError(f"bad --params entry {item!r}, expected key=value")
        k, v = item.split("=", 1)
        params[k.strip()] = float(v)
    return params


def _cmd_bounds(args) -> int:
    p = _parse_params(args.params)
    horizon = p.pop("horizon", 10.0)
    cap = p.pop("cap", 1e3)
    if args.kind == "gengron":
        env = bounds_mod.gengron_envelope(
            p.pop("I0"), p.pop("J0", 0.0), p.pop("c0"), horizon, cap=cap
        )
        cols, series = ("t", "I_lower"), (env["t"], env["I_lower"])
        print(
            f"bounds gengron: T_star = {env['T_star']:.6g}, "
            f"T_star_upper = {env['T_star_upper']:.6g} (t0 = {env['t0_opt']:.6g})"
        )
    elif args.kind == "entropy":
        env = bounds_mod.entropy_envelope(p.pop("I0"), p.pop("Idot0", 0.0), horizon, cap=cap)
        cols, series = ("t", "I"), (env["t"], env["I"])
        print(f"bounds entropy: T_star = {env['T_star']:.6g}")
    else:
        env = bounds_mod.fg_envelope(p.pop("F0"), p.pop("G0", 0.0), horizon, cap=cap)
        cols, series = ("t", "F", "G"), (env["t"], env["F"], env["G"])
        print(f"bounds fg: T_star = {env['T_star']:.6g}")
    if p:
        raise ConfigError(f"unknown --params keys: {sorted(p)}")
    if args.out:
        rows = [dict(zip(cols, vals)) for vals in zip(*series)]
        output.write_csv(args.out, cols, rows)
        print(f"bounds: wrote {args.out}")
    return EXIT_OK


def _set_nested(tree: dict, dotted: str, value) -> None:
    keys = dotted.split(".")
    node = tree
    for k in keys[:-1]:
        node = node.setdefault(k, {})
    node[keys[-1]] = value


def _coerce(text: str):
    for cast in (int, float):
        try:
            return cast(text)
        except ValueError:
            pass
    return text


def _cmd_sweep(args) -> int:
    if "=" not in args.vary:
        raise ConfigError("--vary expects KEY=a,b,c")
    key, values_text = args.vary.split("=", 1)
    values = [_coerce(v) for v in values_text.split(",") if v.strip()]
    if not values:
        raise ConfigError("--vary got an empty value list")

    with open(args.config, "rb") as fh:
        raw = config_mod.tomllib.load(fh)
    base_out = args.out or raw.get("run", {}).get("out_dir", "sweep")
    os.makedirs(base_out, exist_ok=True)

    index_rows = []
    status = EXIT_OK
    for v in values:
        tree = copy.deepcopy(raw)
        _set_nested(tree, key, v)
        cfg = config_mod.parse_config(tree)
        sub = os.path.join(base_out, f"{key.replace('.', '_')}_{v}")
        summary = output.run_simulation(cfg, out_dir=sub)
        print(f"sweep: {key}={v} -> {summary['termination']} at t={summary['t_final']:.6g}")
        index_rows.append(
            {
                "value": float(v),
                "t_final": summary["t_final"],
                "steps": summary["steps"],
                "nan": 1.0 if summary["termination"] == "nan-detected" else 0.0,
            }
        )
        if summary["termination"] == "nan-detected":
            status = EXIT_NUMERIC
    output.write_csv(
        os.path.join(base_out, "index.csv"), ("value", "t_final", "steps", "nan"), index_rows
    )
    print(f"sweep: wrote {os.path.join(base_out, 'index.csv')}")
    return status


def _cmd_report(args) -> int:
    from .report import render_report

    for p in render_report(args.run):
        print(f"report: wrote {p}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="blowup1d",
        description="Simulation and verification laboratory for 1D boundary-blow-up models.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run one configured simulation")
    p.add_argument("--config", required=True, help="TOML run configuration")
    p.add_argument("--out", default=None, help="output directory (overrides config)")
    p.add_argument("--resolution", type=int, default=None, help="override grid N (or M)")
    p.add_argument("--resume", action="store_true", help="continue from checkpoint in out dir")
    p.add_argument("--report", action="store_true", help="also render figures")
    p.set_defaults(fn=_cmd_simulate)

    p = sub.add_parser("verify", help="run a numerical certification suite")
    p.add_argument(
        "--suite", required=True, choices=("kernels", "quadforms", "inequalities", "all")
    )
    p.add_argument("--trials", type=int, default=None, help="samples/trials per property")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tolerance", type=float, default=1e-10)
    p.set_defaults(fn=_cmd_verify)

    p = sub.add_parser("bounds", help="integrate a comparison ODE envelope")
    p.add_argument("--kind", required=True, choices=("gengron", "entropy", "fg"))
    p.add_argument(
        "--params",
        required=True,
        help="comma-separated key=value (I0, J0, c0, F0, G0, Idot0, horizon, cap)",
    )
    p.add_argument("--out", default=None, help="write envelope CSV here")
    p.set_defaults(fn=_cmd_bounds)

    p = sub.add_parser("sweep", help="run simulate over a parameter grid")
    p.add_argument("--config", required=True)
    p.add_argument("--vary", required=True, help="dotted KEY=a,b,c (e.g. grid.N=512,1024)")
    p.add_argument("--out", default=None, help="sweep root directory")
    p.set_defaults(fn=_cmd_sweep)

    p = sub.add_parser("report", help="render figures for a finished run")
    p.add_argument("--run", required=True, help="run directory containing timeseries.csv")
    p.set_defaults(fn=_cmd_report)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Blowup1dError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except FloatingPointError as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
