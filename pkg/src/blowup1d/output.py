"""Run orchestration and on-disk artifacts: CSV, manifest, checkpoints.

All output is deterministic: fixed column order, values printed with 15
significant digits, JSON with sorted keys.  Identical configs therefore
produce byte-identical files.
"""
from __future__ import annotations

import json
import os

import numpy as np

from . import diagnostics, evolve, fields, grids
from .config import RunConfig
from .errors import ConfigError
from .fields import FieldState, LogState

_FMT = "%.15e"


def write_csv(path: str, columns: tuple, rows: list) -> None:
    """RFC-4180-style CSV: header row, then one formatted row per record."""
    with open(path, "w", newline="") as fh:
        fh.write(",".join(columns) + "\n")
        for row in rows:
            fh.write(",".join(_FMT % float(row[c]) for c in columns) + "\n")


def read_csv(path: str) -> dict:
    """Read a written CSV back into {column: array}."""
    with open(path) as fh:
        header = fh.readline().strip().split(",")
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return {c: data[:, k] for k, c in enumerate(header)}


def write_meta(path: str, meta: dict) -> None:
    with open(path, "w") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True, default=str)
        fh.write("\n")


def write_snapshot(path: str, state, model) -> None:
    """Instantaneous profile CSV: x, omega, theta, u (or the log variables)."""
    if isinstance(state, FieldState):
        vel = evolve.velocity_for(model, state)
        cols = ("x", "omega", "theta", "u")
        arrays = (state.grid.nodes, state.omega, state.theta, vel.u)
    else:
        from . import biotsavart

        kernel = "HL" if model.model == "HL" else "CKY"
        U = biotsavart.velocity_log_convolution(state.Omega, state.grid, kernel)
        cols = ("xi", "Omega", "Theta", "rho", "U")
        arrays = (state.grid.nodes, state.Omega, state.Theta, state.rho, U)
    rows = [dict(zip(cols, vals)) for vals in zip(*arrays)]
    write_csv(path, cols, rows)


def save_checkpoint(path: str, state, records: list, model) -> None:
    """State plus accumulated records; enough to continue the run exactly."""
    meta = {"records": records, "model": model.model, "t": state.t}
    if isinstance(state, FieldState):
        np.savez(
            path,
            kind="periodic",
            t=state.t,
            omega=state.omega,
            theta=state.theta,
            L=state.grid.L,
            N=state.grid.N,
            records_json=json.dumps(meta["records"]),
        )
    else:
        np.savez(
            path,
            kind="log-line",
            t=state.t,
            Omega=state.Omega,
            Theta=state.Theta,
            rho=state.rho,
            mass=state.mass,
            xi_min=state.grid.xi_min,
            xi_max=state.grid.xi_max,
            M=state.grid.M,
            records_json=json.dumps(meta["records"]),
        )


def load_checkpoint(path: str):
    """Returns (state, records) from a checkpoint file."""
    with np.load(path) as z:
        records = json.loads(str(z["records_json"]))
        if str(z["kind"]) == "periodic":
            grid = grids.make_periodic_grid(float(z["L"]), int(z["N"]))
            state = FieldState(
                t=float(z["t"]), omega=z["omega"], theta=z["theta"], grid=grid
            )
        else:
            grid = grids.make_log_grid(float(z["xi_min"]), float(z["xi_max"]), int(z["M"]))
            state = LogState(
                t=float(z["t"]),
                Omega=z["Omega"],
                Theta=z["Theta"],
                rho=z["rho"],
                grid=grid,
                mass=float(z["mass"]),
            )
    return state, records


def _initial_state(cfg: RunConfig, grid):
    if cfg.model.domain == "periodic":
        return fields.preset_initial_data(cfg.preset, grid, cfg.preset_params)
    return fields.preset_log_initial_data(cfg.preset, grid, cfg.preset_params)


def run_simulation(
    cfg: RunConfig,
    out_dir: str | None = None,
    resolution: int | None = None,
    resume: bool = False,
    max_steps: int | None = None,
) -> dict:
    """Execute one configured run and write all artifacts into out_dir.

    Writes timeseries.csv, meta.json, periodic checkpoints, and (if
    snapshot_every > 0) snapshots/NNNN.csv.  With resume=True an existing
    checkpoint in out_dir continues instead of restarting from t = 0.
    Returns a summary dict (termination, t_final, paths).
    """
    out = out_dir or cfg.out_dir
    os.makedirs(out, exist_ok=True)
    snap_dir = os.path.join(out, "snapshots")
    ckpt_path = os.path.join(out, "checkpoint.npz")

    if resolution is not None:
        gp = dict(cfg.grid_params)
        gp["N" if cfg.model.domain == "periodic" else "M"] = int(resolution)
        from dataclasses import replace

        cfg = replace(cfg, grid_params=gp)

    grid = cfg.make_grid()
    model = cfg.model
    periodic = model.domain == "periodic"
    resume_records = None
    if resume:
        if not os.path.exists(ckpt_path):
            raise ConfigError(f"no checkpoint to resume from in {out}")
        state0, resume_records = load_checkpoint(ckpt_path)
    else:
        state0 = _initial_state(cfg, grid)

    base_recorder = (
        diagnostics.make_periodic_recorder(model)
        if periodic
        else diagnostics.make_log_recorder(model)
    )
    snap_count = [0]

    def recorder(state, ctx):
        rec = base_recorder(state, ctx)
        k = len(ctx["records"]) + 1
        if cfg.checkpoint_every > 0 and k % cfg.checkpoint_every == 0:
            save_checkpoint(ckpt_path, state, ctx["records"] + [rec], model)
        if cfg.snapshot_every > 0 and (k - 1) % cfg.snapshot_every == 0:
            os.makedirs(snap_dir, exist_ok=True)
            write_snapshot(
                os.path.join(snap_dir, f"{snap_count[0]:04d}.csv"), state, model
            )
            snap_count[0] += 1
        return rec

    traj = evolve.run(
        model,
        state0,
        cfg.control,
        cfg.t_end,
        record_every=cfg.record_every,
        diagnostics_fn=recorder,
        resume_records=resume_records,
        max_steps=max_steps if max_steps is not None else 10_000_000,
    )

    if periodic:
        c0 = 2.0 / grid.L**2
        diagnostics.finalize_margins(traj.records, c0)
        columns = diagnostics.CSV_COLUMNS
    else:
        diagnostics.finalize_log_margins(traj.records)
        columns = diagnostics.LOG_CSV_COLUMNS

    ts_path = os.path.join(out, "timeseries.csv")
    write_csv(ts_path, columns, traj.records)
    meta = {
        "model": model.model,
        "domain": model.domain,
        "biot_savart_method": model.biot_savart_method,
        "grid": cfg.grid_params,
        "preset": cfg.preset,
        "preset_params": cfg.preset_params,
        "t_end": cfg.t_end,
        "record_every": cfg.record_every,
        "seed": cfg.seed,
        "termination": traj.termination,
        "t_final": traj.t_final,
        "steps": traj.steps,
        "columns": list(columns),
    }
    write_meta(os.path.join(out, "meta.json"), meta)
    # final checkpoint so a finished run can still be inspected or extended
    if traj.states:
        save_checkpoint(ckpt_path, traj.states[-1], traj.records, model)
    return {
        "termination": traj.termination,
        "t_final": traj.t_final,
        "steps": traj.steps,
        "timeseries": ts_path,
        "out_dir": out,
        "records": traj.records,
    }
