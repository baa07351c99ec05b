"""Run configuration: TOML loading and validation.

A run config is a TOML file with four tables:

    [model]    model, a, domain, biot_savart_method, a_layer
    [grid]     L, N (periodic) or xi_min, xi_max, M (log-line)
    [initial]  preset, plus a nested [initial.params] table
    [control]  cfl, dt_min, dt_max, tail_threshold, undershoot_tolerance,
               dealias, symmetric
    [run]      t_end, record_every, out_dir, seed, checkpoint_every,
               snapshot_every

Missing or misspelled keys raise ConfigError naming the offending key.
"""
from __future__ import annotations

import sys
from dataclasses import dataclass, field

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from . import grids
from .errors import ConfigError
from .evolve import StepControl
from .fields import ModelSpec


@dataclass(frozen=True)
class RunConfig:
    model: ModelSpec
    grid_params: dict
    preset: str
    preset_params: dict
    control: StepControl
    t_end: float
    record_every: int = 1
    out_dir: str = "out"
    seed: int = 0
    checkpoint_every: int = 50
    snapshot_every: int = 0  # 0 disables snapshots

    def make_grid(self):
        if self.model.domain == "periodic":
            return grids.make_periodic_grid(self.grid_params["L"], self.grid_params["N"])
        return grids.make_log_grid(
            self.grid_params["xi_min"], self.grid_params["xi_max"], self.grid_params["M"]
        )


def _take(table: dict, section: str, key: str, required: bool = True, default=None):
    if key not in table:
        if required:
            raise ConfigError(f"missing required key '{section}.{key}'", key=f"{section}.{key}")
        return default
    return table[key]


_KNOWN = {
    "model": {"model", "a", "domain", "biot_savart_method", "a_layer"},
    "grid": {"L", "N", "xi_min", "xi_max", "M"},
    "initial": {"preset", "params"},
    "control": {
        "cfl",
        "dt_min",
        "dt_max",
        "tail_threshold",
        "undershoot_tolerance",
        "dealias",
        "symmetric",
    },
    "run": {"t_end", "record_every", "out_dir", "seed", "checkpoint_every", "snapshot_every"},
}


def parse_config(raw: dict) -> RunConfig:
    """Validate a parsed TOML tree into a RunConfig."""
    for section in ("model", "grid", "initial", "run"):
        if section not in raw:
            raise ConfigError(f"missing required table [{section}]", key=section)
    for section, keys in _KNOWN.items():
        extra = set(raw.get(section, {})) - keys
        if extra:
            k = sorted(extra)[0]
            raise ConfigError(f"unknown key '{section}.{k}'", key=f"{section}.{k}")

    mt = raw["model"]
    try:
        model = ModelSpec(
            model=_take(mt, "model", "model"),
            a=float(_take(mt, "model", "a", required=False, default=1.0)),
            domain=_take(mt, "model", "domain", required=False, default="periodic"),
            biot_savart_method=_take(
                mt, "model", "biot_savart_method", required=False, default="spectral"
            ),
            a_layer=float(_take(mt, "model", "a_layer", required=False, default=0.0)),
        )
    except Exception as exc:
        raise ConfigError(f"invalid [model] table: {exc}", key="model") from exc

    gt = raw["grid"]
    if model.domain == "periodic":
        grid_params = {
            "L": float(_take(gt, "grid", "L")),
            "N": int(_take(gt, "grid", "N")),
        }
    else:
        grid_params = {
            "xi_min": float(_take(gt, "grid", "xi_min")),
            "xi_max": float(_take(gt, "grid", "xi_max")),
            "M": int(_take(gt, "grid", "M")),
        }

    it = raw["initial"]
    preset = _take(it, "initial", "preset")
    preset_params = dict(it.get("params", {}))

    ct = raw.get("control", {})
    try:
        control = StepControl(
            cfl=float(ct.get("cfl", 0.4)),
            dt_min=float(ct.get("dt_min", 1e-12)),
            dt_max=float(ct.get("dt_max", 1e-2)),
            tail_threshold=float(ct.get("tail_threshold", 1e-6)),
            undershoot_tolerance=float(ct.get("undershoot_tolerance", 0.04)),
            dealias=bool(ct.get("dealias", True)),
            symmetric=bool(ct.get("symmetric", True)),
        )
    except Exception as exc:
        raise ConfigError(f"invalid [control] table: {exc}", key="control") from exc

    rt = raw["run"]
    t_end = float(_take(rt, "run", "t_end"))
    if t_end <= 0.0:
        raise ConfigError("run.t_end must be positive", key="run.t_end")
    return RunConfig(
        model=model,
        grid_params=grid_params,
        preset=preset,
        preset_params=preset_params,
        control=control,
        t_end=t_end,
        record_every=int(rt.get("record_every", 1)),
        out_dir=str(rt.get("out_dir", "out")),
        seed=int(rt.get("seed", 0)),
        checkpoint_every=int(rt.get("checkpoint_every", 50)),
        snapshot_every=int(rt.get("snapshot_every", 0)),
    )


def load_config(path: str) -> RunConfig:
    try:
        with open(path, "rb") as fh:
            raw = tomllib.load(fh)
    except FileNotFoundError as exc:
        raise ConfigError(f"config file not found: {path}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"TOML syntax error in {path}: {exc}") from exc
    return parse_config(raw)
