"""Figure rendering for completed runs.

Reads the timeseries.csv of a run directory and renders summary figures
next to it.  The CSV remains the data contract; figures are a convenience
layer for eyeballing blow-up indicators and never feed back into any
computation.
"""
from __future__ import annotations

import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from .errors import ConfigError
from .output import read_csv


def _savefig(fig, path: str, paths: list) -> None:
    fig.savefig(path, dpi=140, bbox_inches="tight")
    plt.close(fig)
    paths.append(path)


def render_report(run_dir: str) -> list:
    """Render PNG figures from run_dir/timeseries.csv; returns written paths."""
    ts_path = os.path.join(run_dir, "timeseries.csv")
    if not os.path.exists(ts_path):
        raise ConfigError(f"no timeseries.csv in {run_dir}")
    data = read_csv(ts_path)
    t = data["t"]
    paths: list = []
    log_run = "entropy" in data

    if log_run:
        fig, ax = plt.subplots(figsize=(6, 4))
        ax.plot(t, data["entropy"], label="entropy")
        ax.plot(t, data["F"], label="F")
        ax.plot(t, data["G"], label="G")
        ax.set_xlabel("t")
        ax.legend(frameon=False)
        ax.set_title("entropy / F / G")
        _savefig(fig, os.path.join(run_dir, "functionals.png"), paths)

        fig, ax = plt.subplots(figsize=(6, 4))
        ax.plot(t, data["d2entropy_margin"], label="entropy 2nd-deriv margin")
        ax.plot(t, data["dFdt_minus_G"], label="dF/dt - G")
        ax.plot(t, data["dGdt_minus_F2pi"], label="dG/dt - F^2/pi")
        ax.axhline(0.0, color="k", lw=0.6)
        ax.set_xlabel("t")
        ax.legend(frameon=False)
        ax.set_title("inequality margins")
        _savefig(fig, os.path.join(run_dir, "margins.png"), paths)

        fig, ax = plt.subplots(figsize=(6, 4))
        ax.semilogy(t, np.maximum(data["max_Omega"], 1e-300), label="max|Omega|")
        ax.semilogy(t, np.maximum(data["max_U"], 1e-300), label="max|U|")
        ax.set_xlabel("t")
        ax.legend(frameon=False)
        ax.set_title("sup norms")
        _savefig(fig, os.path.join(run_dir, "norms.png"), paths)
    else:
        fig, ax = plt.subplots(figsize=(6, 4))
        ax.plot(t, data["I"], label="I")
        ax.plot(t, data["J"], label="J")
        ax.set_xlabel("t")
        ax.legend(frameon=False)
        ax.set_title("weighted functionals")
        _savefig(fig, os.path.join(run_dir, "functionals.png"), paths)

        fig, ax = plt.subplots(figsize=(6, 4))
        ax.plot(t, data["dIdt_minus_J"], label="dI/dt - J")
        ax.plot(t, data["dJdt_minus_c0I2"], label="dJ/dt - c0 I^2")
        ax.axhline(0.0, color="k", lw=0.6)
        ax.set_xlabel("t")
        ax.legend(frameon=False)
        ax.set_title("inequality margins")
        _savefig(fig, os.path.join(run_dir, "margins.png"), paths)

        fig, ax = plt.subplots(figsize=(6, 4))
        for col in ("max_omega", "max_thetax", "max_ux"):
            ax.semilogy(t, np.maximum(data[col], 1e-300), label=col)
        ax.set_xlabel("t")
        ax.legend(frameon=False)
        ax.set_title("sup norms")
        _savefig(fig, os.path.join(run_dir, "norms.png"), paths)

        fig, ax = plt.subplots(figsize=(6, 4))
        ax.plot(t, data["bkm_ux"], label="int ||u_x||")
        ax.plot(t, data["bkm_thetax"], label="int ||theta_x||")
        ax.plot(t, data["bkm_omega"], label="int ||omega||")
        ax.set_xlabel("t")
        ax.legend(frameon=False)
        ax.set_title("continuation-criterion integrals")
        _savefig(fig, os.path.join(run_dir, "bkm.png"), paths)

    fig, ax = plt.subplots(figsize=(6, 4))
    ax.semilogy(t, np.maximum(data["tail_fraction"], 1e-300))
    ax.set_xlabel("t")
    ax.set_title("spectral tail fraction")
    _savefig(fig, os.path.join(run_dir, "resolution.png"), paths)
    return paths
