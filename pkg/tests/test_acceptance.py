"""Acceptance gate: the nine end-to-end checks, one test (and one
pass/fail line) per criterion.

Heavy simulations are shared through module-scoped fixtures; the whole
module runs in a few minutes.
"""
import numpy as np
import pytest

from blowup1d import (
    biotsavart,
    bounds,
    diagnostics,
    evolve,
    fields,
    grids,
    kernels,
    output,
)

L = 2 * np.pi


def _report(criterion: int, ok: bool, detail: str) -> None:
    print(f"criterion {criterion}: {'PASS' if ok else 'FAIL'} - {detail}")


# ---------------------------------------------------------------- fixtures

def _hl_run(N: int, preset: str, params: dict, control: evolve.StepControl, t_end=6.0):
    g = grids.make_periodic_grid(L, N)
    st = fields.preset_initial_data(preset, g, params)
    model = fields.ModelSpec(model="HL")
    rec = diagnostics.make_periodic_recorder(model)
    traj = evolve.run(model, st, control, t_end=t_end, record_every=5, diagnostics_fn=rec)
    diagnostics.finalize_margins(traj.records, 2.0 / L**2)
    cols = {c: np.array([r[c] for r in traj.records]) for c in diagnostics.CSV_COLUMNS}
    return {"grid": g, "state0": st, "traj": traj, "cols": cols}


@pytest.fixture(scope="module")
def hl_battery():
    # small omega amplitude so the theta_x source drives two decades of
    # vorticity growth before the front outruns the grid
    params = {"A": 0.01, "B": 1.0}
    return {
        N: _hl_run(N, "paper-basic", params, evolve.StepControl())
        for N in (1024, 2048, 4096)
    }


@pytest.fixture(scope="module")
def quarter_battery():
    # support confinement at 1e-6 needs the spectral tail at ~1e-12: the
    # pointwise leak of a truncated spectrum scales like sqrt(tail mass)
    ctl = evolve.StepControl(tail_threshold=1e-12)
    return {N: _hl_run(N, "quarter-support", {"A": 1.0, "B": 1.0}, ctl) for N in (1024, 2048)}


def _log_run(model_name: str, M: int):
    lg = grids.make_log_grid(-2.0, 14.0, M)
    ls = fields.preset_log_initial_data("entropy-basic", lg)
    model = fields.ModelSpec(model=model_name, domain="log-line")
    ctl = evolve.StepControl(dt_max=5e-3)
    rec = diagnostics.make_log_recorder(model)
    traj = evolve.run(model, ls, ctl, t_end=3.0, record_every=25, diagnostics_fn=rec)
    diagnostics.finalize_log_margins(traj.records)
    cols = {c: np.array([r[c] for r in traj.records]) for c in diagnostics.LOG_CSV_COLUMNS}
    return cols


@pytest.fixture(scope="module")
def log_battery():
    return {name: _log_run(name, 1024) for name in ("CKY", "HL")}


def _resolved_mask(tail: np.ndarray, threshold: float = 1e-8) -> np.ndarray:
    # margins come from centered differences on record times: the first
    # and last few rows use one-sided stencils and are excluded
    mask = tail < threshold
    mask[:2] = False
    mask[-3:] = False
    return mask


# --------------------------------------------------------------- criteria

def test_criterion_1_biot_savart_cross_validation():
    g = grids.make_periodic_grid(L, 256)
    rng = np.random.default_rng(0)
    worst = 0.0
    for _ in range(20):
        omega = fields.random_admissible_omega(g, rng)
        a = biotsavart.hilbert_ux(omega, g, "spectral")
        b = biotsavart.hilbert_ux(omega, g, "direct")
        worst = max(worst, np.max(np.abs(a - b)) / np.max(np.abs(a)))
    omega = np.sin(g.nodes)
    vel = biotsavart.velocity_periodic(omega, g)
    analytic = np.max(np.abs(vel.u + (L / (2 * np.pi)) * np.sin(g.nodes)))
    ok = worst <= 1e-8 and analytic <= 1e-10
    _report(1, ok, f"cross-method rel {worst:.2e} (<=1e-8), analytic abs {analytic:.2e} (<=1e-10)")
    assert ok


def test_criterion_2_kernel_lemma_suite():
    reports = kernels.verify_kernel_properties(kernels.SamplingPlan(tolerance=1e-10))
    worst = min(r.worst_violation for r in reports)
    ok = all(r.passed for r in reports)
    _report(2, ok, f"{len(reports)} properties, worst one-sided violation {worst:+.2e} (>= -1e-10)")
    assert ok


def test_criterion_3_quadratic_form_positivity():
    rng = np.random.default_rng(0)
    g = grids.make_periodic_grid(L, 256)
    worst_p = np.inf
    for _ in range(1000):
        omega = fields.random_admissible_omega(g, rng)
        a = rng.uniform(0.0, L / 2)
        norm2 = float(np.sum(omega**2) * g.dx)
        worst_p = min(worst_p, diagnostics.quadform_periodic(omega, a, g) / norm2)

    lg = grids.make_log_grid(-6.0, 10.0, 1024)
    worst_l = np.inf
    for _ in range(1000):
        Omega = fields.random_log_bumps(lg, rng)
        xi = rng.uniform(lg.xi_min, lg.xi_max)
        norm2 = float(np.sum(Omega**2) * lg.h)
        worst_l = min(worst_l, diagnostics.quadform_line(Omega, xi, lg) / norm2)

    ok = worst_p >= -1e-6 and worst_l >= -1e-6
    _report(3, ok, f"periodic min {worst_p:+.2e}, line min {worst_l:+.2e} (>= -1e-6 * norm^2)")
    assert ok


def test_criterion_4_hl_blowup_indicators(hl_battery):
    tstars = {}
    ok = True
    details = []
    for N, run in hl_battery.items():
        c = run["cols"]
        res = c["tail_fraction"] < 1e-6
        growth = np.max(c["max_omega"][res]) / c["max_omega"][0]
        mono = bool(np.all(np.diff(c["I"][res]) > 0))
        m1 = np.min(c["dIdt_minus_J"][res])
        m2 = np.min(c["dJdt_minus_c0I2"][res] / np.maximum(1.0, c["I"][res] ** 2))
        tstars[N] = diagnostics.blowup_time_estimate(c["t"][res], c["max_omega"][res])["T_star"]
        this_ok = mono and m1 >= -1e-3 and m2 >= -1e-3 and (N != 4096 or growth >= 100.0)
        ok = ok and this_ok
        details.append(f"N={N}: growth {growth:.0f}, m1 {m1:+.1e}, m2 {m2:+.1e}")
    vals = list(tstars.values())
    spread = (max(vals) - min(vals)) / min(vals)
    ok = ok and spread <= 0.20
    _report(4, ok, "; ".join(details) + f"; T* spread {spread:.3f} (<=0.20)")
    assert ok


def test_criterion_5_gengron_envelope_domination(hl_battery):
    c = hl_battery[4096]["cols"]
    res = c["tail_fraction"] < 1e-6
    t, I = c["t"][res], c["I"][res]
    env = bounds.gengron_envelope(I[0], max(c["J"][0], 0.0), 2.0 / L**2, horizon=float(t[-1]))
    lower = np.interp(t, env["t"], env["I_lower"])
    margin = np.min(I - 0.99 * lower)
    ok = margin >= 0.0
    _report(5, ok, f"min(I - 0.99 * envelope) = {margin:+.2e} while resolved")
    assert ok


def test_criterion_6_log_entropy_and_fg_margins(log_battery):
    eps = 1e-3
    ok = True
    details = []
    cky = log_battery["CKY"]
    mask = _resolved_mask(cky["tail_fraction"])
    ent = cky["entropy"]
    mono = bool(np.all(np.diff(ent) > -1e-12))
    d2m = np.min(cky["d2entropy_margin"][mask])
    # Iddot >= positive lower bound - eps implies the raw second
    # differences clear -1e-6 by a wide margin
    ok = ok and mono and d2m >= -eps
    details.append(f"CKY entropy monotone {mono}, Iddot margin {d2m:+.2e}")
    for name in ("CKY", "HL"):
        c = log_battery[name]
        mask = _resolved_mask(c["tail_fraction"])
        fg1 = np.min(c["dFdt_minus_G"][mask])
        fg2 = np.min(c["dGdt_minus_F2pi"][mask])
        ok = ok and fg1 >= -eps and fg2 >= -eps
        details.append(f"{name} dF/dt-G {fg1:+.2e}, dG/dt-F^2/pi {fg2:+.2e}")
    _report(6, ok, "; ".join(details) + f" (all >= -{eps:g})")
    assert ok


def test_criterion_7_quarter_support_bounds(quarter_battery):
    ok = True
    details = []
    consts = {}
    delta = L / 32
    for N, run in quarter_battery.items():
        c, g, traj = run["cols"], run["grid"], run["traj"]
        res = c["tail_fraction"] < 1e-12
        outer = (g.nodes >= L / 4 + delta) & (g.nodes <= L / 2)
        conf = max(
            np.max(np.abs(s.omega[outer])) / np.max(np.abs(s.omega))
            for s, keep in zip(traj.states, res)
            if keep
        )
        st0 = run["state0"]
        bound = np.trapezoid(np.abs(st0.omega), dx=g.dx) + 2 * np.max(np.abs(st0.theta)) * c["t"]
        l1_excess = np.max((c["l1_omega"][res] - bound[res]) / bound[res])
        consts[N] = (
            np.max(c["u_l2"][res] / bound[res]),
            np.max(c["u_bmo_proxy"][res] / bound[res]),
        )
        ok = ok and conf <= 1e-6 and l1_excess <= 0.01
        details.append(f"N={N}: confinement {conf:.1e}, l1 excess {l1_excess:+.1e}")
    for k, tag in ((0, "C_l2"), (1, "C_bmo")):
        a, b = consts[1024][k], consts[2048][k]
        drift = abs(a - b) / min(a, b)
        ok = ok and drift <= 0.20
        details.append(f"{tag} drift {drift:.3f}")
    _report(7, ok, "; ".join(details))
    assert ok


def test_criterion_8_comparison_ode_closed_form():
    res = bounds.h_comparison_solution(1.0, 1.0, horizon=5.0)
    ref = 1.0 + 3.0 * 1.5 ** (-2.0 / 3.0)
    err = abs(bounds.closed_form_bound(1.0, 1.0, 1.0) - ref)
    ok = res["residual_max"] <= 1e-8 and err <= 1e-12
    _report(
        8,
        ok,
        f"first-integral residual {res['residual_max']:.1e} (<=1e-8), bound value error {err:.1e} (<=1e-12)",
    )
    assert ok


def test_criterion_9_determinism_and_restart(tmp_path):
    from blowup1d.config import parse_config

    raw = {
        "model": {"model": "HL"},
        "grid": {"L": L, "N": 256},
        "initial": {"preset": "paper-basic", "params": {"A": 1.0, "B": 1.0}},
        "control": {"dt_max": 5e-3},
        "run": {"t_end": 0.05, "record_every": 2, "checkpoint_every": 5},
    }
    cfg = parse_config(raw)
    a = output.run_simulation(cfg, out_dir=str(tmp_path / "a"))
    b = output.run_simulation(cfg, out_dir=str(tmp_path / "b"))
    identical = open(a["timeseries"], "rb").read() == open(b["timeseries"], "rb").read()

    part = str(tmp_path / "part")
    output.run_simulation(cfg, out_dir=part, max_steps=6)
    resumed = output.run_simulation(cfg, out_dir=part, resume=True)
    full = output.read_csv(a["timeseries"])
    rerun = output.read_csv(resumed["timeseries"])
    worst = 0.0
    for col in diagnostics.CSV_COLUMNS:
        scale = max(1.0, np.max(np.abs(full[col])))
        worst = max(worst, np.max(np.abs(full[col] - rerun[col])) / scale)
    ok = identical and worst <= 1e-12
    _report(9, ok, f"byte-identical reruns {identical}, restart drift {worst:.1e} (<=1e-12)")
    assert ok
