"""Functionals, norms, inequality margins, and quadratic forms.

Everything the blow-up argument monitors: the weighted integrals I and J on
the half period, the entropy / F / G functionals in log coordinates, the
sign-definite quadratic forms, BKM-style running time integrals, the L1
vorticity bound, and a dyadic BMO proxy.  Margins are recorded, never
enforced; a failing margin at high resolution flags a bug, at low
resolution flags under-resolution.
"""
from __future__ import annotations

import numpy as np
from scipy.integrate import quad, simpson

from . import biotsavart, grids
from .errors import (
    DegenerateError,
    DomainError,
    NormalizationError,
    ShapeError,
    SignError,
    TruncationError,
    UnreliableEstimateError,
)
from .fields import FieldState, LogState
from .grids import LogGrid, PeriodicGrid

# column order of one timeseries row; fixed interface, do not reorder
CSV_COLUMNS = (
    "t",
    "dt",
    "I",
    "J",
    "dIdt_minus_J",
    "dJdt_minus_c0I2",
    "max_omega",
    "max_thetax",
    "max_ux",
    "bkm_ux",
    "bkm_thetax",
    "bkm_omega",
    "l1_omega",
    "l1_bound_margin",
    "u_l2",
    "u_bmo_proxy",
    "tail_fraction",
)

LOG_CSV_COLUMNS = (
    "t",
    "dt",
    "entropy",
    "F",
    "G",
    "lemma3_margin",
    "d2entropy_margin",
    "dFdt_minus_G",
    "dGdt_minus_F2pi",
    "max_Omega",
    "max_U",
    "tail_fraction",
)


def _check_theta_normalized(state: FieldState) -> None:
    scale = max(1.0, float(np.max(np.abs(state.theta))))
    if abs(state.theta[0]) > 1e-10 * scale:
        raise NormalizationError("theta(0) must vanish (call enforce_symmetry first)")


def functional_I(state: FieldState) -> float:
    """I(t) = int_0^{L/2} theta cot(mu x) dx.

    The integrand extends continuously to x = 0 with value theta_x(0)/mu
    (theta vanishes linearly there) and to x = L/2 with value 0, so
    composite Simpson on the half-period nodes applies directly.
    """
    _check_theta_normalized(state)
    grid = state.grid
    half = grid.N // 2
    x = grid.nodes[: half + 1]
    theta_x = grids.spectral_derivative(state.theta, grid)
    vals = np.empty(half + 1)
    vals[1:half] = state.theta[1:half] / np.tan(grid.mu * x[1:half])
    vals[0] = theta_x[0] / grid.mu
    vals[half] = 0.0  # cot(pi/2) = 0
    return float(simpson(vals, dx=grid.dx))


def _sin_logsin_moments(m: np.ndarray) -> np.ndarray:
    """T_m = int_0^pi sin(m t) log|sin(t/2)| dt for integer m >= 1.

    Closed form from the cosine series of log sin and digamma sums:
      m odd:  T_m = -(2 log 2)/m - (1/m)[(psi(1+m/2) + psi(1-m/2))/2 + gamma]
      m even: T_m = -(1/(2m))[psi((1-m)/2) + psi((m+1)/2) - 2 psi(1/2)]
    """
    from scipy.special import digamma

    m = np.asarray(m, dtype=float)
    gamma = float(np.euler_gamma)
    out = np.empty(m.shape)
    odd = (m.astype(int) % 2) == 1
    mo = m[odd]
    out[odd] = -2.0 * np.log(2.0) / mo - (
        0.5 * (digamma(1.0 + mo / 2.0) + digamma(1.0 - mo / 2.0)) + gamma
    ) / mo
    me = m[~odd]
    out[~odd] = -(
        digamma((1.0 - me) / 2.0) + digamma((me + 1.0) / 2.0) - 2.0 * digamma(0.5)
    ) / (2.0 * me)
    return out


def functional_I_parts(state: FieldState) -> float:
    """I(t) via integration by parts: -(1/mu) int_0^{L/2} theta_x log|sin(mu x)| dx.

    Independent route for cross-checking functional_I.  The boundary terms
    vanish (theta(0) = 0 kills the x -> 0 log, and log sin(pi/2) = 0); the
    remaining integral is evaluated mode by mode with the closed-form
    moments of sin against log sin, so for band-limited theta this route
    is exact rather than quadrature-limited.
    """
    _check_theta_normalized(state)
    grid = state.grid
    half = grid.N // 2
    theta_x = grids.spectral_derivative(state.theta, grid)
    fh = np.fft.fft(theta_x)
    m = np.arange(1, half)
    b = -2.0 * np.imag(fh[1:half]) / grid.N  # sine coefficients of theta_x
    T = _sin_logsin_moments(m)
    # x = L t / (2 pi) maps (0, L/2) to (0, pi); log|sin(mu x)| = log|sin(t/2)|
    P = grid.L / (2.0 * np.pi) * float(np.dot(b, T))
    return -P / grid.mu


def functional_J(state: FieldState) -> float:
    """J(t) = (2/pi) int_0^{L/2} theta omega cot(mu x) dx.

    theta omega = O(x^2) near 0, so the integrand vanishes at both
    endpoints of the half period.
    """
    _check_theta_normalized(state)
    grid = state.grid
    half = grid.N // 2
    x = grid.nodes[: half + 1]
    vals = np.zeros(half + 1)
    vals[1:half] = (
        state.theta[1:half] * state.omega[1:half] / np.tan(grid.mu * x[1:half])
    )
    return float(2.0 / np.pi * simpson(vals, dx=grid.dx))


def functionals_log(state: LogState, tol: float = 1e-10) -> dict:
    """Entropy, F, G, and the Jensen lower-bound margin of a log-line state.

    rho is normalized to unit mass internally; the margin additionally
    shifts xi so the support starts at 0 (the Jensen bound
    int xi rho >= exp(entropy - 1) assumes a density on [0, inf)).  The
    applied normalization and shift are reported alongside the values.
    """
    rho = state.rho
    h = state.grid.h
    xi = state.grid.nodes
    if np.min(rho) < -tol * max(1.0, float(np.max(np.abs(rho)))):
        raise SignError(f"rho must be >= 0, min = {np.min(rho):.3e}")
    rho = np.maximum(rho, 0.0)
    mass = float(simpson(rho, dx=h))
    if mass <= tol:
        raise DegenerateError("rho has no mass")
    rho_n = rho / mass

    with np.errstate(divide="ignore", invalid="ignore"):
        plogp = np.where(rho_n > 0.0, -rho_n * np.log(rho_n), 0.0)
    entropy = float(simpson(plogp, dx=h))
    F = float(simpson(xi * rho_n, dx=h))
    # cross-check route: F = -int_{xi >= 0} Theta for support in xi > 0
    right = xi >= 0.0
    F_from_theta = float(-simpson(state.Theta[right] / mass, dx=h))
    G = float(-2.0 / np.pi * simpson(state.Omega * state.Theta / mass, dx=h))

    support = np.nonzero(rho_n > tol * np.max(rho_n))[0]
    xi_left = float(xi[support[0]]) if support.size else 0.0
    shift = max(0.0, -xi_left)
    lemma3_lhs = F + shift
    lemma3_rhs = float(np.exp(entropy - 1.0))
    return {
        "entropy": entropy,
        "F": F,
        "F_from_theta": F_from_theta,
        "G": G,
        "lemma3_lhs": lemma3_lhs,
        "lemma3_rhs": lemma3_rhs,
        "lemma3_margin": lemma3_lhs - lemma3_rhs,
        "mass": mass,
        "shift": shift,
    }


def quadform_line(Omega: np.ndarray, xi: float, grid: LogGrid) -> float:
    """int_{-inf}^{xi} U_xi(eta) Omega(eta) d eta with U = K * Omega.

    U_xi is computed as the convolution of K with Omega_xi (smooth-part
    differentiation moved onto Omega), which sidesteps the distributional
    derivative of K at lag 0.  Requires Omega compactly supported inside
    the grid.
    """
    Omega = np.asarray(Omega, dtype=float)
    if Omega.shape != (grid.M,):
        raise ShapeError(f"expected {grid.M} samples, got {Omega.shape}")
    peak = float(np.max(np.abs(Omega)))
    if peak > 0.0:
        edge = max(np.max(np.abs(Omega[:4])), np.max(np.abs(Omega[-4:])))
        if edge > 1e-10 * peak:
            raise TruncationError("Omega support reaches the xi-grid boundary")
    nodes = grid.nodes
    Omega_xi = grids.fd_derivative(Omega, grid.h)
    U_xi = biotsavart.velocity_log_convolution(Omega_xi, grid, "HL")
    integrand = U_xi * Omega
    return _integrate_upto(nodes, integrand, xi)


def _integrate_upto(x: np.ndarray, f: np.ndarray, b: float) -> float:
    """Trapezoid of samples (x, f) over [x[0], min(b, x[-1])], 0 if b <= x[0]."""
    if b <= x[0]:
        return 0.0
    b = min(b, float(x[-1]))
    i = int(np.searchsorted(x, b, side="right")) - 1
    val = float(np.trapezoid(f[: i + 1], x[: i + 1]))
    if i < x.size - 1 and b > x[i]:
        frac = (b - x[i]) / (x[i + 1] - x[i])
        fb = f[i] + frac * (f[i + 1] - f[i])
        val += 0.5 * (f[i] + fb) * (b - x[i])
    return val


def _integrate_from(x: np.ndarray, f: np.ndarray, a: float) -> float:
    """Trapezoid of samples (x, f) over [max(a, x[0]), x[-1]]."""
    total = float(np.trapezoid(f, x))
    return total - _integrate_upto(x, f, a)


def quadform_periodic(omega: np.ndarray, a: float, grid: PeriodicGrid) -> float:
    """int_a^{L/2} omega [u cot(mu x)]_x dx for the log-sin velocity law.

    The profile v = u cot(mu x) comes from the half-line kernel matrix; it
    extends smoothly to both endpoints (finite limit u_x(0)/mu at 0, zero
    at L/2), is differentiated by 4th-order finite differences, and
    integrated against omega by trapezoid with a fractional first cell.
    """
    omega = np.asarray(omega, dtype=float)
    if omega.shape != (grid.N,):
        raise ShapeError(f"expected {grid.N} samples, got {omega.shape}")
    if not (0.0 <= a <= grid.L / 2):
        raise DomainError(f"a = {a} outside [0, L/2]")
    half = grid.N // 2
    v = np.empty(half + 1)
    v[1:half] = biotsavart.halfline_velocity_profile(omega, grid)
    v[half] = 0.0  # u odd about L/2 and cot(pi/2) = 0
    v[0] = 4.0 * v[1] - 6.0 * v[2] + 4.0 * v[3] - v[4]  # cubic extrapolant
    dv = grids.fd_derivative(v, grid.dx)
    x = grid.nodes[: half + 1]
    return _integrate_from(x, omega[: half + 1] * dv, a)


def quadform_cky(omega_fn, a: float, b: float = 1.0) -> float:
    """CKY analogue int_a^b omega(x)^2 / x dx by adaptive quadrature."""
    if not (0.0 < a <= b):
        raise DomainError(f"need 0 < a <= b, got a = {a}, b = {b}")
    val, _ = quad(lambda x: omega_fn(x) ** 2 / x, a, b, limit=200)
    return float(val)


def bmo_proxy(u: np.ndarray, max_depth: int | None = None) -> float:
    """Max mean oscillation of u over dyadic subintervals of the period.

    Depth ranges over 0..log2(N); within a factor 4 of the true BMO
    seminorm, which suffices for boundedness monitoring.
    """
    u = np.asarray(u, dtype=float)
    N = u.size
    depth_cap = int(np.log2(N))
    if max_depth is not None:
        depth_cap = min(depth_cap, max_depth)
    worst = 0.0
    for d in range(depth_cap + 1):
        parts = 2**d
        m = (N // parts) * parts  # drop the ragged tail when N is not a power of 2
        blocks = u[:m].reshape(parts, m // parts)
        osc = np.mean(np.abs(blocks - blocks.mean(axis=1, keepdims=True)), axis=1)
        worst = max(worst, float(np.max(osc)))
    return worst


def norms_and_bounds(
    state: FieldState, vel, history: dict | None, dt: float = 0.0
) -> dict:
    """Sup norms, integral norms, and running BKM time integrals.

    history is the previous record (or None at t = 0); BKM integrals
    accumulate by trapezoid in time between records.  l1_bound_margin is
    ||omega_0||_1 + 2 ||theta_0||_inf t - ||omega(t)||_1, nonnegative
    while the transport bound holds.
    """
    grid = state.grid
    theta_x = grids.spectral_derivative(state.theta, grid)
    rec = {
        "t": float(state.t),
        "max_omega": float(np.max(np.abs(state.omega))),
        "max_thetax": float(np.max(np.abs(theta_x))),
        "max_ux": float(np.max(np.abs(vel.ux))),
        "l1_omega": float(np.sum(np.abs(state.omega)) * grid.dx),
        "u_l2": float(np.sqrt(np.sum(vel.u**2) * grid.dx)),
        "u_bmo_proxy": bmo_proxy(vel.u),
    }
    if history is None:
        rec["bkm_ux"] = rec["bkm_thetax"] = rec["bkm_omega"] = 0.0
        rec["_l1_omega0"] = rec["l1_omega"]
        rec["_theta0_max"] = float(np.max(np.abs(state.theta)))
    else:
        span = rec["t"] - history["t"]
        rec["bkm_ux"] = history["bkm_ux"] + 0.5 * span * (
            history["max_ux"] + rec["max_ux"]
        )
        rec["bkm_thetax"] = history["bkm_thetax"] + 0.5 * span * (
            history["max_thetax"] + rec["max_thetax"]
        )
        rec["bkm_omega"] = history["bkm_omega"] + 0.5 * span * (
            history["max_omega"] + rec["max_omega"]
        )
        rec["_l1_omega0"] = history["_l1_omega0"]
        rec["_theta0_max"] = history["_theta0_max"]
    bound = rec["_l1_omega0"] + 2.0 * rec["_theta0_max"] * rec["t"]
    rec["l1_bound_margin"] = bound - rec["l1_omega"]
    rec["dt"] = float(dt)
    return rec


def blowup_time_estimate(
    t: np.ndarray, max_omega: np.ndarray, window: int = 8
) -> dict:
    """Singularity-time extrapolation from the trailing 1/max|omega| trend.

    Least-squares line through the last `window` samples of 1/max_omega
    against t; T_star is the t-intercept, fit_quality the coefficient of
    determination.  Requires max_omega strictly increasing in the window.
    """
    t = np.asarray(t, dtype=float)
    y = np.asarray(max_omega, dtype=float)
    if t.size != y.size:
        raise ShapeError("t and max_omega must have the same length")
    if window < 8 or t.size < window:
        raise UnreliableEstimateError(f"need >= {max(window, 8)} samples, got {t.size}")
    tw, yw = t[-window:], y[-window:]
    if np.any(np.diff(yw) <= 0.0):
        raise UnreliableEstimateError("max_omega not strictly increasing in window")
    inv = 1.0 / yw
    slope, intercept = np.polyfit(tw, inv, 1)
    if slope >= 0.0:
        raise UnreliableEstimateError("1/max_omega not decreasing; no blow-up trend")
    fit = slope * tw + intercept
    ss_res = float(np.sum((inv - fit) ** 2))
    ss_tot = float(np.sum((inv - np.mean(inv)) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0.0 else 1.0
    return {"T_star": float(-intercept / slope), "fit_quality": r2}


def make_periodic_recorder(model):
    """Diagnostics callback for evolve.run on periodic models.

    Returns per-record dicts carrying every CSV column except the two
    derivative margins, which need neighboring records and are filled in
    by finalize_margins.
    """
    from . import evolve

    def recorder(state: FieldState, ctx: dict) -> dict:
        vel = evolve.velocity_for(model, state)
        prev = ctx["records"][-1] if ctx["records"] else None
        rec = norms_and_bounds(state, vel, prev, dt=ctx["dt"])
        rec["I"] = functional_I(state)
        rec["J"] = functional_J(state)
        # matches the run-termination detector: with dealiasing the raw
        # top-third tail is identically zero, so report the resolved-band one
        rec["tail_fraction"] = (
            grids.resolved_band_tail_fraction(state.omega, state.grid)
            if ctx["control"].dealias
            else grids.tail_fraction(state.omega, state.grid).tail_fraction
        )
        rec["dIdt_minus_J"] = 0.0
        rec["dJdt_minus_c0I2"] = 0.0
        return rec

    return recorder


def make_log_recorder(model):
    """Diagnostics callback for evolve.run on log-line models."""
    from . import evolve

    def recorder(state: LogState, ctx: dict) -> dict:
        kernel = "HL" if model.model == "HL" else "CKY"
        U = biotsavart.velocity_log_convolution(state.Omega, state.grid, kernel)
        # the transported density rides a steepening front; the centered
        # stencils put dispersive ripples of a few percent behind it.  Those
        # are clipped by functionals_log; only gross negativity aborts.
        # API users calling functionals_log directly keep the strict default.
        fl = functionals_log(state, tol=5e-2)
        rec = {
            "t": float(state.t),
            "dt": float(ctx["dt"]),
            "entropy": fl["entropy"],
            "F": fl["F"],
            "G": fl["G"],
            "lemma3_margin": fl["lemma3_margin"],
            "d2entropy_margin": 0.0,
            "dFdt_minus_G": 0.0,
            "dGdt_minus_F2pi": 0.0,
            "max_Omega": float(np.max(np.abs(state.Omega))),
            "max_U": float(np.max(np.abs(U))),
            "tail_fraction": evolve._log_tail_fraction(state),
        }
        return rec

    return recorder


def _centered_dt(t: np.ndarray, y: np.ndarray) -> np.ndarray:
    """d y / d t by centered differences on possibly nonuniform record times."""
    return np.gradient(y, t, edge_order=1)


def finalize_margins(records: list, c0: float) -> list:
    """Fill dIdt_minus_J and dJdt_minus_c0I2 from the recorded I, J series.

    Centered differences on the output times; the margins at the two
    endpoint records use one-sided differences and are less trustworthy.
    """
    if len(records) < 3:
        return records
    t = np.array([r["t"] for r in records])
    I = np.array([r["I"] for r in records])
    J = np.array([r["J"] for r in records])
    dI = _centered_dt(t, I)
    dJ = _centered_dt(t, J)
    for k, r in enumerate(records):
        r["dIdt_minus_J"] = float(dI[k] - J[k])
        r["dJdt_minus_c0I2"] = float(dJ[k] - c0 * I[k] ** 2)
    return records


def finalize_log_margins(records: list) -> list:
    """Fill the entropy and F/G inequality margins of a log-line run.

    d2entropy_margin = entropy_tt - (2/pi) exp(exp(entropy - 1) - entropy);
    the F/G margins mirror the first-order chain dF/dt >= G,
    dG/dt >= F^2 / pi.
    """
    if len(records) < 3:
        return records
    t = np.array([r["t"] for r in records])
    ent = np.array([r["entropy"] for r in records])
    F = np.array([r["F"] for r in records])
    G = np.array([r["G"] for r in records])
    ent_t = _centered_dt(t, ent)
    ent_tt = _centered_dt(t, ent_t)
    dF = _centered_dt(t, F)
    dG = _centered_dt(t, G)
    rhs = 2.0 / np.pi * np.exp(np.exp(ent - 1.0) - ent)
    for k, r in enumerate(records):
        r["d2entropy_margin"] = float(ent_tt[k] - rhs[k])
        r["dFdt_minus_G"] = float(dF[k] - G[k])
        r["dGdt_minus_F2pi"] = float(dG[k] - F[k] ** 2 / np.pi)
    return records
