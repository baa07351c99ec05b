"""Closed-form Biot-Savart kernels and numerical certification of their properties.

The multiplicative-convolution kernel M(s) = (1/s) log|(s+1)/(s-1)| with its
symmetric/antisymmetric split, its log-coordinate counterpart
K(xi) = (1/pi) M(exp(-xi)), and the periodic half-line kernel
K(x, y) = s log|(s+1)/(s-1)| with s = tan(mu y)/tan(mu x), together with
G = K_x and the symmetrized form T(x, y).

verify_kernel_properties sweeps deterministic and seeded random samples
over every monotonicity, sign, and bound claim these kernels satisfy and
reports worst one-sided violations instead of raising.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, SingularPointError

SINGULAR_BAND = 1e-8  # exclusion band |s - 1| below which M/K are not evaluated


def _log_ratio(s: np.ndarray) -> np.ndarray:
    """log|(s+1)/(s-1)|, finite away from s = 1.

    Uses log1p branches: the naive quotient loses all relative accuracy
    for s near 0 (ratio 1 + 2s) and for huge s (ratio 1 + 2/s).
    """
    s = np.asarray(s, dtype=float)
    out = np.empty_like(s)
    below = np.abs(s) < 1.0
    out[below] = np.log1p(s[below]) - np.log1p(-s[below])
    sa = np.abs(s[~below])
    out[~below] = np.sign(s[~below]) * np.log1p(2.0 / (sa - 1.0))
    return out


def eval_M(s):
    """Evaluate M, M_sym, M_a at s > 0 (s != 1).

    M = M_sym + M_a exactly:
      M_sym = (1/2)(1/s + s) log|(s+1)/(s-1)|,
      M_a   = (1/2)(1/s - s) log|(s+1)/(s-1)|.
    """
    s = np.asarray(s, dtype=float)
    scalar = s.ndim == 0
    s = np.atleast_1d(s)
    if np.any(s <= 0):
        raise DomainError("M(s) requires s > 0")
    if np.any(np.abs(s - 1.0) < SINGULAR_BAND):
        raise SingularPointError("M(s) is singular at s = 1")
    lr = _log_ratio(s)
    M = lr / s
    M_sym = 0.5 * (1.0 / s + s) * lr
    M_a = 0.5 * (1.0 / s - s) * lr
    if scalar:
        return float(M[0]), float(M_sym[0]), float(M_a[0])
    return M, M_sym, M_a


def K_log(xi):
    """Log-coordinate HL kernel K(xi) = (1/pi) M(exp(-xi)).

    Increasing on (-infty, 0), decreasing on (0, infty), limit 2/pi at
    +infty and decay like (2/pi) exp(2 xi) at -infty.
    """
    xi = np.asarray(xi, dtype=float)
    M, _, _ = eval_M(np.exp(-np.atleast_1d(xi)))
    out = np.atleast_1d(M) / np.pi
    return float(out[0]) if xi.ndim == 0 else out


def K_log_unchecked(xi):
    """K_log without the singular-band guard; +inf at xi = 0.

    For use inside adaptive quadrature of the integrable log singularity.
    """
    xi = np.asarray(xi, dtype=float)
    s = np.exp(-np.atleast_1d(xi))
    with np.errstate(divide="ignore"):
        out = _log_ratio(s) / s / np.pi
    return float(out[0]) if xi.ndim == 0 else out


def K_log_split(xi):
    """(K_sym, K_a) halves of K_log: even/odd parts in xi."""
    xi = np.atleast_1d(np.asarray(xi, dtype=float))
    Kp = np.atleast_1d(K_log(xi))
    Km = np.atleast_1d(K_log(-xi))
    return 0.5 * (Kp + Km), 0.5 * (Kp - Km)


def eval_K_periodic(x, y, L: float) -> dict:
    """Evaluate {K, s, G, T} at points of (0, L/2)^2 away from the diagonal.

    K(x,y) = s log|(s+1)/(s-1)|, s = tan(mu y)/tan(mu x);
    G = K_x via its closed form; T(x,y) = cot(mu y) G(x,y) + cot(mu x) G(y,x).
    """
    mu = np.pi / L
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    scalar = x.ndim == 0 and y.ndim == 0
    x, y = np.broadcast_arrays(np.atleast_1d(x), np.atleast_1d(y))
    if np.any(x <= 0) or np.any(x >= L / 2) or np.any(y <= 0) or np.any(y >= L / 2):
        raise DomainError("K(x, y) requires x, y in the open interval (0, L/2)")
    s = np.tan(mu * y) / np.tan(mu * x)
    if np.any(np.abs(s - 1.0) < SINGULAR_BAND):
        raise SingularPointError("K(x, y) is singular on the diagonal x = y")
    lr = _log_ratio(s)
    K = s * lr
    bracket = lr - 2.0 * s / (s * s - 1.0)
    G = -mu / np.sin(mu * x) ** 2 * np.tan(mu * y) * bracket
    s_rev = 1.0 / s
    bracket_rev = _log_ratio(s_rev) - 2.0 * s_rev / (s_rev * s_rev - 1.0)
    G_rev = -mu / np.sin(mu * y) ** 2 * np.tan(mu * x) * bracket_rev
    T = G / np.tan(mu * y) + G_rev / np.tan(mu * x)
    out = {"K": K, "s": s, "G": G, "T": T}
    if scalar:
        out = {k: float(v[0]) for k, v in out.items()}
    return out


@dataclass(frozen=True)
class SamplingPlan:
    """How densely to probe each kernel property."""

    n_deterministic: int = 10_000
    n_random: int = 10_000
    seed: int = 0
    tolerance: float = 1e-10
    L: float = 2 * np.pi
    s_max: float = 1e4
    xi_max: float = 30.0


@dataclass(frozen=True)
class KernelReport:
    property_id: str
    samples: int
    worst_violation: float
    worst_location: tuple
    passed: bool


def check_lower_bound(values, bound, locations, property_id: str, tolerance: float) -> KernelReport:
    """Report on values >= bound; worst signed violation is min(values - bound)."""
    margin = np.asarray(values, dtype=float) - np.asarray(bound, dtype=float)
    i = int(np.argmin(margin))
    loc = locations[i] if not np.isscalar(locations[i]) else (locations[i],)
    worst = float(margin[i])
    return KernelReport(
        property_id=property_id,
        samples=margin.size,
        worst_violation=worst,
        worst_location=tuple(np.atleast_1d(loc)),
        passed=bool(worst >= -tolerance),
    )


def _s_samples(plan: SamplingPlan, lo: float, hi: float, rng) -> np.ndarray:
    """Log-spaced deterministic + log-uniform random samples of (lo, hi)."""
    det = np.exp(np.linspace(np.log(lo), np.log(hi), plan.n_deterministic))
    ran = np.exp(rng.uniform(np.log(lo), np.log(hi), plan.n_random))
    s = np.sort(np.concatenate([det, ran]))
    return s[np.abs(s - 1.0) >= SINGULAR_BAND]


def _pair_samples(plan: SamplingPlan, rng, ordered: str) -> tuple[np.ndarray, np.ndarray]:
    """Random (x, y) pairs in (0, L/2)^2, optionally with x < y or y < x."""
    half = plan.L / 2
    n = plan.n_deterministic + plan.n_random
    x = rng.uniform(1e-4 * half, (1 - 1e-4) * half, 2 * n)
    y = rng.uniform(1e-4 * half, (1 - 1e-4) * half, 2 * n)
    if ordered == "x<y":
        keep = x < y
    elif ordered == "y<x":
        keep = y < x
    else:
        keep = np.ones_like(x, dtype=bool)
    x, y = x[keep][:n], y[keep][:n]
    mu = np.pi / plan.L
    s = np.tan(mu * y) / np.tan(mu * x)
    ok = np.abs(s - 1.0) >= SINGULAR_BAND
    return x[ok], y[ok]


def verify_kernel_properties(plan: SamplingPlan | None = None) -> list[KernelReport]:
    """Certify every kernel lemma numerically on deterministic + random samples."""
    plan = plan or SamplingPlan()
    rng = np.random.default_rng(plan.seed)
    tol = plan.tolerance
    reports: list[KernelReport] = []

    # monotonicity of M on (0,1) and (1,inf); M_a decreasing throughout
    s_lo = _s_samples(plan, 1e-6, 1.0 - 1e-6, rng)
    M_lo, _, _ = eval_M(s_lo)
    reports.append(
        check_lower_bound(np.diff(M_lo), 0.0, s_lo[:-1], "M increasing on (0,1)", tol)
    )
    s_hi = _s_samples(plan, 1.0 + 1e-6, plan.s_max, rng)
    M_hi, _, _ = eval_M(s_hi)
    reports.append(
        check_lower_bound(-np.diff(M_hi), 0.0, s_hi[:-1], "M decreasing on (1,inf)", tol)
    )
    s_all = np.concatenate([s_lo, s_hi])
    _, _, Ma = eval_M(s_all)
    reports.append(
        check_lower_bound(-np.diff(Ma), 0.0, s_all[:-1], "M_a decreasing on (0,inf)", tol)
    )

    # limits: M -> 2 and M_a -> 1 as s -> 0+; M - 2/s^2 = O(1/s^3) at infinity
    M0, _, Ma0 = eval_M(1e-8)
    reports.append(check_lower_bound([-abs(M0 - 2.0)], -1e-6, [1e-8], "lim M(0+) = 2", tol))
    reports.append(check_lower_bound([-abs(Ma0 - 1.0)], -1e-6, [1e-8], "lim M_a(0+) = 1", tol))
    s_far = np.array([1e3, 1e4])
    M_far, _, _ = eval_M(s_far)
    resid = np.abs(M_far - 2.0 / s_far**2) * s_far**3
    reports.append(
        check_lower_bound(10.0 - resid, 0.0, s_far, "M(s) = 2/s^2 + O(1/s^3), C <= 10", tol)
    )

    # periodic kernel sign/bound properties
    x, y = _pair_samples(plan, rng, "any")
    ev = eval_K_periodic(x, y, plan.L)
    locs = np.stack([x, y], axis=1)
    reports.append(check_lower_bound(ev["K"], 0.0, locs, "K >= 0 on (0,L/2)^2", tol))
    reports.append(check_lower_bound(-ev["T"], 0.0, locs, "T <= 0 on (0,L/2)^2", tol))

    x, y = _pair_samples(plan, rng, "x<y")
    ev = eval_K_periodic(x, y, plan.L)
    locs = np.stack([x, y], axis=1)
    reports.append(check_lower_bound(ev["K"], 2.0, locs, "K >= 2 for x < y", tol))
    reports.append(check_lower_bound(ev["G"], 0.0, locs, "K_x >= 0 for x < y", tol))

    x, y = _pair_samples(plan, rng, "y<x")
    ev = eval_K_periodic(x, y, plan.L)
    locs = np.stack([x, y], axis=1)
    reports.append(
        check_lower_bound(ev["K"], 2.0 * ev["s"] ** 2, locs, "K >= 2 s^2 for y < x", tol)
    )
    reports.append(check_lower_bound(-ev["G"], 0.0, locs, "K_x <= 0 for y < x", tol))

    # scalar inequality used for T <= 0
    s = _s_samples(plan, 1e-6, plan.s_max, rng)
    reports.append(
        check_lower_bound(
            _log_ratio(s) - 2.0 * s / (s * s + 1.0),
            0.0,
            s,
            "log|(s+1)/(s-1)| >= 2s/(s^2+1)",
            tol,
        )
    )

    # log-coordinate kernel halves
    xi = np.sort(
        np.concatenate(
            [
                np.linspace(-plan.xi_max, plan.xi_max, plan.n_deterministic),
                rng.uniform(-plan.xi_max, plan.xi_max, plan.n_random),
            ]
        )
    )
    xi = xi[np.abs(xi) > 1e-7]
    K_sym, K_a = K_log_split(xi)
    reports.append(check_lower_bound(np.diff(K_a), 0.0, xi[:-1], "K_a increasing", tol))
    reports.append(
        check_lower_bound(K_sym, 1.0 / np.pi, xi, "K_sym >= 1/pi", tol)
    )
    lim_err = max(
        abs(K_log_split(plan.xi_max)[1][0] - 1.0 / np.pi),
        abs(K_log_split(-plan.xi_max)[1][0] + 1.0 / np.pi),
    )
    reports.append(
        check_lower_bound([-lim_err], -1e-8, [plan.xi_max], "K_a limits +-1/pi", tol)
    )
    return reports
