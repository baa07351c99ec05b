"""Comparison ODEs: lower envelopes and blow-up time bounds.

Each differential inequality in the blow-up argument has an equality-case
ODE whose solution is the sharp lower envelope for the corresponding
simulated functional.  This module integrates those ODEs with a high-order
adaptive scheme and evaluates the closed-form upper bound on the blow-up
time.  Blow-up detection uses a configurable value cap followed by
reciprocal extrapolation; the result is a proxy for the singularity time,
not a validated enclosure.
"""
from __future__ import annotations

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import minimize_scalar

from .errors import ParameterError

_RTOL = 1e-12
_ATOL = 1e-14
_EXP_GUARD = 700.0  # largest exponent exp() accepts in double precision


def _extrapolate_tstar(t: np.ndarray, v: np.ndarray, tail: int = 12) -> float:
    """Reciprocal extrapolation of a blow-up time from trailing samples.

    The equality ODEs here all end in a double-pole asymptote
    v ~ C/(T - t)^2, for which v^{-1/2} is linear in t; the fitted
    t-intercept refines the capped stopping time.
    """
    n = min(tail, t.size)
    tw, vw = t[-n:], v[-n:]
    good = vw > 0
    if np.count_nonzero(good) < 3:
        return float(t[-1])
    slope, intercept = np.polyfit(tw[good], vw[good] ** -0.5, 1)
    if slope >= 0.0:
        return float(t[-1])
    return float(-intercept / slope)


def _integrate(rhs, y0, horizon: float, event, n_samples: int):
    event.terminal = True
    event.direction = 1
    sol = solve_ivp(
        rhs,
        (0.0, horizon),
        y0,
        method="DOP853",
        rtol=_RTOL,
        atol=_ATOL,
        dense_output=True,
        events=event,
    )
    t_stop = float(sol.t_events[0][0]) if sol.t_events[0].size else float(sol.t[-1])
    t = np.linspace(0.0, t_stop, n_samples)
    y = sol.sol(t)
    # status < 0 means the step size underflowed at a singularity; treat it
    # as having reached the cap at the last representable time
    stopped = sol.t_events[0].size > 0 or sol.status < 0
    return t, y, stopped


def gengron_envelope(
    I0: float,
    J0: float,
    c0: float,
    horizon: float,
    cap: float = 1e3,
    n_samples: int = 512,
) -> dict:
    """Lower envelope of I(t) from the integral inequality chain.

    Integrates the equality case I' = J0 + c0 int_0^t I^2 (as the system
    I' = J0 + c0 S, S' = I^2).  T_star is the capped-plus-extrapolated
    blow-up proxy of the envelope; T_star_upper evaluates the closed-form
    bound t0 + 3 (alpha t0)^{-1/3} (3 c0 / 2)^{-2/3} with alpha = I0^2,
    minimized over t0.
    """
    if I0 <= 0.0:
        raise ParameterError("envelope requires I(0) > 0")
    if J0 < 0.0 or c0 <= 0.0 or horizon <= 0.0:
        raise ParameterError("need J0 >= 0, c0 > 0, horizon > 0")

    def rhs(t, y):
        I, S = y
        return (J0 + c0 * S, I * I)

    def hit_cap(t, y):
        return y[0] - cap

    t, y, capped = _integrate(rhs, (I0, 0.0), horizon, hit_cap, n_samples)
    I = y[0]
    T_star = _extrapolate_tstar(t, I) if capped else np.inf
    t0_opt, T_star_upper = optimize_closed_form_bound(I0 * I0, c0, horizon)
    return {
        "t": t,
        "I_lower": I,
        "T_star": T_star,
        "T_star_upper": T_star_upper,
        "t0_opt": t0_opt,
        "capped": capped,
    }


def closed_form_bound(alpha: float, c0: float, t0: float) -> float:
    """Blow-up time bound t0 + 3 (alpha t0)^{-1/3} (3 c0 / 2)^{-2/3}."""
    if alpha <= 0.0 or c0 <= 0.0 or t0 <= 0.0:
        raise ParameterError("closed-form bound needs alpha, c0, t0 > 0")
    return t0 + 3.0 * (alpha * t0) ** (-1.0 / 3.0) * (1.5 * c0) ** (-2.0 / 3.0)


def optimize_closed_form_bound(alpha: float, c0: float, horizon: float) -> tuple[float, float]:
    """Minimize the closed-form bound over t0 in (0, horizon].

    Golden-section search after a coarse log-spaced bracketing scan; the
    bound is smooth and unimodal in t0.
    """
    if alpha <= 0.0 or c0 <= 0.0 or horizon <= 0.0:
        raise ParameterError("need alpha, c0, horizon > 0")
    grid = np.exp(np.linspace(np.log(1e-8 * horizon), np.log(horizon), 200))
    vals = np.array([closed_form_bound(alpha, c0, t0) for t0 in grid])
    k = int(np.argmin(vals))
    if k in (0, grid.size - 1):
        return float(grid[k]), float(vals[k])
    res = minimize_scalar(
        lambda t0: closed_form_bound(alpha, c0, t0),
        bracket=(grid[k - 1], grid[k], grid[k + 1]),
        method="golden",
    )
    t0 = min(float(res.x), horizon)
    return t0, closed_form_bound(alpha, c0, t0)


def h_comparison_solution(
    alpha: float, c0: float, horizon: float, cap: float = 1e3, n_samples: int = 512
) -> dict:
    """Integrate h'' = 2 c0 h (h')^{1/2}, h(0) = 0, h'(0) = alpha.

    The first integral (h')^{3/2} = alpha^{3/2} + (3/2) c0 h^2 holds
    exactly along solutions; residual_max reports how well the adaptive
    integration preserves it.
    """
    if alpha <= 0.0 or c0 <= 0.0:
        raise ParameterError("need alpha, c0 > 0")

    def rhs(t, y):
        h, g = y
        return (g, 2.0 * c0 * h * np.sqrt(max(g, 0.0)))

    def hit_cap(t, y):
        return y[0] - cap

    t, y, capped = _integrate(rhs, (0.0, alpha), horizon, hit_cap, n_samples)
    h, g = y
    residual = g**1.5 - alpha**1.5 - 1.5 * c0 * h * h
    scale = np.maximum(1.0, np.abs(g) ** 1.5)
    return {
        "t": t,
        "h": h,
        "hdot": g,
        "residual_max": float(np.max(np.abs(residual / scale))),
        "capped": capped,
    }


def entropy_envelope(
    I0: float, Idot0: float, horizon: float, cap: float = 1e3, n_samples: int = 512
) -> dict:
    """Equality case of the entropy inequality: I'' = (2/pi) exp(e^{I-1} - I).

    The right-hand side grows doubly exponentially; past I of about 5 the
    solution's remaining time to any larger value (including overflow near
    I = 7.2) is under 1e-9 of the stopping time, so integration caps I at
    min(cap, 5) and T_star reports that crossing as the blow-up proxy.
    """
    if Idot0 < 0.0:
        raise ParameterError("need Idot0 >= 0 (the entropy is nondecreasing)")
    if not (np.isfinite(I0) and np.isfinite(Idot0)):
        raise ParameterError("initial values must be finite")
    cap_eff = min(cap, 5.0)
    if I0 >= cap_eff:
        raise ParameterError(f"I0 = {I0} already beyond the integration cap {cap_eff}")

    def rhs(t, y):
        I, v = y
        expo = min(np.exp(min(I - 1.0, _EXP_GUARD)) - I, _EXP_GUARD)
        return (v, 2.0 / np.pi * np.exp(expo))

    def hit_cap(t, y):
        return y[0] - cap_eff

    t, y, capped = _integrate(rhs, (I0, Idot0), horizon, hit_cap, n_samples)
    return {
        "t": t,
        "I": y[0],
        "Idot": y[1],
        "T_star": float(t[-1]) if capped else np.inf,
        "capped": capped,
    }


def fg_envelope(
    F0: float, G0: float, horizon: float, cap: float = 1e3, n_samples: int = 512
) -> dict:
    """Equality case of the coupled chain: F' = G, G' = F^2 / pi."""
    if F0 < 0.0 or G0 < 0.0:
        raise ParameterError("need F0, G0 >= 0")

    def rhs(t, y):
        F, G = y
        return (G, F * F / np.pi)

    def hit_cap(t, y):
        return y[0] - cap

    t, y, capped = _integrate(rhs, (F0, G0), horizon, hit_cap, n_samples)
    F, G = y
    T_star = _extrapolate_tstar(t, F) if capped else np.inf
    return {"t": t, "F": F, "G": G, "T_star": T_star, "capped": capped}
