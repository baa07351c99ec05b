"""Time integration of the model family with resolution monitoring.

Classical RK4 with a CFL-limited adaptive step; each stage re-evaluates the
Biot-Savart law.  Quadratic terms are dealiased with the 2/3 rule, theta is
re-normalized to theta(0) = 0 after every step, and (in symmetric mode) the
state is projected back onto the odd/even class.  A run terminates when it
reaches t_end, loses spectral resolution, hits the minimum step, or
produces non-finite values.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable

import numpy as np

from . import biotsavart, fields, grids
from .errors import InvalidDataError, ParameterError
from .fields import FieldState, LogState, ModelSpec


@dataclass(frozen=True)
class StepControl:
    cfl: float = 0.4
    dt_min: float = 1e-12
    dt_max: float = 1e-2
    tail_threshold: float = 1e-6
    undershoot_tolerance: float = 0.04
    dealias: bool = True
    symmetric: bool = True

    def __post_init__(self):
        if not (0.0 < self.cfl <= 1.0):
            raise ParameterError(f"cfl must be in (0, 1], got {self.cfl}")
        if not (0.0 < self.dt_min < self.dt_max):
            raise ParameterError("need 0 < dt_min < dt_max")
        if not (0.0 < self.tail_threshold < 1.0):
            raise ParameterError("tail_threshold must be in (0, 1)")
        if not (0.0 < self.undershoot_tolerance < 1.0):
            raise ParameterError("undershoot_tolerance must be in (0, 1)")


@dataclass
class Trajectory:
    states: list  # FieldState | LogState at record times
    records: list  # one diagnostics dict per stored state
    termination: str  # time-reached | resolution-lost | cfl-floor | nan-detected
    t_final: float
    steps: int


def velocity_for(model: ModelSpec, state: FieldState) -> biotsavart.VelocityField:
    """Velocity field of a periodic-domain model state."""
    method = model.biot_savart_method
    if model.model == "CCF":
        # u = H omega; u_x is not needed by the dynamics but exposed anyway
        u = biotsavart.hilbert_ux(
            state.omega, state.grid, "spectral" if method == "spectral" else "direct"
        )
        return biotsavart.VelocityField(
            u=u, ux=grids.spectral_derivative(u, state.grid), method="ccf-" + method
        )
    if method == "mollified":
        return biotsavart.velocity_mollified(state.omega, state.grid, model.a_layer)
    if method in ("spectral", "direct-quadrature"):
        return biotsavart.velocity_periodic(
            state.omega, state.grid, "spectral" if method == "spectral" else "direct"
        )
    raise ParameterError(f"unknown Biot-Savart method {method!r}")


def rhs(model: ModelSpec, state):
    """Tendencies (d omega/dt, d theta/dt) or (d Omega/dt, d Theta/dt)."""
    if model.domain == "periodic":
        if not isinstance(state, FieldState):
            raise InvalidDataError("periodic model needs a FieldState")
        return _rhs_periodic(model, state)
    if not isinstance(state, LogState):
        raise InvalidDataError("log-line model needs a LogState")
    return _rhs_log(model, state)


def _rhs_periodic(model: ModelSpec, state: FieldState, control: StepControl | None = None):
    grid = state.grid
    vel = velocity_for(model, state)
    omega_x = grids.spectral_derivative(state.omega, grid)
    theta_x = grids.spectral_derivative(state.theta, grid)
    use_dealias = control.dealias if control is not None else True

    def prod(a, b):
        p = a * b
        return grids.dealias(p, grid) if use_dealias else p

    name = model.model
    if name == "Euler2D":
        domega = -prod(vel.u, omega_x)
        dtheta = -prod(vel.u, theta_x)  # passive transport
    elif name == "CLM":
        domega = prod(vel.ux, state.omega)
        dtheta = np.zeros_like(state.theta)
    elif name == "DeGregorio":
        domega = -prod(vel.u, omega_x) + prod(vel.ux, state.omega)
        dtheta = np.zeros_like(state.theta)
    elif name == "OSW":
        domega = -model.a * prod(vel.u, omega_x) + prod(vel.ux, state.omega)
        dtheta = np.zeros_like(state.theta)
    elif name == "CCF":
        domega = -prod(vel.u, omega_x)
        dtheta = np.zeros_like(state.theta)
    elif name == "HL":
        domega = -prod(vel.u, omega_x) + theta_x
        dtheta = -prod(vel.u, theta_x)
    else:
        raise InvalidDataError(f"model {name} does not evolve on a periodic domain")
    return domega, dtheta


def _rhs_log(model: ModelSpec, state: LogState):
    if model.model not in ("HL", "CKY"):
        raise InvalidDataError(f"model {model.model} does not evolve in log coordinates")
    grid = state.grid
    kernel = "HL" if model.model == "HL" else "CKY"
    U = biotsavart.velocity_log_convolution(state.Omega, grid, kernel)
    Omega_xi = grids.fd_derivative(state.Omega, grid.h)
    Theta_xi = grids.fd_derivative(state.Theta, grid.h)
    dOmega = -U * Omega_xi + np.exp(grid.nodes) * Theta_xi
    dTheta = -U * Theta_xi
    return dOmega, dTheta


def _max_speed(model: ModelSpec, state) -> float:
    if model.domain == "periodic":
        vel = velocity_for(model, state)
        dx = state.grid.dx
        return float(max(np.max(np.abs(vel.u)), np.max(np.abs(vel.ux)) * dx))
    kernel = "HL" if model.model == "HL" else "CKY"
    U = biotsavart.velocity_log_convolution(state.Omega, state.grid, kernel)
    return float(np.max(np.abs(U)))


def step(state, dt: float, model: ModelSpec, control: StepControl | None = None):
    """One classical RK4 step; re-normalizes theta and re-projects symmetry."""
    if dt <= 0:
        raise ParameterError("dt must be positive")
    control = control or StepControl()

    if model.domain == "periodic":

        def f(s: FieldState):
            return _rhs_periodic(model, s, control)

        def advance(s: FieldState, do, dtheta, w):
            return replace(s, omega=s.omega + w * do, theta=s.theta + w * dtheta)

    else:

        def f(s: LogState):
            return _rhs_log(model, s)

        def advance(s: LogState, do, dtheta, w):
            return replace(s, Omega=s.Omega + w * do, Theta=s.Theta + w * dtheta)

    k1 = f(state)
    k2 = f(advance(state, *k1, 0.5 * dt))
    k3 = f(advance(state, *k2, 0.5 * dt))
    k4 = f(advance(state, *k3, dt))
    do = (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0]) / 6.0
    dth = (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1]) / 6.0
    out = advance(state, do, dth, dt)

    if model.domain == "periodic":
        theta = out.theta - out.theta[0]
        out = replace(out, t=state.t + dt, theta=theta)
        if control.symmetric:
            out = fields.enforce_symmetry(out)
    else:
        rho = grids.fd_derivative(out.Theta, out.grid.h)
        out = replace(out, t=state.t + dt, rho=rho)
    return out


def _log_tail_fraction(state: LogState) -> float:
    """Spectral-tail proxy on the xi-line: FFT of Omega and rho on the grid.

    Compactly supported data decay at both edges, so a periodic extension
    is adequate as an aliasing detector.  Monitoring rho as well as Omega
    matters: the transported density steepens first and starts undershooting
    zero once its gradient is no longer representable.
    """
    g = grids.PeriodicGrid(L=state.grid.xi_max - state.grid.xi_min, N=state.grid.M - 1)
    return max(
        grids.tail_fraction(state.Omega[:-1], g).tail_fraction,
        grids.tail_fraction(state.rho[:-1], g).tail_fraction,
    )


def run(
    model: ModelSpec,
    state0,
    control: StepControl,
    t_end: float,
    record_every: int = 1,
    diagnostics_fn: Callable | None = None,
    max_steps: int = 10_000_000,
    resume_records: list | None = None,
) -> Trajectory:
    """Integrate to t_end with CFL stepping, recording every record_every steps.

    diagnostics_fn(state, context) -> dict is evaluated at record times; the
    context carries the running step size and previously recorded rows so
    time-integrated diagnostics can accumulate.  Passing resume_records
    continues a checkpointed run: the prior rows seed the accumulators and
    state0 (the checkpointed state, already recorded) is not re-recorded.
    """
    state = state0.copy()
    eps = 1e-12
    states = []
    records = resume_records if resume_records is not None else []
    termination = "time-reached"
    ctx = {"dt": 0.0, "records": records, "model": model, "control": control}

    def record(s):
        states.append(s.copy())
        if diagnostics_fn is not None:
            records.append(diagnostics_fn(s, ctx))
        else:
            records.append({"t": s.t})

    def lost_resolution(s) -> bool:
        if model.domain != "periodic":
            if _log_tail_fraction(s) > control.tail_threshold:
                return True
            # the continuum transports rho >= 0; a discrete undershoot past
            # this fraction of the peak means the front is no longer resolved
            peak = float(np.max(s.rho))
            return peak > 0 and float(np.min(s.rho)) < -control.undershoot_tolerance * peak
        if not control.dealias:
            tf = grids.tail_fraction(s.omega, s.grid).tail_fraction
        else:
            tf = grids.resolved_band_tail_fraction(s.omega, s.grid)
        return tf > control.tail_threshold

    if resume_records is None:
        record(state)
    nsteps = 0
    while state.t < t_end - 1e-14 and nsteps < max_steps:
        speed = _max_speed(model, state)
        dx = state.grid.dx if model.domain == "periodic" else state.grid.h
        dt = min(control.dt_max, control.cfl * dx / max(speed, eps))
        if dt < control.dt_min:
            termination = "cfl-floor"
            break
        dt = min(dt, t_end - state.t)
        ctx["dt"] = dt
        new_state = step(state, dt, model, control)
        nsteps += 1
        arrays = (
            (new_state.omega, new_state.theta)
            if model.domain == "periodic"
            else (new_state.Omega, new_state.Theta)
        )
        if not all(np.all(np.isfinite(a)) for a in arrays):
            termination = "nan-detected"
            break
        state = new_state
        if nsteps % record_every == 0:
            record(state)
        if lost_resolution(state):
            termination = "resolution-lost"
            break
    last_t = states[-1].t if states else (records[-1]["t"] if records else -np.inf)
    if last_t < state.t - 1e-15:
        record(state)
    return Trajectory(
        states=states,
        records=records,
        termination=termination,
        t_final=float(state.t),
        steps=nsteps,
    )
