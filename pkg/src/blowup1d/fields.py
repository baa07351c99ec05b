"""Field states, the odd/even symmetry class, presets, and log coordinates.

The admissible class throughout is: omega and theta_x odd about x = 0 (and
therefore about x = L/2), theta(0) = 0, and omega, theta_x >= 0 on
[0, L/2].  The logarithmic change of variables x = exp(-xi) maps the
half-period onto the line and turns both Biot-Savart laws into
convolutions.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from . import grids
from .errors import (
    DomainError,
    InvalidDataError,
    NormalizationError,
    UnknownPresetError,
)
from .grids import LogGrid, PeriodicGrid


@dataclass(frozen=True)
class FieldState:
    """Time-stamped (omega, theta) samples on a periodic grid."""

    t: float
    omega: np.ndarray
    theta: np.ndarray
    grid: PeriodicGrid

    def copy(self) -> "FieldState":
        return replace(self, omega=self.omega.copy(), theta=self.theta.copy())


@dataclass(frozen=True)
class LogState:
    """(Omega, Theta, rho) in logarithmic coordinates xi = -log x.

    Omega(xi) = omega(exp(-xi)), Theta(xi) = -theta(exp(-xi)) + theta(0),
    rho = Theta_xi.  mass stores the trapezoid integral of rho at creation
    time (conserved by the continuity equation).
    """

    t: float
    Omega: np.ndarray
    Theta: np.ndarray
    rho: np.ndarray
    grid: LogGrid
    mass: float = field(default=0.0)

    def copy(self) -> "LogState":
        return replace(
            self, Omega=self.Omega.copy(), Theta=self.Theta.copy(), rho=self.rho.copy()
        )


MODEL_NAMES = ("Euler2D", "CLM", "DeGregorio", "OSW", "CCF", "HL", "CKY")


@dataclass(frozen=True)
class ModelSpec:
    """Which dynamical equations and which Biot-Savart law to evolve."""

    model: str
    a: float = 1.0  # OSW transport coefficient
    domain: str = "periodic"  # "periodic" | "log-line"
    biot_savart_method: str = "spectral"  # "spectral" | "direct-quadrature" | "mollified"
    a_layer: float = 0.0  # boundary-layer thickness for the mollified kernel

    def __post_init__(self):
        if self.model not in MODEL_NAMES:
            raise InvalidDataError(f"unknown model {self.model!r}; choose from {MODEL_NAMES}")
        if self.domain not in ("periodic", "log-line"):
            raise InvalidDataError(f"unknown domain {self.domain!r}")
        if self.model == "CKY" and self.domain != "log-line":
            raise InvalidDataError("CKY evolution runs in log coordinates (domain='log-line')")
        if self.biot_savart_method == "mollified" and self.a_layer <= 0:
            raise InvalidDataError("mollified Biot-Savart needs a_layer > 0")


def _reflect(f: np.ndarray) -> np.ndarray:
    """Samples of f(-x) on the same periodic grid."""
    n = f.size
    return f[(-np.arange(n)) % n]


def enforce_symmetry(state: FieldState) -> FieldState:
    """Project onto the symmetry class; idempotent.

    omega goes to its odd part about x = 0 (periodicity then makes it odd
    about L/2 as well), theta to its even part with theta(0) reset to 0.
    """
    omega = 0.5 * (state.omega - _reflect(state.omega))
    theta = 0.5 * (state.theta + _reflect(state.theta))
    theta = theta - theta[0]
    return replace(state, omega=omega, theta=theta)


def symmetry_defect(state: FieldState) -> float:
    """Max-norm distance from the symmetry class (0 for admissible states)."""
    d_omega = np.max(np.abs(state.omega + _reflect(state.omega)))
    d_theta = np.max(np.abs(state.theta - _reflect(state.theta)))
    return float(max(d_omega, d_theta, abs(state.theta[0])))


def smooth_bump(x: np.ndarray, center: float, radius: float) -> np.ndarray:
    """C-infinity bump exp(1 - 1/(1 - s^2)) on |s| < 1, s = (x-center)/radius."""
    s = (np.asarray(x, dtype=float) - center) / radius
    out = np.zeros_like(s)
    inside = np.abs(s) < 1.0
    with np.errstate(divide="ignore", over="ignore"):
        out[inside] = np.exp(1.0 - 1.0 / (1.0 - s[inside] ** 2))
    return out


def preset_initial_data(name: str, grid: PeriodicGrid, params: dict | None = None) -> FieldState:
    """Construct admissible initial data.

    presets:
      paper-basic     omega0 = A sin(2 mu x), theta0 = B sin^2(mu x)
      quarter-support smooth odd bumps with omega0, theta0x supported in
                      (0, L/4) u (3L/4, L)
      custom-modes    omega0 = sum a_m sin(2 m mu x),
                      theta0 = sum b_m sin^2(m mu x)
    """
    params = dict(params or {})
    x = grid.nodes
    mu = grid.mu

    if name == "paper-basic":
        A = float(params.get("A", 1.0))
        B = float(params.get("B", 1.0))
        if A < 0 or B < 0:
            raise InvalidDataError("paper-basic requires A, B >= 0 (sign conditions)")
        omega = A * np.sin(2 * mu * x)
        theta = B * np.sin(mu * x) ** 2
    elif name == "quarter-support":
        A = float(params.get("A", 1.0))
        B = float(params.get("B", 1.0))
        if A < 0 or B < 0:
            raise InvalidDataError("quarter-support requires A, B >= 0")
        c = grid.L / 8.0
        r = float(params.get("radius", 0.9)) * grid.L / 8.0
        bump = smooth_bump(x, c, r)
        omega = A * (bump - _reflect(bump))
        theta_x = B * (bump - _reflect(bump))
        theta = grids.spectral_antiderivative(theta_x, grid)
        theta = theta - theta[0]
    elif name == "custom-modes":
        a_modes = np.atleast_1d(np.asarray(params.get("omega_modes", [1.0]), dtype=float))
        b_modes = np.atleast_1d(np.asarray(params.get("theta_modes", [1.0]), dtype=float))
        omega = np.zeros_like(x)
        theta = np.zeros_like(x)
        for m, a in enumerate(a_modes, start=1):
            omega += a * np.sin(2 * m * mu * x)
        for m, b in enumerate(b_modes, start=1):
            theta += b * np.sin(m * mu * x) ** 2
    else:
        raise UnknownPresetError(f"unknown preset {name!r}")

    state = FieldState(t=0.0, omega=omega, theta=theta, grid=grid)
    _check_admissible(state)
    return state


def _check_admissible(state: FieldState, tol: float = 1e-12) -> None:
    grid = state.grid
    half = slice(0, grid.N // 2 + 1)
    theta_x = grids.spectral_derivative(state.theta, grid)
    scale = max(np.max(np.abs(state.omega)), np.max(np.abs(theta_x)), 1.0)
    if np.min(state.omega[half]) < -1e-10 * scale:
        raise InvalidDataError("omega0 must be >= 0 on [0, L/2]")
    if np.min(theta_x[half]) < -1e-10 * scale:
        raise InvalidDataError("theta0_x must be >= 0 on [0, L/2]")
    if symmetry_defect(state) > 1e-10 * scale:
        raise InvalidDataError("initial data outside the odd/even symmetry class")


def random_admissible_omega(grid: PeriodicGrid, rng, n_bumps: int = 3) -> np.ndarray:
    """Random vorticity in the admissible class: odd, >= 0 on [0, L/2].

    Sum of positive-amplitude smooth bumps with random centers and radii
    inside (0, L/2), odd-reflected across x = 0.
    """
    x = grid.nodes
    half = grid.L / 2
    out = np.zeros(grid.N)
    for _ in range(n_bumps):
        center = rng.uniform(0.1 * half, 0.9 * half)
        radius = rng.uniform(0.05 * half, min(center, half - center))
        out += rng.uniform(0.2, 2.0) * smooth_bump(x, center, radius)
    return out - _reflect(out)


def random_log_bumps(grid: LogGrid, rng, n_bumps: int = 3, margin: float = 0.1) -> np.ndarray:
    """Random nonnegative Omega compactly supported inside the xi grid."""
    xi = grid.nodes
    span = grid.xi_max - grid.xi_min
    lo = grid.xi_min + margin * span
    hi = grid.xi_max - margin * span
    out = np.zeros(grid.M)
    for _ in range(n_bumps):
        center = rng.uniform(lo + 0.05 * span, hi - 0.05 * span)
        radius = rng.uniform(0.02 * span, min(center - lo, hi - center))
        out += rng.uniform(0.2, 2.0) * smooth_bump(xi, center, radius)
    return out


def to_log_coordinates(state: FieldState, grid_out: LogGrid) -> LogState:
    """Map a periodic state restricted to (0, L/2] into log coordinates.

    Requires exp(-xi_min) <= L/2 so all requested x fall in the half
    period, and theta(0) = 0.
    """
    if abs(state.theta[0]) > 1e-10 * max(1.0, np.max(np.abs(state.theta))):
        raise NormalizationError("theta(0) must vanish before the log-coordinate map")
    x_req = np.exp(-grid_out.nodes)
    if np.max(x_req) > state.grid.L / 2 * (1 + 1e-12):
        raise DomainError(
            f"exp(-xi_min) = {np.max(x_req):.6g} exceeds L/2 = {state.grid.L / 2:.6g}"
        )
    Omega = grids.trig_interpolate(state.omega, state.grid, x_req)
    Theta = -grids.trig_interpolate(state.theta, state.grid, x_req)
    rho = grids.fd_derivative(Theta, grid_out.h)
    mass = float(np.trapezoid(rho, dx=grid_out.h))
    return LogState(t=state.t, Omega=Omega, Theta=Theta, rho=rho, grid=grid_out, mass=mass)


def preset_log_initial_data(name: str, grid: LogGrid, params: dict | None = None) -> LogState:
    """Admissible initial data directly on the xi-line.

    presets:
      entropy-basic  rho0 = unit-mass smooth bump in (0, inf),
                     Omega0 = amplitude * smooth bump; Theta0 from the
                     right-tail integral of rho0.
    """
    params = dict(params or {})
    xi = grid.nodes
    if name != "entropy-basic":
        raise UnknownPresetError(f"unknown log-line preset {name!r}")
    rho_c = float(params.get("rho_center", 2.0))
    rho_r = float(params.get("rho_radius", 1.0))
    om_c = float(params.get("omega_center", 2.0))
    om_r = float(params.get("omega_radius", 1.0))
    amp = float(params.get("omega_amplitude", 1.0))
    if amp < 0:
        raise InvalidDataError("omega_amplitude must be >= 0")
    if rho_c - rho_r < grid.xi_min or rho_c + rho_r > grid.xi_max:
        raise DomainError("rho bump support must lie inside the xi grid")
    rho = smooth_bump(xi, rho_c, rho_r)
    rho /= np.trapezoid(rho, dx=grid.h)
    Omega = amp * smooth_bump(xi, om_c, om_r)
    # Theta(xi) = -int_xi^inf rho, right tail of rho vanishes inside the grid
    from scipy.integrate import cumulative_trapezoid

    tail = cumulative_trapezoid(rho[::-1], dx=grid.h, initial=0.0)[::-1]
    Theta = -tail
    return LogState(t=0.0, Omega=Omega, Theta=Theta, rho=rho, grid=grid, mass=1.0)
