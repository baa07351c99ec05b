"""Velocity reconstruction laws: spectral fast paths plus quadrature oracles.

Covers the periodic Hilbert transform u_x = H omega (also the CCF velocity
u = H omega), the periodic log-sin convolution u = Q omega, the half-line
kernel representation u cot(mu x), the CKY integral law, the log-coordinate
convolutions, and the mollified boundary-layer kernel.

Every law has one production path (Fourier multiplier where possible) and
one independent direct-quadrature path used as an oracle in the tests.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.integrate import cumulative_trapezoid, quad

from . import grids, kernels
from .errors import DomainError, ParameterError, QuadratureSingularError, ShapeError
from .grids import LogGrid, PeriodicGrid


@dataclass(frozen=True)
class VelocityField:
    """Velocity samples u and their derivative u_x, tagged by method."""

    u: np.ndarray
    ux: np.ndarray
    method: str


def hilbert_ux(omega: np.ndarray, grid: PeriodicGrid, method: str = "spectral") -> np.ndarray:
    """Periodic Hilbert transform H omega (the velocity gradient u_x).

    spectral: conjugate-function multiplier -i sign(n), mean mode dropped.
    direct:   O(N^2) principal-value trapezoid on the cot kernel using the
              alternating-node rule (sum over nodes an odd number of
              spacings away, double weight), which is exact for resolved
              trigonometric polynomials; the naive skipped-node rule is
              only first-order accurate for this kernel.
    """
    omega = np.asarray(omega, dtype=float)
    if omega.shape != (grid.N,):
        raise ShapeError(f"expected {grid.N} samples, got {omega.shape}")
    if method == "spectral":
        oh = np.fft.fft(omega)
        n = grid.mode_numbers()
        return np.real(np.fft.ifft(-1j * np.sign(n) * oh))
    if method == "direct":
        N, L, mu = grid.N, grid.L, grid.mu
        m = np.arange(1, N, 2)  # odd offsets
        cot = 1.0 / np.tan(mu * m * (L / N))
        out = np.empty(N)
        for i in range(N):
            out[i] = np.dot(omega[(i - m) % N], cot)
        return out * (2.0 / N)
    raise ParameterError(f"unknown Hilbert method {method!r}")


def _logsin_diag_cell(grid: PeriodicGrid) -> float:
    """Exact integral of log|sin(mu t)| over one grid cell centered at 0."""
    return _logsin_cell_cached(grid.L, grid.N)


@lru_cache(maxsize=32)
def _logsin_cell_cached(L: float, N: int) -> float:
    mu = np.pi / L
    h = L / N
    val, _ = quad(lambda t: np.log(np.abs(np.sin(mu * t))), 0.0, h / 2, points=[0.0])
    return 2.0 * val


def velocity_periodic(
    omega: np.ndarray, grid: PeriodicGrid, method: str = "spectral"
) -> VelocityField:
    """u(x) = (1/pi) int_0^L omega(y) log|sin(mu (x-y))| dy.

    spectral: multiplier -L/(2 pi |n|) on mode n != 0 (Fourier series of
    log|sin|), and -(L log 2)/pi on the mean mode.
    direct: trapezoid with the singular node replaced by the analytic cell
    integral of log|sin| over one spacing.
    """
    omega = np.asarray(omega, dtype=float)
    if omega.shape != (grid.N,):
        raise ShapeError(f"expected {grid.N} samples, got {omega.shape}")
    if method == "spectral":
        oh = np.fft.fft(omega)
        n = grid.mode_numbers()
        mult = np.zeros(grid.N)
        mult[0] = -grid.L * np.log(2.0) / np.pi
        nz = n != 0
        mult[nz] = -grid.L / (2.0 * np.pi * np.abs(n[nz]))
        u = np.real(np.fft.ifft(mult * oh))
    elif method == "direct":
        N, L, mu = grid.N, grid.L, grid.mu
        h = L / N
        lag = np.arange(N) * h
        kvals = np.empty(N)
        kvals[1:] = np.log(np.abs(np.sin(mu * lag[1:])))
        kvals[0] = _logsin_diag_cell(grid) / h
        out = np.empty(N)
        for i in range(N):
            out[i] = np.dot(omega, kvals[(i - np.arange(N)) % N])
        u = out * h / np.pi
    else:
        raise ParameterError(f"unknown velocity method {method!r}")
    ux = grids.spectral_derivative(u, grid) if method == "spectral" else hilbert_ux(
        omega, grid, "direct"
    )
    return VelocityField(u=u, ux=ux, method=method)


def velocity_halfline_representation(omega: np.ndarray, grid: PeriodicGrid, x: float) -> float:
    """u(x) cot(mu x) as the half-line kernel integral at a single point.

    Evaluates -(1/pi) int_0^{L/2} K(x, y) omega(y) cot(mu y) dy with
    adaptive quadrature split at the log singularity y = x; omega enters
    through its trigonometric interpolant.
    """
    L = grid.L
    mu = grid.mu
    if not (0.0 < x < L / 2):
        raise DomainError(f"x = {x} outside (0, L/2)")

    def integrand(y: float) -> float:
        if y <= 0.0 or y >= L / 2 or abs(y - x) < 1e-14 * L:
            return 0.0
        w = float(grids.trig_interpolate(omega, grid, np.array([y]))[0])
        s = np.tan(mu * y) / np.tan(mu * x)
        K = s * np.log(abs((s + 1.0) / (s - 1.0)))
        return K * w / np.tan(mu * y)

    import warnings
    from scipy.integrate import IntegrationWarning

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", IntegrationWarning)
        val, _ = quad(integrand, 0.0, L / 2, points=[x], limit=400)
    return -val / np.pi


@lru_cache(maxsize=16)
def _logsin_cell_averages(L: float, N: int) -> np.ndarray:
    """Cell averages of log|sin(mu t)| over cells m = 0..N-1 of width h = L/N.

    Uses the closed form int_0^t log|sin(mu s)| ds = -t log 2 - Cl2(2 mu t)/(2 mu)
    with the Clausen function Cl2, so every weight is exact.
    """
    import mpmath

    mu = np.pi / L
    h = L / N
    edges = (np.arange(N) + 0.5) * h  # half-integer multiples of h

    def F(t: float) -> float:
        return -t * np.log(2.0) - float(mpmath.clsin(2, 2.0 * mu * t)) / (2.0 * mu)

    Fe = np.array([F(t) for t in edges])
    a = np.empty(N)
    a[0] = 2.0 * Fe[0] / h  # central cell, F is odd
    a[1:] = np.diff(Fe) / h
    return a


@lru_cache(maxsize=16)
def halfline_kernel_matrix(grid: PeriodicGrid) -> np.ndarray:
    """Product-integration matrix for the odd-reflection velocity form.

    A[i, j] approximates the cell integral of
    log|sin(mu (x_i - y))| - log|sin(mu (x_i + y))| around y_j; both
    factors are log-sin at integer lags, so the exact cell averages apply
    to every entry.  Rows and columns run over interior half-period nodes.
    """
    N = grid.N
    a = _logsin_cell_averages(grid.L, N)
    idx = np.arange(1, N // 2)
    return a[np.abs(idx[:, None] - idx[None, :])] - a[idx[:, None] + idx[None, :]]


def halfline_velocity_profile(omega: np.ndarray, grid: PeriodicGrid) -> np.ndarray:
    """u cot(mu x) on the interior half-period nodes via matrix quadrature.

    Equivalent to the K(x, y) kernel integral (the kernel form is obtained
    from the odd reflection identity), but numerically uniform down to
    x -> 0.  The matrix is cached per grid; used for quadratic-form sweeps
    where per-point adaptive quadrature would be too slow.
    """
    N = grid.N
    x = grid.nodes[1 : N // 2]
    w = np.asarray(omega, dtype=float)[1 : N // 2]
    A = halfline_kernel_matrix(grid)
    u = (A @ w) * (grid.L / N) / np.pi
    return u / np.tan(grid.mu * x)


def velocity_cky(omega: np.ndarray, x: np.ndarray) -> VelocityField:
    """CKY law u(x) = -x int_x^{x_max} omega(y)/y dy on samples over (0, x_max].

    Cumulative trapezoid from the right; requires omega/y integrable at the
    left end of the sample range.
    """
    x = np.asarray(x, dtype=float)
    omega = np.asarray(omega, dtype=float)
    if omega.shape != x.shape:
        raise ShapeError("omega and x must have matching shapes")
    if np.any(x <= 0):
        raise DomainError("CKY samples must lie in (0, x_max]")
    integrand = omega / x
    peak = np.max(np.abs(omega)) + 1e-300
    if abs(omega[0]) > 1e-8 * peak and abs(integrand[0]) > 1e10 * peak / x[-1]:
        raise QuadratureSingularError("omega/y not integrable near 0")
    # tail_i = int_{x_i}^{x_max} omega/y dy via cumulative trapezoid from the right
    rev = cumulative_trapezoid(integrand[::-1], x[::-1], initial=0.0)[::-1]
    tail = -rev  # reversed axis runs downward, flip orientation
    u = -x * tail
    # d(u/x)/dx = omega/x by construction; expose ux by differentiation
    ux = np.gradient(u, x, edge_order=2)
    return VelocityField(u=u, ux=ux, method="cky")


@lru_cache(maxsize=32)
def _hl_log_kernel_weights(h: float, n_cells: int = 3) -> np.ndarray:
    """Exact cell averages of K_log over the 2*n_cells+1 cells nearest 0."""
    out = np.empty(2 * n_cells + 1)
    for m in range(-n_cells, n_cells + 1):
        lo, hi = (m - 0.5) * h, (m + 0.5) * h
        pts = [0.0] if lo < 0.0 < hi else None
        val, _ = quad(kernels.K_log_unchecked, lo, hi, points=pts, limit=200)
        out[m + n_cells] = val / h
    return out


def velocity_log_convolution(
    Omega: np.ndarray, grid: LogGrid, kernel: str = "HL"
) -> np.ndarray:
    """U = K * Omega on the xi-line.

    HL: discrete convolution with K(xi) = (1/pi) M(exp(-xi)); the log
    singularity at lag 0 and its neighbors use exact cell averages of K,
    which restores second-order accuracy at the diagonal.  The constant
    right tail K -> 2/pi is carried by the kernel values themselves, so
    mass to the left of a point contributes exactly (2/pi) * mass in the
    large-separation limit.

    CKY: U(xi) = (2/pi) * cumulative integral of Omega from the left.
    """
    Omega = np.asarray(Omega, dtype=float)
    if Omega.shape != (grid.M,):
        raise ShapeError(f"expected {grid.M} samples, got {Omega.shape}")
    h = grid.h
    if kernel == "CKY":
        return (2.0 / np.pi) * cumulative_trapezoid(Omega, dx=h, initial=0.0)
    if kernel != "HL":
        raise ParameterError(f"unknown log-line kernel {kernel!r}")
    M = grid.M
    lags = np.arange(-(M - 1), M) * h
    kv = np.empty(lags.shape)
    nz = np.abs(lags) > 1e-300
    kv[nz] = kernels.K_log(lags[nz])
    n_cells = 3
    cell = _hl_log_kernel_weights(h, n_cells)
    kv[M - 1 - n_cells : M + n_cells] = cell
    # U_i = h * sum_j kv[i - j + M - 1] * Omega_j  (discrete convolution)
    return np.convolve(kv, Omega, mode="valid") * h


def mollified_kernel(x, a_layer: float):
    """Boundary-layer kernel (1/pi) log(|x| / sqrt(x^2 + a^2)); negative, -> 0 at inf."""
    if a_layer <= 0:
        raise ParameterError("a_layer must be positive")
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore"):
        out = np.log(np.abs(x) / np.sqrt(x * x + a_layer * a_layer)) / np.pi
    return out


def velocity_mollified(
    omega: np.ndarray, grid: PeriodicGrid, a_layer: float, n_images: int = 6
) -> VelocityField:
    """Convolution with the mollified kernel, periodized over nearest images.

    The kernel decays like -a^2/(2 pi x^2), so the image sum converges
    quadratically in the number of images retained.
    """
    if a_layer <= 0:
        raise ParameterError("a_layer must be positive")
    omega = np.asarray(omega, dtype=float)
    if omega.shape != (grid.N,):
        raise ShapeError(f"expected {grid.N} samples, got {omega.shape}")
    N, L = grid.N, grid.L
    h = L / N
    lag = np.arange(N) * h
    lag = (lag + L / 2) % L - L / 2  # minimal image, so the periodized kernel is even
    kvals = np.zeros(N)
    for m in range(-n_images, n_images + 1):
        d = lag + m * L
        contrib = mollified_kernel(d, a_layer)
        contrib[~np.isfinite(contrib)] = 0.0  # log|0| image at the node itself
        kvals += contrib
    u = np.empty(N)
    for i in range(N):
        u[i] = np.dot(omega, kvals[(i - np.arange(N)) % N])
    u *= h
    ux = grids.spectral_derivative(u, grid)
    return VelocityField(u=u, ux=ux, method="mollified")
