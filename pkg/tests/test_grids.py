import numpy as np
import pytest

from blowup1d import grids
from blowup1d.errors import GridError, ShapeError


def test_make_periodic_grid_basic():
    g = grids.make_periodic_grid(2 * np.pi, 8)
    assert np.allclose(g.nodes, np.arange(8) * np.pi / 4)
    assert g.mu == pytest.approx(0.5)


def test_make_periodic_grid_rejects_odd_n():
    with pytest.raises(GridError):
        grids.make_periodic_grid(2 * np.pi, 7)


def test_make_periodic_grid_rejects_bad_length():
    with pytest.raises(GridError):
        grids.make_periodic_grid(0.0, 64)
    with pytest.raises(GridError):
        grids.make_periodic_grid(-1.0, 64)


def test_make_periodic_grid_unit_period():
    g = grids.make_periodic_grid(1.0, 256)
    assert g.dx == pytest.approx(1.0 / 256)
    assert g.mu == pytest.approx(np.pi)


def test_make_log_grid_validation():
    g = grids.make_log_grid(-2.0, 14.0, 64)
    assert g.h == pytest.approx(16.0 / 63)
    with pytest.raises(GridError):
        grids.make_log_grid(3.0, 3.0, 64)
    with pytest.raises(GridError):
        grids.make_log_grid(0.0, 1.0, 8)


def test_spectral_derivative_single_mode():
    g = grids.make_periodic_grid(2 * np.pi, 64)
    x = g.nodes
    f = np.sin(2 * g.mu * x)  # sin(x) at L = 2 pi
    df = grids.spectral_derivative(f, g)
    assert np.max(np.abs(df - np.cos(x))) < 1e-12


def test_spectral_derivative_constant():
    g = grids.make_periodic_grid(2 * np.pi, 64)
    df = grids.spectral_derivative(np.full(64, 3.7), g)
    assert np.max(np.abs(df)) < 1e-14


def test_spectral_derivative_vs_fd_oracle():
    # exp(sin x) at N=128 against 4th-order centered differences at N=8192
    L = 2 * np.pi
    g = grids.make_periodic_grid(L, 128)
    f = np.exp(np.sin(g.nodes))
    df = grids.spectral_derivative(f, g)

    Nf = 8192
    xf = np.arange(Nf) * L / Nf
    ff = np.exp(np.sin(xf))
    h = L / Nf
    dff = (np.roll(ff, 2) - 8 * np.roll(ff, 1) + 8 * np.roll(ff, -1) - np.roll(ff, -2)) / (
        12 * h
    )
    stride = Nf // 128
    rel = np.max(np.abs(df - dff[::stride])) / np.max(np.abs(dff))
    assert rel < 1e-6


def test_spectral_derivative_linearity():
    rng = np.random.default_rng(3)
    g = grids.make_periodic_grid(2 * np.pi, 64)
    f1 = rng.standard_normal(64)
    f2 = rng.standard_normal(64)
    a, b = rng.standard_normal(2)
    lhs = grids.spectral_derivative(a * f1 + b * f2, g)
    rhs = a * grids.spectral_derivative(f1, g) + b * grids.spectral_derivative(f2, g)
    assert np.max(np.abs(lhs - rhs)) < 1e-12


def test_spectral_derivative_mode_eigenvalue():
    g = grids.make_periodic_grid(5.0, 64)
    k = 2 * np.pi * 7 / 5.0
    f = np.cos(k * g.nodes)
    df = grids.spectral_derivative(f, g)
    assert np.max(np.abs(df + k * np.sin(k * g.nodes))) < 1e-11


def test_spectral_derivative_shape_error():
    g = grids.make_periodic_grid(2 * np.pi, 64)
    with pytest.raises(ShapeError):
        grids.spectral_derivative(np.zeros(63), g)


def test_spectral_antiderivative_inverts_derivative():
    g = grids.make_periodic_grid(2 * np.pi, 128)
    f = np.sin(3 * g.nodes) + 0.4 * np.cos(5 * g.nodes)
    back = grids.spectral_derivative(grids.spectral_antiderivative(f, g), g)
    assert np.max(np.abs(back - f)) < 1e-12


def test_tail_fraction_low_mode_is_zero():
    g = grids.make_periodic_grid(2 * np.pi, 64)
    rep = grids.tail_fraction(np.sin(g.nodes), g)
    assert rep.tail_fraction == pytest.approx(0.0, abs=1e-20)


def test_tail_fraction_high_mode_is_one():
    g = grids.make_periodic_grid(2 * np.pi, 64)
    rep = grids.tail_fraction(np.cos(21 * g.nodes), g)
    assert rep.tail_fraction == pytest.approx(1.0)
    assert rep.max_wavenumber_active == 21


def test_tail_fraction_matches_direct_dft_sum():
    g = grids.make_periodic_grid(2 * np.pi, 128)
    f = np.exp(-50 * (g.nodes - np.pi) ** 2)
    rep = grids.tail_fraction(f, g)
    fh = np.fft.fft(f)
    n = g.mode_numbers()
    power = np.abs(fh) ** 2
    total = np.sum(power[n != 0])
    tail = np.sum(power[np.abs(n) >= grids.dealias_cutoff(128)])
    assert rep.tail_fraction == pytest.approx(tail / total, abs=1e-12)


def test_tail_fraction_constant_shift_invariant():
    g = grids.make_periodic_grid(2 * np.pi, 64)
    f = np.cos(21 * g.nodes)
    a = grids.tail_fraction(f, g).tail_fraction
    b = grids.tail_fraction(f + 5.0, g).tail_fraction
    assert a == pytest.approx(b, abs=1e-14)


def test_dealias_zeroes_top_third():
    g = grids.make_periodic_grid(2 * np.pi, 64)
    f = np.cos(21 * g.nodes) + np.sin(2 * g.nodes)
    fd = grids.dealias(f, g)
    assert np.max(np.abs(fd - np.sin(2 * g.nodes))) < 1e-12


def test_resolved_band_detector_sees_through_dealiasing():
    # after the 2/3-rule projection the plain detector is blind by construction
    g = grids.make_periodic_grid(2 * np.pi, 96)
    steep = 1.0 / (1.01 - np.cos(g.nodes))
    fd = grids.dealias(steep, g)
    assert grids.tail_fraction(fd, g).tail_fraction < 1e-25
    assert grids.resolved_band_tail_fraction(fd, g) > 1e-6


def test_resample_periodic_round_trip():
    g = grids.make_periodic_grid(2 * np.pi, 64)
    f = np.sin(3 * g.nodes) + 0.2 * np.cos(7 * g.nodes)
    up = grids.resample_periodic(f, g, 256)
    g2 = grids.PeriodicGrid(L=2 * np.pi, N=256)
    down = grids.resample_periodic(up, g2, 64)
    assert np.max(np.abs(down - f)) < 1e-12


def test_trig_interpolate_reproduces_nodes():
    g = grids.make_periodic_grid(2 * np.pi, 64)
    f = np.exp(np.sin(g.nodes))
    vals = grids.trig_interpolate(f, g, g.nodes)
    assert np.max(np.abs(vals - f)) < 1e-11


def test_trig_interpolate_off_nodes():
    g = grids.make_periodic_grid(2 * np.pi, 128)
    f = np.exp(np.sin(g.nodes))
    xq = np.array([0.1, 1.7, 5.3])
    assert np.max(np.abs(grids.trig_interpolate(f, g, xq) - np.exp(np.sin(xq)))) < 1e-10


def test_fd_derivative_fourth_order():
    errs = []
    for M in (201, 401):
        x = np.linspace(0.0, 3.0, M)
        h = x[1] - x[0]
        d = grids.fd_derivative(np.sin(x), h)
        errs.append(np.max(np.abs(d - np.cos(x))))
    ratio = errs[0] / errs[1]
    assert 10.0 < ratio < 25.0  # ~16 for a 4th-order scheme


def test_fd_derivative_needs_seven_samples():
    with pytest.raises(ShapeError):
        grids.fd_derivative(np.zeros(6), 0.1)
