import numpy as np
import pytest

from blowup1d import bounds
from blowup1d.errors import ParameterError


def test_closed_form_bound_reference_value():
    val = bounds.closed_form_bound(1.0, 1.0, 1.0)
    assert abs(val - (1.0 + 3.0 * 1.5 ** (-2.0 / 3.0))) < 1e-12


def test_closed_form_bound_validation():
    with pytest.raises(ParameterError):
        bounds.closed_form_bound(0.0, 1.0, 1.0)
    with pytest.raises(ParameterError):
        bounds.closed_form_bound(1.0, 1.0, -1.0)


def test_optimize_closed_form_bound_is_minimum():
    t0, val = bounds.optimize_closed_form_bound(1.0, 1.0, 50.0)
    for probe in (0.3, 1.0, 3.0, 10.0):
        assert val <= bounds.closed_form_bound(1.0, 1.0, probe) + 1e-12
    assert 0.0 < t0 <= 50.0


def test_h_comparison_first_integral():
    res = bounds.h_comparison_solution(1.0, 1.0, horizon=5.0)
    assert res["residual_max"] <= 1e-8
    assert res["capped"]


def test_gengron_envelope_blows_up_before_bound():
    rng = np.random.default_rng(0)
    for _ in range(10):
        I0 = rng.uniform(0.2, 3.0)
        c0 = rng.uniform(0.2, 3.0)
        env = bounds.gengron_envelope(I0, 0.0, c0, horizon=200.0)
        assert env["capped"]
        assert env["T_star"] <= env["T_star_upper"] + 1e-6


def test_gengron_envelope_monotone_in_c0():
    a = bounds.gengron_envelope(1.0, 0.0, 1.0, horizon=100.0)
    b = bounds.gengron_envelope(1.0, 0.0, 4.0, horizon=100.0)
    assert b["T_star"] < a["T_star"]


def test_gengron_envelope_nondecreasing_and_above_i0():
    env = bounds.gengron_envelope(1.0, 0.5, 1.0, horizon=10.0)
    assert np.min(np.diff(env["I_lower"])) >= -1e-12
    assert env["I_lower"][0] == pytest.approx(1.0)


def test_gengron_envelope_rejects_nonpositive_i0():
    with pytest.raises(ParameterError):
        bounds.gengron_envelope(0.0, 0.0, 1.0, horizon=1.0)


def test_entropy_envelope_initial_acceleration():
    # I0 = 1, Idot0 = 0: exponent e^{I-1} - I vanishes, so Iddot(0) = 2/pi
    env = bounds.entropy_envelope(1.0, 0.0, horizon=0.5)
    t, I = env["t"], env["I"]
    accel = 2 * (I[1] - I[0]) / (t[1] - t[0]) ** 2
    assert accel == pytest.approx(2.0 / np.pi, rel=1e-2)


def test_entropy_envelope_convex():
    env = bounds.entropy_envelope(1.0, 0.0, horizon=50.0)
    assert np.min(np.diff(env["I"], 2)) >= -1e-10


def test_entropy_envelope_monotone_in_i0():
    a = bounds.entropy_envelope(1.0, 0.0, horizon=50.0)
    b = bounds.entropy_envelope(2.0, 0.0, horizon=50.0)
    assert b["T_star"] < a["T_star"]


def test_fg_envelope_equilibrium():
    env = bounds.fg_envelope(0.0, 0.0, horizon=5.0)
    assert np.max(np.abs(env["F"])) == 0.0
    assert np.isinf(env["T_star"])


def test_fg_envelope_blowup_and_monotone_in_f0():
    a = bounds.fg_envelope(1.0, 0.0, horizon=100.0)
    b = bounds.fg_envelope(0.5, 0.0, horizon=100.0)
    assert np.isfinite(a["T_star"]) and np.isfinite(b["T_star"])
    assert a["T_star"] < b["T_star"]


def test_fg_envelope_g_nondecreasing():
    env = bounds.fg_envelope(1.0, 0.0, horizon=10.0)
    assert np.min(np.diff(env["G"])) >= -1e-12


def test_envelopes_sample_count_insensitive():
    # both sample the same dense solution; away from the cap the only
    # discrepancy is piecewise-linear interpolation between the two grids
    a = bounds.gengron_envelope(1.0, 0.0, 1.0, horizon=4.0, n_samples=256)
    b = bounds.gengron_envelope(1.0, 0.0, 1.0, horizon=4.0, n_samples=512)
    common = np.linspace(0.0, 2.5, 50)
    ia = np.interp(common, a["t"], a["I_lower"])
    ib = np.interp(common, b["t"], b["I_lower"])
    assert np.max(np.abs(ia - ib) / ib) < 1e-3
