import numpy as np
import pytest

from blowup1d import fields, grids
from blowup1d.errors import DomainError, InvalidDataError, UnknownPresetError


@pytest.fixture
def grid():
    return grids.make_periodic_grid(2 * np.pi, 256)


def test_paper_basic_values(grid):
    st = fields.preset_initial_data("paper-basic", grid, {"A": 1.0, "B": 1.0})
    i = grid.N // 4  # x = pi/2
    assert st.omega[i] == pytest.approx(1.0, abs=1e-14)
    assert st.theta[0] == 0.0
    assert fields.symmetry_defect(st) < 1e-14


def test_paper_basic_amplitude_scaling(grid):
    st = fields.preset_initial_data("paper-basic", grid, {"A": 0.25, "B": 2.0})
    assert np.max(np.abs(st.omega)) == pytest.approx(0.25, abs=1e-14)
    assert np.max(st.theta) == pytest.approx(2.0, abs=1e-13)


def test_paper_basic_rejects_negative_amplitude(grid):
    with pytest.raises(InvalidDataError):
        fields.preset_initial_data("paper-basic", grid, {"A": -1.0})


def test_quarter_support_confined(grid):
    st = fields.preset_initial_data("quarter-support", grid)
    x = grid.nodes
    outer = (x >= grid.L / 4) & (x <= grid.L / 2)
    assert np.max(np.abs(st.omega[outer])) < 1e-14
    assert fields.symmetry_defect(st) < 1e-12


def test_unknown_preset(grid):
    with pytest.raises(UnknownPresetError):
        fields.preset_initial_data("bogus", grid)


def test_custom_modes_admissible(grid):
    st = fields.preset_initial_data(
        "custom-modes", grid, {"omega_modes": [1.0, 0.3], "theta_modes": [1.0]}
    )
    half = slice(0, grid.N // 2 + 1)
    assert np.min(st.omega[half]) > -1e-12
    assert fields.symmetry_defect(st) < 1e-12


def test_enforce_symmetry_fixed_point(grid):
    st = fields.preset_initial_data("paper-basic", grid)
    st2 = fields.enforce_symmetry(st)
    assert np.max(np.abs(st2.omega - st.omega)) < 1e-15
    assert np.max(np.abs(st2.theta - st.theta)) < 1e-15


def test_enforce_symmetry_removes_constant(grid):
    st = fields.preset_initial_data("paper-basic", grid)
    dirty = fields.FieldState(
        t=0.0, omega=st.omega + 0.1, theta=st.theta, grid=grid
    )
    clean = fields.enforce_symmetry(dirty)
    assert fields.symmetry_defect(clean) < 1e-14
    assert np.max(np.abs(clean.omega - st.omega)) < 1e-14


def test_enforce_symmetry_idempotent(grid):
    rng = np.random.default_rng(7)
    dirty = fields.FieldState(
        t=0.0,
        omega=rng.standard_normal(grid.N),
        theta=rng.standard_normal(grid.N),
        grid=grid,
    )
    once = fields.enforce_symmetry(dirty)
    twice = fields.enforce_symmetry(once)
    assert np.max(np.abs(twice.omega - once.omega)) < 1e-15
    assert np.max(np.abs(twice.theta - once.theta)) < 1e-15


def test_modelspec_validation():
    with pytest.raises(InvalidDataError):
        fields.ModelSpec(model="nope")
    with pytest.raises(InvalidDataError):
        fields.ModelSpec(model="CKY", domain="periodic")
    with pytest.raises(InvalidDataError):
        fields.ModelSpec(model="HL", biot_savart_method="mollified", a_layer=0.0)


def test_to_log_coordinates_round_trip(grid):
    st = fields.preset_initial_data("paper-basic", grid)
    lg = grids.make_log_grid(0.0, 8.0, 512)
    ls = fields.to_log_coordinates(st, lg)
    x = np.exp(-lg.nodes)
    assert np.max(np.abs(ls.Omega - np.sin(2 * grid.mu * x))) < 1e-8
    assert np.max(np.abs(-ls.Theta - np.sin(grid.mu * x) ** 2)) < 1e-8


def test_to_log_coordinates_rho_is_x_thetax(grid):
    # rho = Theta_xi equals x theta_x(x) under xi = -log x
    st = fields.preset_initial_data("paper-basic", grid)
    lg = grids.make_log_grid(0.0, 8.0, 1024)
    ls = fields.to_log_coordinates(st, lg)
    x = np.exp(-lg.nodes)
    exact = x * np.sin(2 * grid.mu * x) * grid.mu  # d/dx sin^2(mu x) = mu sin(2 mu x)
    interior = slice(4, -4)
    rel = np.max(np.abs(ls.rho[interior] - exact[interior])) / np.max(np.abs(exact))
    assert rel < 1e-6


def test_to_log_coordinates_domain_error(grid):
    st = fields.preset_initial_data("paper-basic", grid)
    with pytest.raises(DomainError):
        fields.to_log_coordinates(st, grids.make_log_grid(-2.0, 8.0, 256))


def test_log_preset_unit_mass_and_signs():
    lg = grids.make_log_grid(-2.0, 14.0, 512)
    ls = fields.preset_log_initial_data("entropy-basic", lg)
    assert ls.mass == pytest.approx(1.0)
    assert np.trapezoid(ls.rho, dx=lg.h) == pytest.approx(1.0, abs=1e-12)
    assert np.min(ls.rho) >= 0.0
    assert np.max(ls.Theta) <= 1e-12
    assert np.min(ls.Omega) >= 0.0
    # Theta(xi_max) -> 0 and Theta(xi_min) -> -mass
    assert abs(ls.Theta[-1]) < 1e-12
    assert ls.Theta[0] == pytest.approx(-1.0, abs=1e-12)


def test_log_preset_support_must_fit():
    lg = grids.make_log_grid(-2.0, 14.0, 512)
    with pytest.raises(DomainError):
        fields.preset_log_initial_data("entropy-basic", lg, {"rho_center": 14.0})


def test_random_admissible_omega_in_class(grid):
    rng = np.random.default_rng(11)
    for _ in range(5):
        omega = fields.random_admissible_omega(grid, rng)
        half = slice(0, grid.N // 2 + 1)
        assert np.min(omega[half]) > -1e-14
        st = fields.FieldState(t=0.0, omega=omega, theta=np.zeros(grid.N), grid=grid)
        assert fields.symmetry_defect(st) < 1e-12


def test_random_admissible_omega_seeded():
    g = grids.make_periodic_grid(2 * np.pi, 128)
    a = fields.random_admissible_omega(g, np.random.default_rng(5))
    b = fields.random_admissible_omega(g, np.random.default_rng(5))
    assert np.array_equal(a, b)


def test_random_log_bumps_compact_and_nonnegative():
    lg = grids.make_log_grid(-6.0, 10.0, 512)
    rng = np.random.default_rng(2)
    for _ in range(5):
        om = fields.random_log_bumps(lg, rng)
        assert np.min(om) >= 0.0
        assert om[0] == 0.0 and om[-1] == 0.0
