import numpy as np
import pytest

from vexnorm.errors import ArgumentError
from vexnorm.exponents import Constant, GaussBump, LogDecay
from vexnorm.families import Symbol
from vexnorm.grid import GridFunction, build_grid, characteristic_shell
from vexnorm.norms import (
    HerzMorreyParams,
    bmo_norm,
    build_ball_family,
    classical_lp_norm,
    duality_products,
    herz_morrey_norm,
    herz_morrey_profile,
    herz_norm,
    holder_pair,
    luxemburg_norm,
    mean_on_set,
    modular,
    nested_ball_ratios,
)


EXPONENTS = [Constant(1.5), Constant(4.0), LogDecay(2.0, 1.0), GaussBump(1.5, 2.0, 1.0)]


def random_function(grid, rng):
    values = rng.normal(size=grid.shape) * (rng.uniform(size=grid.shape) < 0.6)
    values[np.argmax(grid.mask)] = 1.0
    return GridFunction(grid, values)


def test_luxemburg_of_zero(small_grid):
    assert luxemburg_norm(GridFunction.zeros(small_grid), LogDecay(2.0, 1.0)) == 0.0


def test_constant_exponent_matches_lp(small_grid, rng):
    for _ in range(50):
        f = random_function(small_grid, rng)
        p0 = rng.uniform(1.1, 6.0)
        assert luxemburg_norm(f, Constant(p0)) == pytest.approx(classical_lp_norm(f, p0), rel=1e-6)


@pytest.mark.parametrize("q", EXPONENTS, ids=repr)
def test_unit_modular_at_the_norm(q, small_grid, rng):
    for _ in range(50):
        f = random_function(small_grid, rng)
        rho = modular(f, q, luxemburg_norm(f, q))
        assert 1.0 - 1e-6 <= rho <= 1.0 + 1e-12


@pytest.mark.parametrize("q", EXPONENTS, ids=repr)
def test_homogeneity(q, small_grid, rng):
    f = random_function(small_grid, rng)
    base = luxemburg_norm(f, q)
    for c in (-3.0, 0.01, 250.0):
        assert luxemburg_norm(c * f, q) == pytest.approx(abs(c) * base, rel=1e-7)


@pytest.mark.parametrize("q", EXPONENTS, ids=repr)
def test_triangle_inequality(q, small_grid, rng):
    for _ in range(100):
        f, g = random_function(small_grid, rng), random_function(small_grid, rng)
        assert luxemburg_norm(f + g, q) <= (luxemburg_norm(f, q) + luxemburg_norm(g, q)) * (1.0 + 1e-7)


def test_modular_rejects_non_positive_eta(small_grid):
    with pytest.raises(ArgumentError):
        modular(GridFunction.constant(small_grid, 1.0), Constant(2.0), 0.0)


def test_holder_equality_case(grid_1d):
    f = GridFunction.sample(grid_1d, lambda x: ((x[:, 0] >= 0) & (x[:, 0] <= 1)).astype(float))
    pair = holder_pair(f, f, Constant(2.0))
    assert pair.lhs == pytest.approx(15.0 / 16.0)
    assert pair.rhs == pytest.approx(pair.lhs, rel=1e-7)


def test_holder_with_zero(small_grid):
    zero = GridFunction.zeros(small_grid)
    pair = holder_pair(zero, GridFunction.constant(small_grid, 1.0), LogDecay(2.0, 1.0))
    assert pair.lhs == 0.0 and pair.rhs == 0.0


def test_holder_random_trials(small_grid, rng):
    q = GaussBump(2.0, 0.5, 1.0)
    for _ in range(200):
        pair = holder_pair(random_function(small_grid, rng), random_function(small_grid, rng), q)
        assert pair.lhs <= pair.rhs + 1e-12


def test_mean_on_set():
    grid = build_grid(1, -8, 3, 11)
    assert mean_on_set(GridFunction.constant(grid, 3.0), grid.mask) == pytest.approx(3.0)
    x = GridFunction.sample(grid, lambda p: p[:, 0])
    unit = (grid.axis >= 0) & (grid.axis <= 1)
    assert mean_on_set(x, unit) == pytest.approx(0.5, abs=grid.h)


def test_mean_on_empty_set(small_grid):
    with pytest.raises(ArgumentError):
        mean_on_set(GridFunction.constant(small_grid, 1.0), np.zeros(small_grid.shape, dtype=bool))


def test_herz_morrey_without_lambda_is_herz(grid_1d, rng):
    q = LogDecay(2.0, 1.0)
    f = random_function(grid_1d, rng)
    for alpha in (-0.3, 0.0, 0.4):
        params = HerzMorreyParams(alpha=alpha, lam=0.0, p=1.5, q=q)
        assert herz_morrey_norm(f, params) == pytest.approx(herz_norm(f, q, alpha, 1.5), rel=1e-12)


def test_herz_morrey_of_a_shell_indicator(grid_1d):
    chi = characteristic_shell(grid_1d, 0)
    profile = herz_morrey_profile(chi, HerzMorreyParams(alpha=0.3, lam=0.2, p=1.0, q=Constant(3.0)))
    assert profile.value == pytest.approx(1.0, rel=1e-7)
    assert profile.k0 == 0


def test_herz_morrey_homogeneity(grid_1d, rng):
    params = HerzMorreyParams(alpha=0.2, lam=0.1, p=2.0, q=GaussBump(2.0, 0.5, 1.0))
    f = random_function(grid_1d, rng)
    assert herz_morrey_norm(-5.0 * f, params) == pytest.approx(5.0 * herz_morrey_norm(f, params), rel=1e-7)


def test_herz_morrey_params_validation():
    with pytest.raises(ArgumentError):
        HerzMorreyParams(alpha=0.0, lam=0.1, p=0.0, q=Constant(2.0))
    with pytest.raises(ArgumentError):
        HerzMorreyParams(alpha=0.0, lam=-0.1, p=1.0, q=Constant(2.0))


def test_bmo_of_constant(grid_1d):
    balls = build_ball_family(grid_1d)
    assert bmo_norm(GridFunction.constant(grid_1d, 4.0), balls) == 0.0


def test_bmo_of_sign(grid_1d):
    b = Symbol("sign").sample(grid_1d)
    assert bmo_norm(b, build_ball_family(grid_1d)) == pytest.approx(0.5)


def test_bmo_of_log_is_stable_in_the_box():
    small = build_grid(1, -4, 3, 8)
    large = build_grid(1, -4, 4, 9)
    base = bmo_norm(Symbol("log").sample(small), build_ball_family(small))
    wide = bmo_norm(Symbol("log").sample(large), build_ball_family(large))
    assert base > 0.0
    assert wide == pytest.approx(base, rel=0.10)


def test_ball_family_is_deterministic(grid_1d):
    a, b = build_ball_family(grid_1d, seed=3), build_ball_family(grid_1d, seed=3)
    np.testing.assert_array_equal(a.centers, b.centers)
    np.testing.assert_array_equal(a.radii, b.radii)
    assert np.all(a.centers[: len(grid_1d.shells) + 1] == 0.0)


def test_nested_ball_ratios_constant_exponent(grid_1d):
    measure_ratio, norm_ratio = nested_ball_ratios(Constant(3.0), grid_1d)
    np.testing.assert_allclose(norm_ratio, measure_ratio ** (1.0 / 3.0), rtol=1e-7)


def test_duality_products_constant_exponent(grid_1d):
    for value in duality_products(Constant(2.5), grid_1d).values():
        assert value == pytest.approx(1.0, rel=1e-7)


@pytest.mark.parametrize("q", [LogDecay(2.0, 1.0), GaussBump(2.0, 0.5, 1.0)], ids=repr)
def test_duality_products_are_bounded_and_refinement_stable(q):
    grid = build_grid(1, -6, 5, 12)
    base = duality_products(q, grid)
    fine = duality_products(q, grid.refined())
    assert sorted(base) == list(range(-5, 6))
    for k, value in base.items():
        assert 0.2 <= value <= 5.0
        assert abs(fine[k] - value) / value < 0.10
