import math

import numpy as np
import pytest

from vexnorm.errors import ArgumentError, DataError, ResourceError
from vexnorm.grid import (
    GridFunction,
    build_grid,
    characteristic_ball,
    characteristic_shell,
    indicator,
    restrict_to_mask,
    restrict_to_shell,
    shell_index,
)


def test_shell_index_is_exact_at_powers_of_two():
    r = np.array([0.5, 0.75, 1.0, 1.5, 2.0, 3.0, 2.0 ** -10])
    np.testing.assert_array_equal(shell_index(r), [-1, 0, 0, 1, 1, 2, -10])


def test_build_grid_layout(grid_1d):
    assert grid_1d.shape == (512,)
    assert grid_1d.h == 2.0 ** -5
    assert grid_1d.axis[0] == -8.0 + grid_1d.h / 2
    assert list(grid_1d.shells) == [-3, -2, -1, 0, 1, 2, 3]


def test_core_is_excluded(grid_1d, grid_2d):
    for grid in (grid_1d, grid_2d):
        assert np.all(grid.radius[grid.mask] > 2.0 ** grid.k_min)
        assert np.all(grid.radius[grid.mask] <= 2.0 ** grid.k_max)


def test_every_domain_cell_has_exactly_one_shell(grid_2d):
    counts = sum(grid_2d.shell_mask(k).astype(int) for k in grid_2d.shells)
    np.testing.assert_array_equal(counts, grid_2d.mask.astype(int))


def test_shell_measure_1d(grid_1d):
    for k in grid_1d.shells:
        exact = 2.0 * (2.0 ** k - 2.0 ** (k - 1))
        assert grid_1d.measure(grid_1d.shell_mask(k)) == pytest.approx(exact, rel=0.02)


def test_shell_measure_2d():
    grid = build_grid(2, -3, 2, 8)
    for k in (0, 1, 2):
        exact = math.pi * (4.0 ** k - 4.0 ** (k - 1))
        assert grid.measure(grid.shell_mask(k)) == pytest.approx(exact, rel=0.02)


def test_refined_and_widened(grid_1d):
    fine = grid_1d.refined()
    assert fine.level == grid_1d.level + 1
    assert fine.h == grid_1d.h / 2
    wide = grid_1d.widened()
    assert wide.k_max == grid_1d.k_max + 1
    assert wide.h == grid_1d.h


@pytest.mark.parametrize("args", [(3, -1, 1, 4), (1, 2, 2, 4), (1, 3, 1, 4), (1, -1, 1, 0)])
def test_build_grid_rejects_bad_arguments(args):
    with pytest.raises(ArgumentError):
        build_grid(*args)


def test_build_grid_budget():
    with pytest.raises(ResourceError):
        build_grid(2, -2, 2, 10, max_cells=1000)


def test_restrict_to_shell(grid_1d, rng):
    f = GridFunction(grid_1d, rng.normal(size=grid_1d.shape))
    piece = restrict_to_shell(f, 1)
    inside = grid_1d.shell_mask(1)
    np.testing.assert_array_equal(piece.values[inside], f.values[inside])
    assert not np.any(piece.values[~inside])


def test_restrict_to_shell_out_of_range(grid_1d):
    f = GridFunction.constant(grid_1d, 1.0)
    with pytest.raises(ArgumentError):
        restrict_to_shell(f, grid_1d.k_min)
    with pytest.raises(ArgumentError):
        restrict_to_shell(f, grid_1d.k_max + 1)


def test_characteristic_ball(grid_1d):
    chi = characteristic_ball(grid_1d, 0)
    assert chi.integral() == pytest.approx(2.0 * (1.0 - 2.0 ** -4))
    with pytest.raises(ArgumentError):
        characteristic_ball(grid_1d, 7)


def test_characteristic_shell_partitions_ball(grid_1d):
    total = sum(characteristic_shell(grid_1d, k).values for k in range(-3, 2))
    np.testing.assert_array_equal(total, characteristic_ball(grid_1d, 1).values)


def test_grid_function_zero_off_domain(grid_1d):
    f = GridFunction.constant(grid_1d, 2.0)
    assert np.all(f.values[~grid_1d.mask] == 0.0)
    assert f.sup() == 2.0


def test_grid_function_rejects_non_finite(grid_1d):
    values = np.ones(grid_1d.shape)
    values[np.argmax(grid_1d.mask)] = np.nan
    with pytest.raises(DataError):
        GridFunction(grid_1d, values)


def test_grid_function_ignores_non_finite_off_domain(grid_1d):
    values = np.ones(grid_1d.shape)
    values[~grid_1d.mask] = np.inf
    assert GridFunction(grid_1d, values).sup() == 1.0


def test_grid_function_arithmetic_needs_same_grid(grid_1d, small_grid):
    with pytest.raises(ArgumentError):
        GridFunction.constant(grid_1d, 1.0) + GridFunction.constant(small_grid, 1.0)


def test_cells_carry_measure(small_grid):
    cells = small_grid.cells()
    assert len(cells) == small_grid.size
    assert all(m == small_grid.h for _, m in cells)


def test_identical_builds_order_cells_identically():
    a, b = build_grid(2, -3, 2, 6), build_grid(2, -3, 2, 6)
    assert a.cells() == b.cells()
    np.testing.assert_array_equal(a.points, b.points)


def test_integral_is_refinement_consistent(grid_1d):
    def bump(x):
        return np.exp(-np.sum(x ** 2, axis=1))

    coarse = GridFunction.sample(grid_1d, bump).integral()
    fine = GridFunction.sample(grid_1d.refined(), bump).integral()
    assert abs(fine - coarse) / coarse < 0.01


def test_restrict_to_mask_and_indicator(small_grid):
    mask = small_grid.radius <= 1.0
    chi = indicator(small_grid, mask)
    np.testing.assert_array_equal(chi.values, characteristic_ball(small_grid, 0).values)
    f = GridFunction.constant(small_grid, 3.0)
    np.testing.assert_array_equal(restrict_to_mask(f, mask).values, 3.0 * chi.values)
