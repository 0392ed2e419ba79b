import numpy as np
import pytest

from vexnorm.errors import ArgumentError, ConstructionError, DataError
from vexnorm.exponents import Constant, LogDecay
from vexnorm.families import (
    KINDS,
    Symbol,
    build_test_family,
    check_bmo_symbol,
    family_profiles,
    mixed_profiles,
    powerlaw_member,
)
from vexnorm.grid import build_grid


def test_shell_atoms(grid_1d):
    members = build_test_family("shell_atoms", grid_1d)
    assert len(members) == 6
    for k, f in zip(range(-3, 3), members):
        inside = grid_1d.shell_mask(k)
        assert np.all(f.values[inside] == 1.0)
        assert not np.any(f.values[~inside])


@pytest.mark.parametrize("kind", KINDS)
def test_members_live_in_the_inner_half(kind, grid_1d):
    support = 2.0 ** (grid_1d.k_max - 1)
    for f in build_test_family(kind, grid_1d, seed=4, size=6, q=Constant(2.0)):
        assert not np.any(f.values[grid_1d.radius > support])
        assert np.all(np.isfinite(f.values))


@pytest.mark.parametrize("kind", ["gaussians", "random_piecewise", "oscillatory"])
def test_families_are_deterministic(kind, grid_2d):
    a = build_test_family(kind, grid_2d, seed=7, size=5)
    b = build_test_family(kind, grid_2d, seed=7, size=5)
    c = build_test_family(kind, grid_2d, seed=8, size=5)
    assert len(a) == 5
    for fa, fb in zip(a, b):
        np.testing.assert_array_equal(fa.values, fb.values)
    assert any(not np.array_equal(fa.values, fc.values) for fa, fc in zip(a, c))


def test_profiles_sample_any_grid(grid_1d):
    member = family_profiles("gaussians", grid_1d, seed=1, size=1)[0]
    fine = member.on(grid_1d.refined())
    assert fine.grid.level == grid_1d.level + 1
    assert fine.sup() > 0.0


def test_unknown_kind(grid_1d):
    with pytest.raises(ArgumentError):
        family_profiles("wavelets", grid_1d)


def test_powerlaw_needs_exponent(grid_1d):
    with pytest.raises(ArgumentError):
        family_profiles("powerlaw", grid_1d)


def test_powerlaw_local_integrability(grid_1d):
    q = Constant(2.0)
    assert powerlaw_member(0.3, grid_1d, q).on(grid_1d).sup() > 0.0
    with pytest.raises(ConstructionError):
        powerlaw_member(0.5, grid_1d, q)
    with pytest.raises(ConstructionError):
        powerlaw_member(0.6, grid_1d, q)


def test_powerlaw_uses_the_sup_near_the_origin(grid_1d):
    # q_plus of logdecay(2, 1) is 3 at the origin
    with pytest.raises(ConstructionError):
        powerlaw_member(0.4, grid_1d, LogDecay(2.0, 1.0))


def test_mixed_profiles_split_the_size(grid_1d):
    members = mixed_profiles(["gaussians", "oscillatory"], grid_1d, seed=0, size=5)
    names = [m.name for m in members]
    assert len(members) == 5
    assert sum(name.startswith("gaussian") for name in names) == 3


def test_symbol_kinds(grid_1d):
    assert Symbol("constant").sample(grid_1d).sup() == 1.0
    assert Symbol("sign").scaled(3.0).sample(grid_1d).sup() == 3.0
    with pytest.raises(ArgumentError):
        Symbol("cubic")


def test_log_symbol_is_accepted():
    grid = build_grid(1, -4, 3, 7)
    assert check_bmo_symbol(Symbol("log"), grid) > 0.0


def test_constant_symbol_has_zero_oscillation():
    grid = build_grid(1, -4, 3, 7)
    assert check_bmo_symbol(Symbol("constant"), grid) == 0.0


def test_linear_symbol_is_rejected():
    grid = build_grid(1, -4, 3, 7)
    with pytest.raises(DataError):
        check_bmo_symbol(Symbol("linear"), grid)
