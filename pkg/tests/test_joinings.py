from fractions import Fraction

import pytest

from rank1lab.construction import stage_geometry, toy, utv1
from rank1lab.joinings import (
    JoiningCombination,
    combination_value,
    delta_shift,
    partial_joining,
    domination_witness,
)
from rank1lab.tower import LevelSet, intersect, measure

TOY = toy()
UTV = utv1()
E2 = LevelSet.base(UTV, 2)
GRID = [
    (LevelSet.single(UTV, 2, i), LevelSet.single(UTV, 2, k))
    for i in range(5)
    for k in range(5)
]


def test_delta_shift_zero_is_diagonal():
    a = LevelSet.from_levels(UTV, 2, [0, 2])
    b = LevelSet.from_levels(UTV, 2, [2, 4])
    assert delta_shift(a, b, 0).value == measure(intersect(a, b))


def test_delta_shift_toy_example():
    e1 = LevelSet.base(TOY, 1)
    assert delta_shift(e1, e1, -1).value == Fraction(1, 2)


def test_delta_shift_disjoint_is_zero():
    a = LevelSet.single(UTV, 2, 0)
    b = LevelSet.single(UTV, 2, 3)
    assert delta_shift(a, b, 0).value == 0


def test_partial_joining_toy_example():
    e1 = LevelSet.base(TOY, 1)
    assert partial_joining(e1, e1, 1, 2).value == Fraction(1, 2)


def test_partial_joining_k_zero_covers_tower():
    a = LevelSet.from_levels(UTV, 2, [0, 1, 4])
    b = LevelSet.from_levels(UTV, 2, [1, 4])
    assert partial_joining(a, b, 0, 5).value == measure(intersect(a, b))


def test_partial_joining_zero_when_full_joining_zero():
    a = LevelSet.single(UTV, 2, 0)
    b = LevelSet.single(UTV, 2, 3)
    for j in range(2, 6):
        assert partial_joining(a, b, 1, j).value == 0


def test_partial_joining_bounds_and_rejections():
    with pytest.raises(ValueError, match="exceeds"):
        partial_joining(E2, E2, 10, 2)  # h_2 = 6
    with pytest.raises(ValueError, match="representable"):
        partial_joining(LevelSet.base(UTV, 4), E2, 1, 3)
    with pytest.raises(ValueError):
        partial_joining(E2, LevelSet.base(TOY, 2), 1, 3)


@pytest.mark.parametrize("k", range(-5, 6))
def test_partial_joining_monotone_and_bounded(k):
    for a, b in GRID[:7]:
        full = delta_shift(a, b, k)
        previous = Fraction(0)
        for j in range(2, 7):
            value = partial_joining(a, b, k, j).value
            assert previous <= value <= full.hi
            previous = value
        assert value == full.value  # exhausted by stage 6


@pytest.mark.parametrize("k", [-5, -2, 0, 1, 4])
def test_delta_symmetry(k):
    for a, b in GRID[:9]:
        left = delta_shift(a, b, k)
        right = delta_shift(b, a, -k)
        assert (left.lo, left.hi) == (right.lo, right.hi)


def test_projection_onto_full_tower():
    # with T^k A inside the stage-4 tower, Delta^k(A x X_4) recovers mu(A)
    full = LevelSet.full_tower(UTV, 4)
    for k in (0, 1, 3):
        assert delta_shift(E2, full, k).value == measure(E2)
        assert delta_shift(full, E2, -k).value == measure(E2)


def test_combination_point_mass_and_mean():
    point = JoiningCombination.from_dict(4, {0: Fraction(1)})
    assert combination_value(point, E2, E2).value == partial_joining(E2, E2, 0, 4).value
    uniform = JoiningCombination.from_dict(
        4, {-1: Fraction(1, 3), 0: Fraction(1, 3), 1: Fraction(1, 3)}
    )
    expected = sum(
        (partial_joining(E2, E2, k, 4).value for k in (-1, 0, 1)), Fraction(0)
    ) / 3
    assert combination_value(uniform, E2, E2).value == expected


def test_combination_linearity_against_direct_sum():
    h5 = stage_geometry(UTV, 5).h
    comb = JoiningCombination.from_dict(6, {0: Fraction(1, 2), h5: Fraction(1, 2)})
    direct = (
        partial_joining(E2, E2, 0, 6).value + partial_joining(E2, E2, h5, 6).value
    ) / 2
    assert combination_value(comb, E2, E2).value == direct


def test_combination_weight_validation():
    with pytest.raises(ValueError, match="sum"):
        JoiningCombination.from_dict(4, {0: Fraction(1, 2)})
    with pytest.raises(ValueError):
        JoiningCombination.from_dict(4, {0: Fraction(3, 2), 1: Fraction(-1, 2)})
    with pytest.raises(ValueError, match="duplicate"):
        JoiningCombination(4, ((0, Fraction(1, 2)), (0, Fraction(1, 2))))


def test_witness_halving_identity_gives_zero_margin():
    h5 = stage_geometry(UTV, 5).h
    assert delta_shift(E2, E2, h5).value == delta_shift(E2, E2, 0).value / 2


@pytest.mark.parametrize("m", [0, 1, -2])
def test_witness_passes_on_grid(m):
    report = domination_witness(UTV, m, GRID, range(4, 7))
    assert report.passed and not report.vacuous
    for row in report.rows:
        assert row.margin_lo == row.margin_hi == 0
        # ties prefer the escaping shift m +- h_j over the degenerate k = m
        h_j = stage_geometry(UTV, row.j).h
        assert row.k_chosen in (m + h_j, m - h_j)
        assert abs(row.k_chosen) == h_j + abs(m)


def test_witness_empty_grid_is_flagged_vacuous():
    report = domination_witness(UTV, 0, [], range(4, 6))
    assert report.passed and report.vacuous
    assert all(row.k_chosen is None for row in report.rows)


def test_witness_zero_base_rectangles_pass_trivially():
    # rectangles with Delta^m(A x B) = 0 admit any shift
    grid = [(LevelSet.single(UTV, 2, 0), LevelSet.single(UTV, 2, 5))]
    report = domination_witness(UTV, 0, grid, range(4, 6))
    assert report.passed
    for row in report.rows:
        assert row.margin_lo >= 0


def test_witness_row_json_uses_decimal_strings():
    report = domination_witness(UTV, 0, GRID[:3], range(4, 5))
    row = report.rows[0].to_json()
    assert set(row) == {"j", "k_chosen", "margin_lo", "margin_hi"}
    assert isinstance(row["k_chosen"], str)
