import math
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from rank1lab.construction import (
    ConstructionParams,
    CutRule,
    InvalidConstructionError,
    SpacerRule,
    block_sequence,
    condition_star_check,
    family,
    infinite_measure_partial_sum,
    params_from_config,
    params_to_config,
    scaled,
    stage_geometry,
    thm2,
    toy,
    utv1,
)


def test_toy_stage_four():
    geom = stage_geometry(toy(), 4)
    assert geom.h == 15
    assert geom.level_width == Fraction(1, 8)


def test_utv1_stage_five():
    assert stage_geometry(utv1(), 5).h == 720


def test_stage_one_is_base_case():
    params = toy()
    geom = stage_geometry(params, 1)
    assert geom.h == params.h1
    assert geom.level_width == params.base_width
    assert geom.column_offsets == (0, 1)  # spacers (0, 1) on height 1


def test_utv1_heights_are_factorials():
    params = utv1()
    for j in range(1, 13):
        assert stage_geometry(params, j).h == math.factorial(j + 1)


def test_scaled_two_doubles_reference_heights():
    doubled = scaled(2)
    reference = utv1()
    for j in range(1, 10):
        assert stage_geometry(doubled, j).h == 2 * stage_geometry(reference, j).h


def test_scaled_three_halves():
    params = scaled(Fraction(3, 2))
    for j in range(1, 9):
        expected = -((-3 * math.factorial(j + 1)) // 2)
        assert stage_geometry(params, j).h == expected


def test_scaled_too_close_to_one_rejected():
    params = scaled(Fraction(7, 6))
    with pytest.raises(InvalidConstructionError, match="scaled target"):
        stage_geometry(params, 2)


def test_scaled_requires_a_above_one():
    with pytest.raises(InvalidConstructionError):
        scaled(1)


def test_thm2_requires_n_at_least_two():
    with pytest.raises(InvalidConstructionError):
        thm2(1)


def test_thm2_spacer_vector_shape():
    geom = stage_geometry(thm2(3), 4)
    assert geom.r == 4
    assert geom.spacers == (0, 0, block_sequence(4), 4 * geom.h)


def test_block_sequence_prefix():
    prefix = [block_sequence(j) for j in range(1, 15)]
    assert prefix == [1, 2, 1, 2, 3, 1, 2, 3, 4, 1, 2, 3, 4, 5]


def test_cut_count_below_two_rejected():
    with pytest.raises(InvalidConstructionError):
        CutRule("constant", 1)


def test_growing_cut_rule():
    params = ConstructionParams(
        h1=1, cuts=CutRule("j_plus", 1), spacer_tail=(SpacerRule("constant", 1),)
    )
    for j in range(1, 6):
        geom = stage_geometry(params, j)
        assert geom.r == j + 1
        nxt = stage_geometry(params, j + 1)
        assert nxt.h == geom.h * geom.r + sum(geom.spacers)


def test_spacer_tail_longer_than_columns_rejected():
    params = ConstructionParams(
        h1=1,
        cuts=CutRule("constant", 2),
        spacer_tail=(SpacerRule("zero"), SpacerRule("zero"), SpacerRule("zero")),
    )
    with pytest.raises(InvalidConstructionError, match="columns"):
        stage_geometry(params, 1)


_spacer_rules = st.sampled_from(
    [
        SpacerRule("zero"),
        SpacerRule("constant", 1),
        SpacerRule("constant", 2),
        SpacerRule("linear", 1),
        SpacerRule("j_times_h"),
        SpacerRule("times_height", 1),
    ]
)


@st.composite
def _params(draw):
    h1 = draw(st.integers(min_value=1, max_value=3))
    r = draw(st.integers(min_value=2, max_value=3))
    tail = tuple(draw(st.lists(_spacer_rules, min_size=1, max_size=r)))
    width = draw(st.sampled_from([Fraction(1), Fraction(2, 3), Fraction(5)]))
    return ConstructionParams(
        h1=h1, cuts=CutRule("constant", r), spacer_tail=tail, base_width=width
    )


@settings(max_examples=60, deadline=None)
@given(_params(), st.integers(min_value=1, max_value=5))
def test_height_recursion_invariant(params, j):
    geom = stage_geometry(params, j)
    nxt = stage_geometry(params, j + 1)
    assert nxt.h == geom.h * geom.r + sum(geom.spacers)
    assert nxt.level_width == geom.level_width / geom.r
    assert nxt.space_measure >= geom.space_measure


@settings(max_examples=60, deadline=None)
@given(_params(), st.integers(min_value=1, max_value=5))
def test_column_offsets_telescope(params, j):
    geom = stage_geometry(params, j)
    offsets = geom.column_offsets
    assert offsets[0] == 0
    for i in range(len(offsets) - 1):
        assert offsets[i + 1] - offsets[i] == geom.h + geom.spacers[i]
    assert geom.next_height == offsets[-1] + geom.h + geom.spacers[-1]


@pytest.mark.parametrize("params", [toy(), utv1(), thm2(2)])
def test_width_times_subdivision_is_base_width(params):
    subdivision = 1
    for j in range(1, 11):
        geom = stage_geometry(params, j)
        assert geom.level_width * subdivision == params.base_width
        subdivision *= geom.r


def test_partial_sum_toy():
    report = infinite_measure_partial_sum(toy(), 3)
    assert report.total == Fraction(31, 42)
    assert report.terms == (Fraction(1, 2), Fraction(1, 6), Fraction(1, 14))


def test_partial_sum_utv1():
    assert infinite_measure_partial_sum(utv1(), 3).total == 3


def test_partial_sum_zero_spacers():
    params = ConstructionParams(
        h1=2, cuts=CutRule("constant", 2), spacer_tail=(SpacerRule("zero"),)
    )
    report = infinite_measure_partial_sum(params, 5)
    assert report.total == 0
    assert not report.diverging


def test_divergence_heuristic_separates_families():
    assert infinite_measure_partial_sum(utv1(), 12).diverging
    assert not infinite_measure_partial_sum(toy(), 12).diverging


def test_condition_star_utv1_passes():
    report = condition_star_check(utv1(), 6)
    assert report.passed
    assert [chain[0] for chain in report.chains] == [Fraction(1, j) for j in range(1, 7)]


def test_condition_star_toy_fails():
    report = condition_star_check(toy(), 6)
    assert not report.passed
    assert not report.violations  # ratios grow, but nothing is structurally invalid


def test_condition_star_nonzero_first_spacer_is_violation():
    params = ConstructionParams(
        h1=1,
        cuts=CutRule("constant", 2),
        spacer_tail=(SpacerRule("constant", 1), SpacerRule("j_times_h")),
    )
    report = condition_star_check(params, 4)
    assert any("s_1(1)" in v or "(1) != 0" in v for v in report.violations)
    assert not report.passed


def test_condition_star_zero_interior_spacer_reported_not_raised():
    params = ConstructionParams(
        h1=1,
        cuts=CutRule("constant", 3),
        spacer_tail=(SpacerRule("zero"), SpacerRule("zero"), SpacerRule("j_times_h")),
    )
    report = condition_star_check(params, 4)
    assert any("zero interior" in v for v in report.violations)


def test_condition_star_requires_constant_cuts():
    params = ConstructionParams(
        h1=1, cuts=CutRule("j_plus", 1), spacer_tail=(SpacerRule("constant", 1),)
    )
    with pytest.raises(ValueError, match="constant cut count"):
        condition_star_check(params, 4)


def test_family_config_roundtrip():
    assert params_from_config({"family": "utv1"}) == utv1()
    assert params_from_config({"family": "thm2", "N": 2}) == thm2(2)
    assert params_from_config({"family": "scaled", "a": "3/2"}) == scaled(Fraction(3, 2))


def test_explicit_config_example():
    config = {
        "h1": 1,
        "base_width": "1/1",
        "stages": {"r": 2, "spacers": ["zero", {"rule": "j_times_h"}]},
    }
    params = params_from_config(config)
    assert params.h1 == 1
    assert stage_geometry(params, 2).h == 3  # 1*2 + 1*1


def test_config_roundtrip_explicit_form():
    for params in (toy(), utv1(), thm2(2), scaled(2)):
        assert params_from_config(params_to_config(params)) == params


def test_config_unknown_keys_rejected():
    with pytest.raises(InvalidConstructionError, match="unknown"):
        params_from_config({"family": "toy", "extra": 1})
    with pytest.raises(InvalidConstructionError, match="unknown"):
        params_from_config({"h1": 1, "stages": {"r": 2, "spacers": []}, "oops": 0})
    with pytest.raises(InvalidConstructionError, match="unknown"):
        params_from_config({"h1": 1, "stages": {"r": 2, "spacers": [{"rule": "zero", "x": 1}]}})


def test_config_big_integers_as_strings():
    params = params_from_config(
        {"h1": str(10**30), "stages": {"r": 2, "spacers": ["zero"]}}
    )
    assert params.h1 == 10**30


def test_unknown_family_rejected():
    with pytest.raises(InvalidConstructionError):
        family("chacon")


def test_geometry_rejects_stage_zero():
    with pytest.raises(ValueError):
        stage_geometry(toy(), 0)
