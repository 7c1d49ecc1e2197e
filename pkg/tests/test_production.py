import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from codp import StageProfile, build_line, codp_candidates, custom_lead_time, generic_lead_time
from codp.exceptions import (
    EmptyLineError,
    FrontierOutOfRangeError,
    NegativeFieldError,
    NonContiguousIndicesError,
    PositionOutOfRangeError,
)
from conftest import simple_line
from oracles import prefix_time, suffix_time


def test_build_line_valid():
    line = simple_line([1, 2, 3, 4], frontier=3)
    assert line.n_stages == 4
    assert line.frontier == 3


def test_build_line_sorts_by_index():
    stages = [StageProfile(2, 3.0), StageProfile(1, 2.0)]
    line = build_line(stages, 2)
    assert [s.index for s in line.stages] == [1, 2]


def test_gap_in_indices():
    stages = [StageProfile(1, 1.0), StageProfile(2, 1.0), StageProfile(4, 1.0)]
    with pytest.raises(NonContiguousIndicesError):
        build_line(stages, 2)


def test_frontier_out_of_range():
    with pytest.raises(FrontierOutOfRangeError):
        simple_line([1, 1, 1, 1], frontier=9)
    with pytest.raises(FrontierOutOfRangeError):
        simple_line([1, 1], frontier=0)


def test_empty_line():
    with pytest.raises(EmptyLineError):
        build_line([], 1)


@pytest.mark.parametrize("field", ["time_mean", "time_std", "generic_unit_cost", "holding_cost", "std_inventory"])
def test_negative_field_names_stage_and_field(field):
    kwargs = {"time_mean": 1.0, field: -1.0}
    stages = [StageProfile(1, 1.0), StageProfile(2, **kwargs)]
    with pytest.raises(NegativeFieldError) as info:
        build_line(stages, 2)
    assert info.value.stage == 2
    assert info.value.field == field


def test_zero_turnover_rejected():
    with pytest.raises(NegativeFieldError) as info:
        build_line([StageProfile(1, 1.0, turnover=0.0)], 1)
    assert info.value.field == "turnover"


def test_negative_adjustment_allowed():
    line = build_line([StageProfile(1, 1.0, inventory_adjustment=-3.0)], 1)
    assert line.stage(1).inventory_adjustment == -3.0


@pytest.mark.parametrize(
    "n, frontier, expected",
    [(4, 3, [1, 2]), (4, 1, []), (12, 12, list(range(1, 12)))],
)
def test_codp_candidates(n, frontier, expected):
    assert codp_candidates(simple_line([1] * n, frontier=frontier)) == expected


def test_lead_times_examples():
    line = simple_line([2, 3, 4])
    assert custom_lead_time(line, 1) == 7
    assert custom_lead_time(line, 2) == 4
    assert custom_lead_time(line, 3) == 0
    assert generic_lead_time(line, 2) == 5
    assert generic_lead_time(line, 3) == 9
    assert generic_lead_time(simple_line([5, 1]), 1) == 5


def test_position_out_of_range():
    line = simple_line([2, 3, 4])
    with pytest.raises(PositionOutOfRangeError):
        custom_lead_time(line, 4)
    with pytest.raises(PositionOutOfRangeError):
        generic_lead_time(line, -1)


def test_numpy_integer_positions():
    line = simple_line([2, 3, 4])
    assert custom_lead_time(line, np.int64(1)) == 7


times_strategy = st.lists(st.integers(0, 50).map(float), min_size=2, max_size=12)


@given(times_strategy)
def test_prefix_plus_suffix_is_total(times):
    line = simple_line(times)
    total = sum(times)
    for p in range(0, len(times) + 1):
        assert generic_lead_time(line, p) + custom_lead_time(line, p) == total
        assert custom_lead_time(line, p) == suffix_time(times, p)
        assert generic_lead_time(line, p) == prefix_time(times, p)


@given(st.lists(st.floats(0.01, 100.0), min_size=2, max_size=12))
def test_custom_lead_time_strictly_decreasing(times):
    line = simple_line(times)
    values = [custom_lead_time(line, p) for p in range(len(times) + 1)]
    assert all(b < a for a, b in zip(values, values[1:]))


@given(st.integers(2, 12).flatmap(lambda n: st.tuples(st.just(n), st.integers(1, n))))
def test_candidate_count(nf):
    n, frontier = nf
    assert len(codp_candidates(simple_line([1.0] * n, frontier=frontier))) == frontier - 1


def test_swapping_stage_labels_leaves_lead_times_unchanged():
    a = [StageProfile(1, 2.0), StageProfile(2, 3.0), StageProfile(3, 4.0)]
    b = [StageProfile(3, 4.0), StageProfile(1, 2.0), StageProfile(2, 3.0)]
    la, lb = build_line(a, 3), build_line(b, 3)
    for p in range(4):
        assert custom_lead_time(la, p) == custom_lead_time(lb, p)
        assert generic_lead_time(la, p) == generic_lead_time(lb, p)


def test_line_is_immutable():
    line = simple_line([1, 2])
    with pytest.raises(Exception):
        line.personalization_frontier = 1
