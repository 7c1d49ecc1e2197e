import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from codp import (
    Direction,
    FittedCostModel,
    build_fitted_model,
    fitted_total_cost,
    inventory_cost_delta,
    monotonicity_diagnostic,
    total_cost,
)
from codp.costs import component_series, residual_bound
from codp.exceptions import FlagOutsideLineError, OutOfFittedRangeError, PositionOutOfRangeError
from codp.fitting import Family, FittedCurve, fit_model
from conftest import raw_to_line, simple_line
from oracles import brute_force_codp, random_raw_line


def three_stage(**extra):
    return simple_line(
        [1, 1, 1],
        generic_unit_cost=[1, 2, 3],
        custom_unit_cost=[4, 5, 6],
        **extra,
    )


def test_null_economy():
    line = simple_line([1, 2, 3])
    b = total_cost(line, 2)
    assert (b.generic_processing, b.wip_holding, b.custom_incremental, b.reconfiguration, b.total) == (0, 0, 0, 0, 0)


@pytest.mark.parametrize("p, generic, custom, total", [(1, 1, 11, 12), (2, 3, 6, 9)])
def test_three_stage_enumeration(p, generic, custom, total):
    b = total_cost(three_stage(), p, recfg=set())
    assert b.generic_processing == generic
    assert b.custom_incremental == custom
    assert b.total == total


def test_volume_scales_processing_only():
    line = three_stage(modification_cost=[5, 5, 5], holding_cost=[1, 1, 1], std_inventory=[2, 2, 2])
    one = total_cost(line, 1, volume=1.0)
    ten = total_cost(line, 1, volume=10.0)
    assert ten.generic_processing == 10 * one.generic_processing
    assert ten.custom_incremental == 10 * one.custom_incremental
    assert ten.reconfiguration == one.reconfiguration
    assert ten.wip_holding == one.wip_holding


def test_default_reconfiguration_is_station_at_cut():
    line = simple_line([1, 1, 1, 1], modification_cost=[1, 10, 100, 1000])
    assert [total_cost(line, p).reconfiguration for p in (1, 2, 3)] == [1, 10, 100]


def test_explicit_reconfiguration_mapping_and_set():
    line = simple_line([1, 1, 1, 1], modification_cost=[1, 10, 100, 1000])
    assert total_cost(line, 1, {2: True, 3: False, 4: True}).reconfiguration == 1010
    assert total_cost(line, 1, [1, 3]).reconfiguration == 101
    assert total_cost(line, 1, set()).reconfiguration == 0
    with pytest.raises(FlagOutsideLineError):
        total_cost(line, 1, {5: True})


def test_position_checked():
    with pytest.raises(PositionOutOfRangeError):
        total_cost(three_stage(), 7)


def test_inventory_cost_delta_single_term():
    line = simple_line([1, 1], holding_cost=[2, 9], std_inventory=[10, 9], turnover=[4, 1])
    assert inventory_cost_delta(line, 1) == 5


def test_inventory_cost_delta_empty_shelves():
    line = simple_line([1, 1, 1], holding_cost=[2, 2, 2], turnover=[1, 2, 3])
    assert inventory_cost_delta(line, 3) == 0


def test_inventory_cost_delta_uses_adjustment():
    line = simple_line([1, 1], holding_cost=[2, 0], std_inventory=[10, 0], inventory_adjustment=[2, 0], turnover=[4, 1])
    assert inventory_cost_delta(line, 1) == 6


pos = st.floats(0.1, 10)


@given(st.lists(st.tuples(pos, pos, st.floats(-1, 5), pos), min_size=1, max_size=8), st.floats(0.5, 4))
def test_inventory_cost_delta_linearity(rows, k):
    n = len(rows)
    h, x, a, r = (list(col) for col in zip(*rows))
    base = simple_line([1.0] * n, holding_cost=h, std_inventory=x, inventory_adjustment=a, turnover=r)
    value = inventory_cost_delta(base, n)
    scaled_h = simple_line([1.0] * n, holding_cost=[k * v for v in h], std_inventory=x, inventory_adjustment=a, turnover=r)
    assert inventory_cost_delta(scaled_h, n) == pytest.approx(k * value, rel=1e-12, abs=1e-12)
    scaled_r = simple_line([1.0] * n, holding_cost=h, std_inventory=x, inventory_adjustment=a, turnover=[k * v for v in r])
    assert inventory_cost_delta(scaled_r, n) == pytest.approx(value / k, rel=1e-12, abs=1e-12)
    # linear in each stage's standard inventory
    bumped = simple_line([1.0] * n, holding_cost=h, std_inventory=[x[0] + 1] + x[1:], inventory_adjustment=a, turnover=r)
    assert inventory_cost_delta(bumped, n) - value == pytest.approx(h[0] / r[0], rel=1e-9, abs=1e-9)


def test_accounting_identity_random():
    rng = np.random.default_rng(5)
    for _ in range(500):
        raw = random_raw_line(rng)
        line = raw_to_line(raw)
        for p in range(0, line.n_stages + 1):
            b = total_cost(line, p, volume=float(rng.uniform(0.5, 3)))
            parts = b.generic_processing + b.wip_holding + b.custom_incremental + b.reconfiguration
            assert b.total == pytest.approx(parts, rel=1e-12, abs=0)


@given(st.lists(st.floats(0, 100), min_size=4, max_size=8), st.data())
def test_reconfiguration_additive_over_disjoint_sets(mods, data):
    line = simple_line([1.0] * len(mods), modification_cost=mods)
    idx = list(range(1, len(mods) + 1))
    a = set(data.draw(st.lists(st.sampled_from(idx), unique=True)))
    b = set(data.draw(st.lists(st.sampled_from([i for i in idx if i not in a] or [None]), unique=True))) - {None}
    ra = total_cost(line, 1, a).reconfiguration
    rb = total_cost(line, 1, b).reconfiguration
    assert total_cost(line, 1, a | b).reconfiguration == pytest.approx(ra + rb, rel=1e-12, abs=1e-12)


@given(st.lists(st.floats(0.1, 10), min_size=3, max_size=10), st.lists(st.floats(0.1, 10), min_size=3, max_size=10))
def test_processing_components_monotone(increments, customs):
    n = min(len(increments), len(customs))
    generic = list(np.cumsum(increments[:n]))  # strictly increasing
    line = simple_line([1.0] * n, generic_unit_cost=generic, custom_unit_cost=customs[:n])
    g = [total_cost(line, p).generic_processing for p in range(1, n + 1)]
    c = [total_cost(line, p).custom_incremental for p in range(1, n + 1)]
    assert all(b > a for a, b in zip(g, g[1:]))
    assert all(b < a for a, b in zip(c, c[1:]))


def test_brute_force_totals_match():
    rng = np.random.default_rng(11)
    for _ in range(200):
        raw = random_raw_line(rng)
        line = raw_to_line(raw)
        result = brute_force_codp(raw, deadline=1e9)
        if result is None:
            continue
        for p, expected in result[2].items():
            assert total_cost(line, p).total == expected


# fitted model

def test_fitted_null_model():
    zero = FittedCurve.constant(0.0)
    model = FittedCostModel(zero, zero, zero, (1.0, 2.0, 3.0), (0.0, 0.0, 0.0))
    for p in (1, 1.5, 2.25, 3):
        assert fitted_total_cost(model, p) == 0.0


def test_fitted_matches_discrete_within_residuals():
    line = simple_line(
        [1, 1, 1, 1, 1, 1],
        generic_unit_cost=[1, 2, 3, 5, 8, 13],
        custom_unit_cost=[9, 7, 6, 4, 2, 1],
        modification_cost=[1, 2, 4, 7, 11, 20],
        holding_cost=[1] * 6,
        std_inventory=[3] * 6,
        turnover=[2] * 6,
    )
    model = build_fitted_model(line)
    for p in (1, 2, 3, 4, 5):
        discrete = total_cost(line, p).total
        assert abs(fitted_total_cost(model, p) - discrete) <= residual_bound(model, p) + 1e-9


def test_fitted_three_stage_line():
    line = simple_line(
        [1, 1, 1, 1],
        generic_unit_cost=[1, 2, 3, 4],
        custom_unit_cost=[4, 5, 6, 7],
    )
    model = build_fitted_model(line)
    for p in (1, 2, 3):
        assert fitted_total_cost(model, p) == pytest.approx(total_cost(line, p).total, abs=1e-9)


def test_fitted_out_of_range(reference):
    line, _ = reference
    model = build_fitted_model(line)
    with pytest.raises(OutOfFittedRangeError):
        fitted_total_cost(model, 0.5)
    with pytest.raises(OutOfFittedRangeError):
        fitted_total_cost(model, line.frontier)


def test_component_series_covers_candidates(reference):
    line, _ = reference
    series = component_series(line)
    assert series["generic"].x == tuple(float(p) for p in range(1, line.frontier))


# monotonicity

def test_monotonicity_square_increasing():
    curve = FittedCurve(Family.QUADRATIC, (1.0, 0.0, 0.0), 1.0)
    rep = monotonicity_diagnostic(curve, 1, 5, Direction.INCREASING)
    assert rep.passed and rep.verdict == "PASS"


def test_monotonicity_decaying_exponential_fails_everywhere():
    curve = FittedCurve(Family.EXPONENTIAL, (1.0, -1.0), 1.0)
    rep = monotonicity_diagnostic(curve, 1, 5, "increasing")
    assert not rep.passed
    assert rep.violations == ((1.0, 5.0),)


def test_monotonicity_partial_violation():
    curve = FittedCurve(Family.QUADRATIC, (1.0, -6.0, 0.0), 1.0)  # vertex at 3
    rep = monotonicity_diagnostic(curve, 1, 5, "increasing")
    assert len(rep.violations) == 1
    start, end = rep.violations[0]
    assert start == 1.0 and end == pytest.approx(3.0, abs=4e-3)


def test_monotonicity_on_fitted_generic_curve(reference):
    line, _ = reference
    series = component_series(line)["generic"]
    curve = fit_model(series, "quadratic")
    assert monotonicity_diagnostic(curve, 1, line.frontier - 1, "increasing").passed
    custom = fit_model(component_series(line)["custom"], "quadratic")
    assert monotonicity_diagnostic(custom, 1, line.frontier - 1, "decreasing").passed


def test_monotonicity_bad_range():
    with pytest.raises(ValueError):
        monotonicity_diagnostic(FittedCurve.constant(1.0), 3, 3, "increasing")
