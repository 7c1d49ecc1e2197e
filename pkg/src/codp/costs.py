"""Total-cost objective at a CODP position.

``total = generic processing + WIP holding + custom processing + reconfiguration``

Generic processing covers stages ``1..p``, custom processing stages
``p+1..N`` (both scaled by volume). WIP holding accrues on the push side:
``sum over i <= p of holding_cost * (std_inventory + inventory_adjustment) / turnover``. Reconfiguration sums the
modification cost of every flagged station.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Union

import numpy as np

from .exceptions import FlagOutsideLineError, OutOfFittedRangeError, ZeroTurnoverError
from .fitting import CostSeries, FittedCurve, select_model
from .production import ProductionLine, _check_position, codp_candidates

Reconfiguration = Union[Mapping[int, bool], Iterable[int], None]


@dataclass(frozen=True)
class CostBreakdown:
    position: int
    generic_processing: float
    wip_holding: float
    custom_incremental: float
    reconfiguration: float
    total: float

    def as_dict(self) -> dict:
        return {
            "position": self.position,
            "generic_processing": self.generic_processing,
            "wip_holding": self.wip_holding,
            "custom_incremental": self.custom_incremental,
            "reconfiguration": self.reconfiguration,
            "total": self.total,
        }


def default_reconfiguration(p: int) -> frozenset[int]:
    """Stations retooled when the buffer is cut in behind stage ``p``.

    Only the station at the cut is adjusted: it must deliver a standardized
    semi-finished product into the buffer.
    """
    return frozenset({p}) if p >= 1 else frozenset()


def reconfiguration_flags(line: ProductionLine, recfg: Reconfiguration, p: int) -> frozenset[int]:
    if recfg is None:
        return default_reconfiguration(p)
    if isinstance(recfg, Mapping):
        flagged = {int(k) for k, v in recfg.items() if v}
        keys = {int(k) for k in recfg}
    else:
        flagged = keys = {int(k) for k in recfg}
    outside = sorted(k for k in keys if not 1 <= k <= line.n_stages)
    if outside:
        raise FlagOutsideLineError(f"reconfiguration flags {outside} outside stages 1..{line.n_stages}")
    return frozenset(flagged)


def inventory_cost_delta(line: ProductionLine, p: int) -> float:
    _check_position(line, p)
    total = 0.0
    for st in line.stages[:p]:
        if st.turnover <= 0:
            raise ZeroTurnoverError(f"stage {st.index} has turnover {st.turnover}")
        total += st.holding_cost * (st.std_inventory + st.inventory_adjustment) / st.turnover
    return total


def total_cost(
    line: ProductionLine,
    p: int,
    recfg: Reconfiguration = None,
    volume: float = 1.0,
) -> CostBreakdown:
    """Cost decomposition with the CODP after stage ``p``.

    ``recfg`` is a set of flagged stage indices or a ``{index: bool}``
    mapping; ``None`` uses :func:`default_reconfiguration`.
    """
    _check_position(line, p)
    if not volume > 0:
        raise ValueError(f"volume must be > 0, got {volume!r}")
    flags = reconfiguration_flags(line, recfg, p)
    generic = 0.0
    for st in line.stages[:p]:
        generic += st.generic_unit_cost
    custom = 0.0
    for st in line.stages[p:]:
        custom += st.custom_unit_cost
    modification = 0.0
    for st in line.stages:
        if st.index in flags:
            modification += st.modification_cost
    generic *= volume
    custom *= volume
    holding = inventory_cost_delta(line, p)
    return CostBreakdown(p, generic, holding, custom, modification, generic + holding + custom + modification)


@dataclass(frozen=True)
class FittedCostModel:
    """Continuous cost model over the candidate range ``[lo, hi]``.

    The three curves stand for generic processing, custom processing and
    reconfiguration as functions of position; WIP holding is interpolated
    linearly between candidate positions. ``line`` (optional) lets the
    optimizer re-check integer neighbours against the discrete objective.
    """

    generic_curve: FittedCurve
    custom_curve: FittedCurve
    modification_curve: FittedCurve
    holding_positions: tuple[float, ...]
    holding_values: tuple[float, ...]
    line: ProductionLine | None = field(default=None, compare=False)
    volume: float = 1.0
    recfg: Reconfiguration = field(default=None, compare=False)

    @property
    def lo(self) -> float:
        return self.holding_positions[0]

    @property
    def hi(self) -> float:
        return self.holding_positions[-1]

    def component_series(self) -> dict[str, CostSeries]:
        """Discrete series the curves were fitted to (needs ``line``)."""
        return component_series(self.line, self.volume, self.recfg)


def component_series(line: ProductionLine, volume: float = 1.0, recfg: Reconfiguration = None) -> dict[str, CostSeries]:
    candidates = codp_candidates(line)
    rows = [total_cost(line, p, recfg, volume) for p in candidates]
    return {
        "generic": CostSeries(candidates, [r.generic_processing for r in rows]),
        "custom": CostSeries(candidates, [r.custom_incremental for r in rows]),
        "modification": CostSeries(candidates, [r.reconfiguration for r in rows]),
        "holding": CostSeries(candidates, [r.wip_holding for r in rows]),
    }


def build_fitted_model(
    line: ProductionLine,
    volume: float = 1.0,
    recfg: Reconfiguration = None,
    families=None,
) -> FittedCostModel:
    """Fit generic, custom and reconfiguration cost curves over the candidates.

    Needs at least three candidate positions (frontier >= 4).
    """
    series = component_series(line, volume, recfg)
    holding = series["holding"]
    return FittedCostModel(
        generic_curve=select_model(series["generic"], families),
        custom_curve=select_model(series["custom"], families),
        modification_curve=select_model(series["modification"], families),
        holding_positions=holding.x,
        holding_values=holding.y,
        line=line,
        volume=volume,
        recfg=recfg,
    )


def fitted_total_cost(model: FittedCostModel, p) -> float:
    p = float(p)
    span = model.hi - model.lo
    slack = 1e-9 * max(1.0, span)
    if not math.isfinite(p) or p < model.lo - slack or p > model.hi + slack:
        raise OutOfFittedRangeError(f"position {p} outside fitted range [{model.lo}, {model.hi}]")
    p = min(max(p, model.lo), model.hi)
    holding = float(np.interp(p, model.holding_positions, model.holding_values))
    return float(model.generic_curve(p) + model.custom_curve(p) + model.modification_curve(p) + holding)


def residual_bound(model: FittedCostModel, p: int) -> float:
    """Sum of absolute fit residuals of the three curves at integer ``p``."""
    discrete = total_cost(model.line, p, model.recfg, model.volume)
    return (
        abs(float(model.generic_curve(p)) - discrete.generic_processing)
        + abs(float(model.custom_curve(p)) - discrete.custom_incremental)
        + abs(float(model.modification_curve(p)) - discrete.reconfiguration)
    )


class Direction(str, enum.Enum):
    INCREASING = "increasing"
    DECREASING = "decreasing"


@dataclass(frozen=True)
class MonotonicityReport:
    expected: Direction
    passed: bool
    violations: tuple[tuple[float, float], ...]
    min_slope: float
    max_slope: float

    @property
    def verdict(self) -> str:
        return "PASS" if self.passed else "FAIL"


def monotonicity_diagnostic(curve: FittedCurve, lo: float, hi: float, expected) -> MonotonicityReport:
    """Check the sign of the curve's analytic derivative on a 1001-point grid.

    Never raises on a sign failure; violating stretches of the grid are
    returned as ``(start, end)`` pairs.
    """
    expected = Direction(expected)
    if not lo < hi:
        raise ValueError(f"need lo < hi, got [{lo}, {hi}]")
    grid = lo + (hi - lo) / 1000.0 * np.arange(1001)
    slope = curve.derivative(grid)
    ok = slope > 0 if expected is Direction.INCREASING else slope < 0
    violations = []
    start = None
    for i, good in enumerate(ok):
        if not good and start is None:
            start = i
        elif good and start is not None:
            violations.append((float(grid[start]), float(grid[i - 1])))
            start = None
    if start is not None:
        violations.append((float(grid[start]), float(grid[-1])))
    return MonotonicityReport(
        expected, not violations, tuple(violations), float(slope.min()), float(slope.max())
    )
