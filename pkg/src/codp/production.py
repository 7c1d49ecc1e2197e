"""Production line data model and lead-time primitives.

Index convention: a CODP position ``p`` is the index of the *last generic
process*. The semi-finished buffer sits right after stage ``p``; stages
``1..p`` are push (forecast) driven and stages ``p+1..N`` are pull (order)
driven. Moving the CODP "back" means increasing ``p``.

All durations share one time unit, the demand period (e.g. days).
"""
from __future__ import annotations

import math
import numbers
from dataclasses import dataclass, field, fields
from typing import Sequence

from .exceptions import (
    EmptyLineError,
    FrontierOutOfRangeError,
    NegativeFieldError,
    NonContiguousIndicesError,
    PositionOutOfRangeError,
)

# fields that must be finite and >= 0; turnover is checked separately (> 0)
_NON_NEGATIVE = (
    "time_mean",
    "time_std",
    "generic_unit_cost",
    "custom_unit_cost",
    "modification_cost",
    "holding_cost",
    "std_inventory",
)


@dataclass(frozen=True)
class StageProfile:
    """One process on the line."""

    index: int
    time_mean: float
    time_std: float = 0.0
    generic_unit_cost: float = 0.0
    custom_unit_cost: float = 0.0
    modification_cost: float = 0.0
    holding_cost: float = 0.0
    turnover: float = 1.0
    std_inventory: float = 0.0
    inventory_adjustment: float = 0.0

    def check(self) -> None:
        """Raise :class:`NegativeFieldError` naming the first bad field."""
        if isinstance(self.index, bool) or not isinstance(self.index, numbers.Integral) or self.index < 1:
            raise NegativeFieldError(self.index, "index", self.index)
        for name in _NON_NEGATIVE:
            value = getattr(self, name)
            if not math.isfinite(value) or value < 0:
                raise NegativeFieldError(self.index, name, value)
        if not math.isfinite(self.turnover) or self.turnover <= 0:
            raise NegativeFieldError(self.index, "turnover", self.turnover)
        if not math.isfinite(self.inventory_adjustment):
            raise NegativeFieldError(self.index, "inventory_adjustment", self.inventory_adjustment)

    @property
    def deterministic(self) -> bool:
        return self.time_std == 0


STAGE_FIELDS = tuple(f.name for f in fields(StageProfile))


@dataclass(frozen=True)
class ProductionLine:
    """Validated serial line with a personalization frontier.

    ``personalization_frontier`` is the index of the first process that
    carries customer-specific features; the CODP must precede it.
    """

    stages: tuple[StageProfile, ...]
    personalization_frontier: int
    demand_rate: float = 1.0
    demand_std: float = 0.0
    _times: tuple[float, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        stages = tuple(self.stages)
        object.__setattr__(self, "stages", stages)
        if not stages:
            raise EmptyLineError("a production line needs at least one stage")
        for st in stages:
            st.check()
        indices = [st.index for st in stages]
        expected = list(range(1, len(stages) + 1))
        if indices != expected:
            raise NonContiguousIndicesError(
                f"stage indices must be 1..{len(stages)} in order, got {indices}"
            )
        n = len(stages)
        f = self.personalization_frontier
        if isinstance(f, bool) or not isinstance(f, numbers.Integral) or not 1 <= f <= n:
            raise FrontierOutOfRangeError(f"frontier {f!r} outside [1, {n}]")
        if not math.isfinite(self.demand_rate) or self.demand_rate < 0:
            raise NegativeFieldError("line", "demand_rate", self.demand_rate)
        if not math.isfinite(self.demand_std) or self.demand_std < 0:
            raise NegativeFieldError("line", "demand_std", self.demand_std)
        object.__setattr__(self, "_times", tuple(float(st.time_mean) for st in stages))

    @property
    def n_stages(self) -> int:
        return len(self.stages)

    @property
    def frontier(self) -> int:
        return self.personalization_frontier

    def stage(self, index: int) -> StageProfile:
        return self.stages[index - 1]

    def total_time(self) -> float:
        return _accumulate(self._times)


def build_line(
    stages: Sequence[StageProfile],
    frontier: int,
    demand_rate: float = 1.0,
    demand_std: float = 0.0,
) -> ProductionLine:
    """Validate ``stages`` and assemble a :class:`ProductionLine`.

    Stages may be passed in any order; they are sorted by index before the
    contiguity check.
    """
    ordered = sorted(stages, key=lambda st: st.index)
    return ProductionLine(tuple(ordered), frontier, demand_rate, demand_std)


def codp_candidates(line: ProductionLine) -> list[int]:
    return list(range(1, line.personalization_frontier))


def _accumulate(values) -> float:
    # plain left-to-right sum; the simulator sums stage draws the same way so
    # zero-variance runs reproduce these values bit for bit
    total = 0.0
    for v in values:
        total += v
    return total


def _check_position(line: ProductionLine, p: int) -> None:
    if isinstance(p, bool) or not isinstance(p, numbers.Integral) or not 0 <= p <= line.n_stages:
        raise PositionOutOfRangeError(f"position {p!r} outside [0, {line.n_stages}]")


def custom_lead_time(line: ProductionLine, p: int) -> float:
    """Processing time of the order-driven stages ``p+1..N``."""
    _check_position(line, p)
    return _accumulate(line._times[p:])


def generic_lead_time(line: ProductionLine, p: int) -> float:
    """Processing time of the forecast-driven prefix ``1..p``."""
    _check_position(line, p)
    return _accumulate(line._times[:p])
