"""Deadline-constrained choice of the CODP position.

A position ``p`` is feasible for deadline ``D`` when the order-driven part of
the line finishes in time: ``custom_lead_time(p) <= D``. Among feasible
candidates the cheapest total cost wins, smallest ``p`` on ties (an earlier
CODP keeps more customization scope at equal cost).
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .costs import CostBreakdown, FittedCostModel, Reconfiguration, fitted_total_cost, total_cost
from .exceptions import InfeasibleDeadlineError, NoCandidatesError
from .production import ProductionLine, codp_candidates, custom_lead_time

GRID_POINTS = 1001


class Regime(str, enum.Enum):
    INFEASIBLE = "infeasible"
    EXACTLY_ONE = "exactly_one"
    WINDOW = "window"


class RegimeNote(str, enum.Enum):
    SHORT = "short_deadline"
    EXACT = "exact_deadline"
    MIDDLE = "middle_deadline"
    LONG = "long_deadline"


ADVISORY = {
    RegimeNote.SHORT: "deadline shorter than the minimum custom lead time: CODP cannot be "
    "located; produce the whole process to stock (make-to-stock)",
    RegimeNote.EXACT: "deadline admits a single position: the buffer sits immediately before "
    "the first customization process",
    RegimeNote.MIDDLE: "deadline between the minimum custom time and the full line time: "
    "consider the second-best node to trade cost against responsiveness",
    RegimeNote.LONG: "deadline covers the whole line: cut in at the cost-optimal process",
}


@dataclass(frozen=True)
class FeasibilityVerdict:
    regime: Regime
    window: tuple[int, ...]
    min_custom_time: float
    deadline: float
    total_time: float

    @property
    def make_to_stock(self) -> bool:
        return self.regime is Regime.INFEASIBLE

    @property
    def note(self) -> RegimeNote:
        if self.regime is Regime.INFEASIBLE:
            return RegimeNote.SHORT
        if self.deadline >= self.total_time:
            return RegimeNote.LONG
        if self.regime is Regime.EXACTLY_ONE:
            return RegimeNote.EXACT
        return RegimeNote.MIDDLE


@dataclass(frozen=True)
class Recommendation:
    best: CostBreakdown
    second_best: CostBreakdown | None
    verdict: FeasibilityVerdict
    regime_note: RegimeNote
    evaluated: tuple[CostBreakdown, ...] = ()

    @property
    def position(self) -> int:
        return self.best.position

    @property
    def advisory(self) -> str:
        return ADVISORY[self.regime_note]


def feasible_window(line: ProductionLine, deadline: float) -> FeasibilityVerdict:
    if not deadline >= 0:
        raise ValueError(f"deadline must be >= 0, got {deadline!r}")
    candidates = codp_candidates(line)
    if not candidates:
        raise NoCandidatesError("frontier is 1: no stage may be produced generically")
    window = tuple(p for p in candidates if custom_lead_time(line, p) <= deadline)
    if not window:
        regime = Regime.INFEASIBLE
    elif len(window) == 1:
        regime = Regime.EXACTLY_ONE
    else:
        regime = Regime.WINDOW
    return FeasibilityVerdict(
        regime=regime,
        window=window,
        min_custom_time=custom_lead_time(line, candidates[-1]),
        deadline=float(deadline),
        total_time=line.total_time(),
    )


def _rank(rows: Sequence[CostBreakdown]) -> list[CostBreakdown]:
    # stable sort over ascending p keeps the smallest-p tie-break
    return sorted(rows, key=lambda r: r.total)


def optimize_discrete(
    line: ProductionLine,
    deadline: float,
    volume: float = 1.0,
    recfg: Reconfiguration = None,
) -> Recommendation:
    """Exhaustive search over the feasible window.

    Raises :class:`InfeasibleDeadlineError` (carrying the verdict) when no
    position meets the deadline.
    """
    verdict = feasible_window(line, deadline)
    if verdict.make_to_stock:
        raise InfeasibleDeadlineError(verdict)
    rows = [total_cost(line, p, recfg, volume) for p in verdict.window]
    ranked = _rank(rows)
    return Recommendation(
        best=ranked[0],
        second_best=ranked[1] if len(ranked) > 1 else None,
        verdict=verdict,
        regime_note=verdict.note,
        evaluated=tuple(rows),
    )


@dataclass(frozen=True)
class RelaxedResult:
    p_star: float
    fitted_cost: float
    best: CostBreakdown


def optimize_relaxed(model: FittedCostModel, verdict: FeasibilityVerdict) -> RelaxedResult:
    """Minimise the fitted cost over the window span, then round via the discrete cost.

    Dense grid scan (1001 points) plus a parabolic step around the best grid
    point; the two bracketing integer positions are compared with
    :func:`total_cost`, which is authoritative.
    """
    if verdict.make_to_stock:
        raise InfeasibleDeadlineError(verdict)
    if model.line is None:
        raise ValueError("relaxed optimisation needs a model built from a production line")
    lo, hi = float(min(verdict.window)), float(max(verdict.window))
    if lo == hi:
        p_star = lo
    else:
        grid = np.linspace(lo, hi, GRID_POINTS)
        values = np.array([fitted_total_cost(model, g) for g in grid])
        i = int(np.argmin(values))
        p_star = float(grid[i])
        if 0 < i < GRID_POINTS - 1:
            f0, f1, f2 = values[i - 1], values[i], values[i + 1]
            curvature = f0 - 2.0 * f1 + f2
            if curvature > 0:
                step = grid[1] - grid[0]
                candidate = float(grid[i] + 0.5 * (f0 - f2) / curvature * step)
                candidate = min(max(candidate, grid[i - 1]), grid[i + 1])
                if fitted_total_cost(model, candidate) <= f1:
                    p_star = candidate
    neighbours = sorted({math.floor(p_star + 1e-9), math.ceil(p_star - 1e-9)})
    neighbours = [p for p in neighbours if p in verdict.window] or [int(round(p_star))]
    rows = [total_cost(model.line, p, model.recfg, model.volume) for p in neighbours]
    best = _rank(rows)[0]
    return RelaxedResult(p_star, fitted_total_cost(model, p_star), best)


@dataclass(frozen=True)
class SweepEntry:
    deadline: float
    verdict: FeasibilityVerdict
    recommendation: Recommendation | None

    @property
    def feasible(self) -> bool:
        return self.recommendation is not None


def deadline_sweep(
    line: ProductionLine,
    deadlines: Sequence[float],
    volume: float = 1.0,
    recfg: Reconfiguration = None,
) -> list[SweepEntry]:
    if len(deadlines) == 0:
        raise ValueError("at least one deadline is required")
    out = []
    for d in deadlines:
        try:
            rec = optimize_discrete(line, d, volume, recfg)
        except InfeasibleDeadlineError as exc:
            out.append(SweepEntry(float(d), exc.verdict, None))
        else:
            out.append(SweepEntry(float(d), rec.verdict, rec))
    return out
