"""Monte Carlo model of the CODP buffer under periodic order-up-to review.

Per period: receipts due are booked (clearing backorders first); on review
epochs the inventory position is raised to ``S``; then the day's demand is
served from stock with any shortfall backordered. Replenishment lead time is
the sum of the generic stages' processing times, each drawn from a normal
distribution truncated at zero; a receipt lands on the period boundary
nearest the realized lead time.

Each replication draws from its own stream spawned from the configured seed,
so results do not depend on how many replications run or in what order.
"""
from __future__ import annotations

import enum
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .exceptions import InvalidConfigError, MismatchedPlanError
from .inventory import BufferPlan, normal_cdf
from .production import ProductionLine, _check_position, generic_lead_time


class DemandFamily(str, enum.Enum):
    DETERMINISTIC = "deterministic"
    NORMAL = "normal"
    POISSON = "poisson"


@dataclass(frozen=True)
class DemandModel:
    family: DemandFamily = DemandFamily.NORMAL
    mean: float = 0.0
    std: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "family", DemandFamily(self.family))
        if not (math.isfinite(self.mean) and self.mean >= 0):
            raise InvalidConfigError(f"demand mean must be >= 0, got {self.mean!r}")
        if not (math.isfinite(self.std) and self.std >= 0):
            raise InvalidConfigError(f"demand std must be >= 0, got {self.std!r}")

    @property
    def noisy(self) -> bool:
        if self.family is DemandFamily.NORMAL:
            return self.std > 0
        return self.family is DemandFamily.POISSON and self.mean > 0

    def draw(self, rng: np.random.Generator, n: int) -> np.ndarray:
        if self.family is DemandFamily.DETERMINISTIC:
            return np.full(n, float(self.mean))
        if self.family is DemandFamily.POISSON:
            return rng.poisson(self.mean, n).astype(float)
        return np.maximum(rng.normal(self.mean, self.std, n), 0.0)


@dataclass(frozen=True)
class SimConfig:
    horizon: int = 2200
    warmup: int = 200
    seed: int = 42
    replications: int = 10

    def __post_init__(self):
        if self.horizon < 1 or self.warmup < 0 or self.warmup >= self.horizon:
            raise InvalidConfigError(
                f"need 0 <= warmup < horizon, got warmup={self.warmup}, horizon={self.horizon}"
            )
        if self.replications < 1:
            raise InvalidConfigError("replications must be >= 1")
        if not 0 <= self.seed < 2**64:
            raise InvalidConfigError("seed must be a 64-bit unsigned integer")


@dataclass(frozen=True)
class ReplicationStats:
    cycle_service_level: float
    fill_rate: float
    average_inventory: float
    max_inventory_observed: float
    stockout_periods: int
    mean_custom_lead_time: float
    cycles: int
    cycles_without_stockout: int
    total_demand: float
    immediate_filled: float
    total_shipped: float
    starting_backorders: float
    ending_backorders: float


@dataclass(frozen=True)
class SimReport:
    position: int
    order_up_to: float
    stochastic: bool
    cycle_service_level: float
    fill_rate: float
    average_inventory: float
    max_inventory_observed: float
    stockout_periods: int
    mean_custom_lead_time: float
    replications: tuple[ReplicationStats, ...]
    trajectory: tuple[tuple[int, float, float, float], ...] = field(default=(), repr=False)

    def to_dict(self, include_trajectory: bool = False) -> dict:
        out = asdict(self)
        out["replications"] = [asdict(r) for r in self.replications]
        if include_trajectory:
            out["trajectory"] = [list(row) for row in self.trajectory]
        else:
            out.pop("trajectory")
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)


def _streams(seed: int, n: int) -> list[np.random.Generator]:
    children = np.random.SeedSequence(seed).spawn(n)
    return [np.random.default_rng(child) for child in children]


def _stage_time_sums(rng: np.random.Generator, stages, n: int) -> np.ndarray:
    """Truncated-normal stage times summed left to right, one row per draw."""
    if not stages:
        return np.zeros(n)
    means = np.array([st.time_mean for st in stages], dtype=float)
    stds = np.array([st.time_std for st in stages], dtype=float)
    draws = np.maximum(rng.normal(means, stds, size=(n, len(stages))), 0.0)
    total = np.zeros(n)
    for j in range(len(stages)):
        total += draws[:, j]
    return total


def _replicate(line, plan, demand, cfg, review, rng, keep_trajectory):
    p = plan.position
    horizon, warmup = cfg.horizon, cfg.warmup
    n_reviews = (horizon + review - 1) // review
    # fixed draw order keeps reruns bit-identical
    demands = demand.draw(rng, horizon)
    lead_times = _stage_time_sums(rng, line.stages[:p], n_reviews)
    custom_times = _stage_time_sums(rng, line.stages[p:], horizon)

    S = plan.order_up_to
    on_hand, backorders, on_order = S, 0.0, 0.0
    pipeline: dict[int, float] = {}
    review_no = 0

    cycles = ok_cycles = stockout_periods = 0
    inv_sum = 0.0
    max_inv = 0.0
    demand_sum = immediate_sum = shipped_sum = 0.0
    start_backorders = 0.0
    trajectory = []

    def receive(qty):
        nonlocal on_hand, backorders, shipped_sum
        on_hand += qty
        if backorders > 0 and on_hand > 0:
            ship = min(on_hand, backorders)
            on_hand -= ship
            backorders -= ship
            if counting:
                shipped_sum += ship

    for t in range(horizon):
        counting = t >= warmup
        if t == warmup:
            start_backorders = backorders
        if t in pipeline:
            qty = pipeline.pop(t)
            on_order -= qty
            receive(qty)
        if t % review == 0:
            position = on_hand - backorders + on_order
            qty = S - position
            lead = float(lead_times[review_no])
            review_no += 1
            if qty > 0:
                arrival = t + math.floor(lead + 0.5)
                if arrival <= t:
                    receive(qty)
                else:
                    pipeline[arrival] = pipeline.get(arrival, 0.0) + qty
                    on_order += qty
        start = on_hand
        d = float(demands[t])
        filled = min(on_hand, d)
        on_hand -= filled
        backorders += d - filled
        if counting:
            demand_sum += d
            immediate_sum += filled
            shipped_sum += filled
            inv_sum += 0.5 * (start + on_hand)
            max_inv = max(max_inv, start)
            if backorders > 0:
                stockout_periods += 1
            if (t + 1) % review == 0:
                cycles += 1
                if backorders <= 0:
                    ok_cycles += 1
        if keep_trajectory:
            trajectory.append((t, start, on_hand, backorders))

    n = horizon - warmup
    stats = ReplicationStats(
        cycle_service_level=ok_cycles / cycles if cycles else 1.0,
        fill_rate=immediate_sum / demand_sum if demand_sum > 0 else 1.0,
        average_inventory=inv_sum / n,
        max_inventory_observed=float(max_inv),
        stockout_periods=stockout_periods,
        mean_custom_lead_time=float(custom_times[warmup:].mean()),
        cycles=cycles,
        cycles_without_stockout=ok_cycles,
        total_demand=demand_sum,
        immediate_filled=immediate_sum,
        total_shipped=shipped_sum,
        starting_backorders=start_backorders,
        ending_backorders=backorders,
    )
    return stats, tuple(trajectory)


def _check_plan(line: ProductionLine, plan: BufferPlan) -> int:
    _check_position(line, plan.position)
    expected = generic_lead_time(line, plan.position)
    if not math.isclose(plan.replenishment_cycle, expected, rel_tol=1e-9, abs_tol=1e-12):
        raise InvalidConfigError(
            f"plan replenishment cycle {plan.replenishment_cycle} does not match the line ({expected})"
        )
    review = plan.review_period
    if review < 1 or review != int(review):
        raise InvalidConfigError(f"simulation needs a whole-period review, got {review}")
    return int(review)


def simulate(
    line: ProductionLine,
    plan: BufferPlan,
    demand: DemandModel,
    cfg: SimConfig,
    n_jobs: int | None = None,
    keep_trajectory: bool = True,
) -> SimReport:
    """Run ``cfg.replications`` independent replications of the buffer.

    Replications may run on a thread pool (``n_jobs``); pooled statistics
    are always combined in replication order. The daily trajectory of the
    first replication is kept for plotting.
    """
    review = _check_plan(line, plan)
    rngs = _streams(cfg.seed, cfg.replications)

    def run(i):
        return _replicate(line, plan, demand, cfg, review, rngs[i], keep_trajectory and i == 0)

    indices = range(cfg.replications)
    if n_jobs and n_jobs > 1:
        with ThreadPoolExecutor(max_workers=n_jobs) as pool:
            results = list(pool.map(run, indices))
    else:
        results = [run(i) for i in indices]
    reps = tuple(r[0] for r in results)

    cycles = sum(r.cycles for r in reps)
    ok = sum(r.cycles_without_stockout for r in reps)
    demand_total = sum(r.total_demand for r in reps)
    immediate = sum(r.immediate_filled for r in reps)
    stochastic = demand.noisy or any(st.time_std > 0 for st in line.stages[: plan.position])
    return SimReport(
        position=plan.position,
        order_up_to=plan.order_up_to,
        stochastic=stochastic,
        cycle_service_level=ok / cycles if cycles else 1.0,
        fill_rate=immediate / demand_total if demand_total > 0 else 1.0,
        average_inventory=float(np.mean([r.average_inventory for r in reps])),
        max_inventory_observed=max(r.max_inventory_observed for r in reps),
        stockout_periods=sum(r.stockout_periods for r in reps),
        mean_custom_lead_time=float(np.mean([r.mean_custom_lead_time for r in reps])),
        replications=reps,
        trajectory=results[0][1],
    )


@dataclass(frozen=True)
class MetricCheck:
    name: str
    observed: float
    expected: float
    delta: float
    tolerance: float
    passed: bool


@dataclass(frozen=True)
class PlanValidation:
    checks: tuple[MetricCheck, ...]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)


def validate_plan(
    report: SimReport,
    plan: BufferPlan,
    service_target: float | None = None,
    avg_rtol: float = 0.10,
    service_atol: float = 0.02,
) -> PlanValidation:
    """Compare simulated buffer behaviour with the analytic plan.

    ``service_target`` defaults to the level implied by the plan's ``z``,
    or to 1.0 when the run had no randomness at all.
    """
    if report.position != plan.position or not math.isclose(
        report.order_up_to, plan.order_up_to, rel_tol=1e-12, abs_tol=1e-12
    ):
        raise MismatchedPlanError(
            f"report is for position {report.position} / S={report.order_up_to}, "
            f"plan is for position {plan.position} / S={plan.order_up_to}"
        )
    if service_target is None:
        service_target = normal_cdf(plan.z) if report.stochastic else 1.0

    avg_delta = report.average_inventory - plan.average_inventory
    avg_tol = avg_rtol * abs(plan.average_inventory)
    svc_delta = report.cycle_service_level - service_target
    return PlanValidation((
        MetricCheck("average_inventory", report.average_inventory, plan.average_inventory,
                    avg_delta, avg_tol, abs(avg_delta) <= avg_tol + 1e-9),
        MetricCheck("cycle_service_level", report.cycle_service_level, service_target,
                    svc_delta, service_atol, abs(svc_delta) <= service_atol + 1e-12),
    ))


def empirical_delivery_check(line: ProductionLine, p: int, deadline: float, cfg: SimConfig) -> float:
    """Fraction of simulated orders whose custom lead time meets ``deadline``.

    One order per post-warmup period per replication.
    """
    _check_position(line, p)
    n = cfg.horizon - cfg.warmup
    hits = 0
    for rng in _streams(cfg.seed, cfg.replications):
        times = _stage_time_sums(rng, line.stages[p:], n)
        hits += int(np.count_nonzero(times <= deadline))
    return hits / (n * cfg.replications)
