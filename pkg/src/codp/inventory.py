"""Safety stock and order-up-to sizing for the CODP buffer.

The buffer is replenished by the generic prefix of the line, so its
replenishment cycle is the processing time of stages ``1..p``. Stock is
reviewed every ``review_period`` and raised to the order-up-to level ``S``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .exceptions import OutOfRangeError
from .production import ProductionLine, _check_position, generic_lead_time

# rational approximation coefficients for the inverse normal CDF
_A = (-3.969683028665376e01, 2.209460984245205e02, -2.759285104469687e02,
      1.383577518672690e02, -3.066479806614716e01, 2.506628277459239e00)
_B = (-5.447609879822406e01, 1.615858368580409e02, -1.556989798598866e02,
      6.680131188771972e01, -1.328068155288572e01)
_C = (-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e00,
      -2.549732539343734e00, 4.374664141464968e00, 2.938163982698783e00)
_D = (7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e00,
      3.754408661907416e00)
_P_LOW = 0.02425


def normal_cdf(z: float) -> float:
    return 0.5 * math.erfc(-z / math.sqrt(2.0))


def z_for_service_level(beta: float) -> float:
    """Standard-normal quantile of ``beta`` (absolute error well below 5e-4)."""
    if not 0.0 < beta < 1.0:
        raise OutOfRangeError(f"service level {beta!r} must lie strictly in (0, 1)")
    if beta < _P_LOW:
        q = math.sqrt(-2.0 * math.log(beta))
        return (((((_C[0] * q + _C[1]) * q + _C[2]) * q + _C[3]) * q + _C[4]) * q + _C[5]) / (
            (((_D[0] * q + _D[1]) * q + _D[2]) * q + _D[3]) * q + 1.0
        )
    if beta > 1.0 - _P_LOW:
        q = math.sqrt(-2.0 * math.log(1.0 - beta))
        return -(((((_C[0] * q + _C[1]) * q + _C[2]) * q + _C[3]) * q + _C[4]) * q + _C[5]) / (
            (((_D[0] * q + _D[1]) * q + _D[2]) * q + _D[3]) * q + 1.0
        )
    q = beta - 0.5
    r = q * q
    return (((((_A[0] * r + _A[1]) * r + _A[2]) * r + _A[3]) * r + _A[4]) * r + _A[5]) * q / (
        ((((_B[0] * r + _B[1]) * r + _B[2]) * r + _B[3]) * r + _B[4]) * r + 1.0
    )


@dataclass(frozen=True)
class ServiceParams:
    """Service target for the buffer.

    Give either ``service_level`` or ``z`` (or both, if they agree within
    0.01); the missing one is derived. With neither, 95% is assumed.
    """

    service_level: float | None = None
    z: float | None = None
    review_period: float = 1.0

    def __post_init__(self):
        level, z = self.service_level, self.z
        if level is None and z is None:
            level = 0.95
        if level is not None and not 0.0 < level < 1.0:
            raise OutOfRangeError(f"service level {level!r} must lie strictly in (0, 1)")
        if z is None:
            z = z_for_service_level(level)
        elif not math.isfinite(z) or z < 0:
            raise OutOfRangeError(f"safety factor z={z!r} must be >= 0")
        elif level is None:
            level = normal_cdf(z)
        elif abs(z - z_for_service_level(level)) > 0.01:
            raise OutOfRangeError(
                f"z={z} is inconsistent with service level {level} "
                f"(expected {z_for_service_level(level):.4f})"
            )
        if not math.isfinite(self.review_period) or self.review_period < 0:
            raise OutOfRangeError(f"review period {self.review_period!r} must be >= 0")
        object.__setattr__(self, "service_level", float(level))
        object.__setattr__(self, "z", float(z))


@dataclass(frozen=True)
class BufferPlan:
    position: int
    replenishment_cycle: float
    safety_stock: float
    order_up_to: float
    average_inventory: float
    max_inventory: float
    timing_buffer: float
    review_period: float
    z: float


def replenishment_cycle(line: ProductionLine, p: int) -> float:
    return generic_lead_time(line, p)


def _variance_of_generic_times(line: ProductionLine, p: int) -> float:
    total = 0.0
    for st in line.stages[:p]:
        total += st.time_std * st.time_std
    return total


def timing_buffer(line: ProductionLine, p: int, z: float) -> float:
    """``z * sqrt(sum of generic-stage time variances)``, in time units."""
    _check_position(line, p)
    return z * math.sqrt(_variance_of_generic_times(line, p))


def safety_stock(
    line: ProductionLine,
    p: int,
    params: ServiceParams,
    demand_scaling: bool = True,
) -> float:
    """Safety stock at the buffer behind stage ``p``.

    With ``demand_scaling`` the result is in units of product, combining
    demand noise over the replenishment cycle with replenishment-time noise:
    ``z * sqrt(demand_std**2 * lead + demand_rate**2 * sum(time_std**2))``.
    Without it, the bare timing buffer ``z * sqrt(sum(time_std**2))`` is
    returned.
    """
    _check_position(line, p)
    var_t = _variance_of_generic_times(line, p)
    if not demand_scaling:
        return params.z * math.sqrt(var_t)
    cycle = generic_lead_time(line, p)
    d, sd = line.demand_rate, line.demand_std
    return params.z * math.sqrt(sd * sd * cycle + d * d * var_t)


def buffer_plan(line: ProductionLine, p: int, params: ServiceParams) -> BufferPlan:
    """Periodic-review base-stock plan for the buffer behind stage ``p``."""
    cycle = replenishment_cycle(line, p)
    ss = safety_stock(line, p, params)
    d = line.demand_rate
    review = params.review_period
    order_up_to = d * (cycle + review) + ss
    return BufferPlan(
        position=p,
        replenishment_cycle=cycle,
        safety_stock=ss,
        order_up_to=order_up_to,
        average_inventory=ss + d * review / 2.0,
        max_inventory=order_up_to,
        timing_buffer=timing_buffer(line, p, params.z),
        review_period=review,
        z=params.z,
    )
