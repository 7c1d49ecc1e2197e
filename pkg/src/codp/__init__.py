"""Customer order decoupling point (CODP) location on a serial production line."""
from .costs import (
    CostBreakdown,
    Direction,
    FittedCostModel,
    build_fitted_model,
    fitted_total_cost,
    inventory_cost_delta,
    monotonicity_diagnostic,
    total_cost,
)
from .estimators import INFEASIBLE, CODPLocator, CostCurveRegressor
from .fitting import CostSeries, Family, FittedCurve, difference_profile, fit_model, goodness_of_fit, select_model
from .inventory import BufferPlan, ServiceParams, buffer_plan, replenishment_cycle, safety_stock, z_for_service_level
from .optimizer import (
    FeasibilityVerdict,
    Recommendation,
    Regime,
    RegimeNote,
    deadline_sweep,
    feasible_window,
    optimize_discrete,
    optimize_relaxed,
)
from .production import ProductionLine, StageProfile, build_line, codp_candidates, custom_lead_time, generic_lead_time
from .simulation import DemandModel, SimConfig, SimReport, empirical_delivery_check, simulate, validate_plan

__version__ = "0.1.0"
