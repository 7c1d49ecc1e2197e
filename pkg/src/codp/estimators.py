"""Scikit-learn compatible front ends.

``CostCurveRegressor`` wraps the curve families; ``CODPLocator`` learns the
cost landscape of a stage table and predicts the CODP position for given
delivery deadlines. Both support ``get_params``/``set_params`` and cloning.
"""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_is_fitted

from .costs import build_fitted_model, total_cost
from .exceptions import InfeasibleDeadlineError, TooFewPointsError, UnequalSpacingError
from .fitting import CostSeries, difference_profile, fit_model, select_model
from .inventory import ServiceParams, buffer_plan
from .optimizer import feasible_window, optimize_discrete, optimize_relaxed
from .production import build_line, codp_candidates
from .validation import check_positions, check_series, check_stages

INFEASIBLE = -1


class CostCurveRegressor(RegressorMixin, BaseEstimator):
    """One-dimensional cost curve: linear, quadratic or exponential.

    Parameters
    ----------
    family : {"auto", "linear", "quadratic", "exponential"}
        "auto" fits every applicable family and keeps the best R²
        (parsimony on ties).
    cv_threshold : float
        Threshold used by the difference analysis stored in
        ``difference_report_``.
    """

    def __init__(self, family="auto", cv_threshold=0.15):
        self.family = family
        self.cv_threshold = cv_threshold

    def fit(self, X, y):
        x, y = check_series(X, y)
        series = CostSeries(tuple(x), tuple(y))
        if self.family == "auto":
            self.curve_ = select_model(series)
        else:
            self.curve_ = fit_model(series, self.family)
        try:
            self.difference_report_ = difference_profile(series, self.cv_threshold)
        except UnequalSpacingError:
            self.difference_report_ = None
        self.family_ = self.curve_.family.value
        self.coef_ = np.array(self.curve_.coefficients)
        self.r_squared_ = self.curve_.r_squared
        self.n_features_in_ = 1
        return self

    def predict(self, X):
        check_is_fitted(self, "curve_")
        return self.curve_(check_positions(X))

    def derivative(self, X):
        check_is_fitted(self, "curve_")
        return self.curve_.derivative(check_positions(X))


class CODPLocator(BaseEstimator):
    """Locate the cost-optimal CODP under a delivery deadline.

    ``fit`` takes a stage table (see :func:`codp.validation.check_stages`)
    and evaluates every candidate position. ``predict`` maps deadlines to the
    optimal position, or ``INFEASIBLE`` (-1) where no position meets the
    deadline and the line should run make-to-stock.

    Parameters
    ----------
    frontier : int or None
        First personalized process; ``None`` means the last stage.
    demand_rate, demand_std : float
        Demand at the buffer, per period.
    service_level : float
        Cycle service target used for the buffer plans.
    review_period : float
    volume : float
        Units the processing costs are scaled by.
    families : list of str or None
        Curve families considered for the fitted cost model.
    """

    def __init__(
        self,
        frontier=None,
        demand_rate=1.0,
        demand_std=0.0,
        service_level=0.95,
        review_period=1.0,
        volume=1.0,
        families=None,
    ):
        self.frontier = frontier
        self.demand_rate = demand_rate
        self.demand_std = demand_std
        self.service_level = service_level
        self.review_period = review_period
        self.volume = volume
        self.families = families

    def fit(self, X, y=None):
        stages = check_stages(X)
        frontier = len(stages) if self.frontier is None else int(self.frontier)
        self.line_ = build_line(stages, frontier, float(self.demand_rate), float(self.demand_std))
        self.params_ = ServiceParams(service_level=self.service_level, review_period=float(self.review_period))
        self.candidates_ = np.array(codp_candidates(self.line_), dtype=int)
        self.costs_ = tuple(total_cost(self.line_, int(p), None, self.volume) for p in self.candidates_)
        self.plans_ = tuple(buffer_plan(self.line_, int(p), self.params_) for p in self.candidates_)
        try:
            self.fitted_model_ = build_fitted_model(self.line_, self.volume, None, self.families)
        except TooFewPointsError:
            self.fitted_model_ = None
        self.n_stages_ = self.line_.n_stages
        return self

    def recommend(self, deadline):
        check_is_fitted(self, "line_")
        return optimize_discrete(self.line_, float(deadline), self.volume)

    def predict(self, X):
        check_is_fitted(self, "line_")
        out = []
        for d in check_positions(X):
            try:
                out.append(self.recommend(d).position)
            except InfeasibleDeadlineError:
                out.append(INFEASIBLE)
        return np.array(out, dtype=int)

    def predict_relaxed(self, X):
        """Continuous optimum of the fitted cost model per deadline (NaN if infeasible)."""
        check_is_fitted(self, "fitted_model_")
        if self.fitted_model_ is None:
            raise TooFewPointsError("fitted model needs at least three candidate positions")
        out = []
        for d in check_positions(X):
            verdict = feasible_window(self.line_, d)
            out.append(np.nan if verdict.make_to_stock else optimize_relaxed(self.fitted_model_, verdict).p_star)
        return np.array(out)

    def total_costs(self):
        """Total cost at every candidate position, ascending ``p``."""
        check_is_fitted(self, "costs_")
        return np.array([c.total for c in self.costs_])
