"""Least-squares cost curves over CODP positions.

Three families are supported: ``y = a*x + b``, ``y = a*x**2 + b*x + c`` and
``y = a*exp(b*x)``. Polynomial families are solved through the normal
equations (partial-pivot elimination on centred, scaled abscissae); the
exponential family is a log-linear fit back-transformed to the original
scale. R² is always measured on the original scale so families compare
fairly.
"""
from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .exceptions import (
    DegenerateVarianceError,
    NonPositiveDataError,
    SingularSystemError,
    TooFewPointsError,
    UnequalSpacingError,
)

DEFAULT_CV_THRESHOLD = 0.15
PIVOT_RATIO_WARNING = 1e-12
TIE_TOLERANCE = 1e-9


class IllConditionedWarning(RuntimeWarning):
    pass


class Family(str, enum.Enum):
    LINEAR = "linear"
    QUADRATIC = "quadratic"
    EXPONENTIAL = "exponential"

    @property
    def n_coefficients(self) -> int:
        return 3 if self is Family.QUADRATIC else 2


# order doubles as the parsimony tie-break among equal coefficient counts
FAMILIES = (Family.LINEAR, Family.EXPONENTIAL, Family.QUADRATIC)


@dataclass(frozen=True)
class CostSeries:
    x: tuple[float, ...]
    y: tuple[float, ...]

    def __post_init__(self):
        x = tuple(float(v) for v in self.x)
        y = tuple(float(v) for v in self.y)
        if len(x) != len(y):
            raise ValueError(f"x and y differ in length ({len(x)} vs {len(y)})")
        if len(x) < 3:
            raise TooFewPointsError(f"need at least 3 points, got {len(x)}")
        if not all(math.isfinite(v) for v in x + y):
            raise ValueError("series contains non-finite values")
        if any(b <= a for a, b in zip(x, x[1:])):
            raise ValueError("x must be strictly increasing")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    @classmethod
    def from_values(cls, values: Iterable[float], start: int = 1) -> "CostSeries":
        values = list(values)
        return cls(tuple(range(start, start + len(values))), tuple(values))

    def __len__(self):
        return len(self.x)

    @property
    def xs(self) -> np.ndarray:
        return np.asarray(self.x)

    @property
    def ys(self) -> np.ndarray:
        return np.asarray(self.y)


@dataclass(frozen=True)
class FittedCurve:
    family: Family
    coefficients: tuple[float, ...]
    r_squared: float

    def __post_init__(self):
        family = Family(self.family)
        object.__setattr__(self, "family", family)
        coefs = tuple(float(c) for c in self.coefficients)
        if len(coefs) != family.n_coefficients:
            raise ValueError(
                f"{family.value} needs {family.n_coefficients} coefficients, got {len(coefs)}"
            )
        if family is Family.EXPONENTIAL and not coefs[0] > 0:
            raise ValueError("exponential curve requires a > 0")
        object.__setattr__(self, "coefficients", coefs)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        c = self.coefficients
        if self.family is Family.LINEAR:
            return c[0] * x + c[1]
        if self.family is Family.QUADRATIC:
            return (c[0] * x + c[1]) * x + c[2]
        return c[0] * np.exp(c[1] * x)

    def derivative(self, x):
        x = np.asarray(x, dtype=float)
        c = self.coefficients
        if self.family is Family.LINEAR:
            return np.full_like(x, c[0])
        if self.family is Family.QUADRATIC:
            return 2.0 * c[0] * x + c[1]
        return c[0] * c[1] * np.exp(c[1] * x)

    @classmethod
    def constant(cls, value: float = 0.0) -> "FittedCurve":
        return cls(Family.LINEAR, (0.0, value), 1.0)


@dataclass(frozen=True)
class DifferenceReport:
    first_differences: tuple[float, ...]
    second_differences: tuple[float, ...]
    successive_ratios: tuple[float, ...]
    suggested_family: Family
    ratios_available: bool = True


def solve_normal_equations(matrix: Sequence[Sequence[float]], rhs: Sequence[float]) -> list[float]:
    """Gaussian elimination with partial pivoting.

    Warns with :class:`IllConditionedWarning` when the smallest pivot is
    below ``1e-12`` times the largest.
    """
    n = len(rhs)
    a = [list(map(float, row)) + [float(rhs[i])] for i, row in enumerate(matrix)]
    pivots = []
    for col in range(n):
        piv = max(range(col, n), key=lambda r: abs(a[r][col]))
        if a[piv][col] == 0.0:
            raise SingularSystemError("normal equations are singular")
        a[col], a[piv] = a[piv], a[col]
        pivots.append(abs(a[col][col]))
        for r in range(col + 1, n):
            factor = a[r][col] / a[col][col]
            if factor:
                for k in range(col, n + 1):
                    a[r][k] -= factor * a[col][k]
    if min(pivots) < PIVOT_RATIO_WARNING * max(pivots):
        warnings.warn(
            f"normal equations are ill-conditioned (pivot ratio {min(pivots) / max(pivots):.3g})",
            IllConditionedWarning,
            stacklevel=2,
        )
    sol = [0.0] * n
    for r in range(n - 1, -1, -1):
        acc = a[r][n]
        for k in range(r + 1, n):
            acc -= a[r][k] * sol[k]
        sol[r] = acc / a[r][r]
    return sol


def _polyfit(x: np.ndarray, y: np.ndarray, degree: int) -> list[float]:
    """Least-squares polynomial, highest power first."""
    centre = float(x.mean())
    scale = float(np.abs(x - centre).max())
    if scale == 0.0:
        raise SingularSystemError("all x values coincide")
    u = (x - centre) / scale
    powers = [u**k for k in range(degree + 1)]
    gram = [[float(np.dot(powers[i], powers[j])) for j in range(degree + 1)] for i in range(degree + 1)]
    moments = [float(np.dot(powers[i], y)) for i in range(degree + 1)]
    beta = solve_normal_equations(gram, moments)
    m, s = centre, scale
    if degree == 1:
        slope = beta[1] / s
        return [slope, beta[0] - slope * m]
    a2 = beta[2] / (s * s)
    a1 = beta[1] / s
    return [a2, a1 - 2.0 * a2 * m, a2 * m * m - a1 * m + beta[0]]


def _r_squared(y: np.ndarray, predicted: np.ndarray) -> float:
    residuals = y - predicted
    ss_res = float(np.dot(residuals, residuals))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    if ss_tot == 0.0:
        scale = max(1.0, float(np.abs(y).max()))
        if float(np.abs(residuals).max()) <= 1e-9 * scale:
            return 1.0
        raise DegenerateVarianceError("constant data with non-zero residuals")
    return 1.0 - ss_res / ss_tot


def goodness_of_fit(curve: FittedCurve, series: CostSeries) -> float:
    """Coefficient of determination of ``curve`` on ``series``."""
    return _r_squared(series.ys, curve(series.xs))


def fit_model(series: CostSeries, family) -> FittedCurve:
    family = Family(family)
    x, y = series.xs, series.ys
    if family is Family.EXPONENTIAL:
        if np.any(y <= 0):
            raise NonPositiveDataError("exponential fit needs strictly positive y")
        slope, intercept = _polyfit(x, np.log(y), 1)
        coefs = (math.exp(intercept), slope)
    else:
        coefs = tuple(_polyfit(x, y, 1 if family is Family.LINEAR else 2))
    provisional = FittedCurve(family, coefs, 1.0)
    return FittedCurve(family, coefs, goodness_of_fit(provisional, series))


def _cv(values: np.ndarray) -> float:
    mean = float(values.mean())
    std = float(values.std())
    if std <= 1e-12 * max(1.0, abs(mean)):
        return 0.0
    if mean == 0.0:
        return math.inf
    return std / abs(mean)


def difference_profile(series: CostSeries, cv_threshold: float = DEFAULT_CV_THRESHOLD) -> DifferenceReport:
    """First/second differences and successive ratios, with a family hint.

    The hint is Linear when first differences are nearly constant
    (coefficient of variation below ``cv_threshold``), then Quadratic on
    second differences, then Exponential on ratios; Quadratic otherwise.
    Ratios are omitted when any value is non-positive.
    """
    x, y = series.xs, series.ys
    steps = np.diff(x)
    if not np.allclose(steps, steps[0], rtol=1e-9, atol=0.0):
        raise UnequalSpacingError("difference analysis needs equally spaced x")
    d1 = np.diff(y)
    d2 = np.diff(d1)
    have_ratios = bool(np.all(y > 0))
    ratios = y[1:] / y[:-1] if have_ratios else np.array([])

    if _cv(d1) < cv_threshold:
        suggested = Family.LINEAR
    elif _cv(d2) < cv_threshold:
        suggested = Family.QUADRATIC
    elif have_ratios and _cv(ratios) < cv_threshold:
        suggested = Family.EXPONENTIAL
    else:
        suggested = Family.QUADRATIC
    return DifferenceReport(
        tuple(d1.tolist()),
        tuple(d2.tolist()),
        tuple(ratios.tolist()),
        suggested,
        have_ratios,
    )


def select_model(series: CostSeries, families: Iterable | None = None) -> FittedCurve:
    """Fit every applicable family and keep the best R².

    Scores within ``1e-9`` are ties, resolved toward fewer coefficients.
    """
    wanted = FAMILIES if families is None else tuple(Family(f) for f in families)
    # evaluate in canonical order so parsimony ranking is independent of input order
    wanted = tuple(f for f in FAMILIES if f in wanted)
    fitted, errors = [], []
    for family in wanted:
        try:
            fitted.append(fit_model(series, family))
        except (NonPositiveDataError, SingularSystemError, DegenerateVarianceError) as exc:
            errors.append(exc)
    if not fitted:
        raise errors[-1] if errors else ValueError("no families requested")
    best = fitted[0]
    for curve in fitted[1:]:
        if curve.r_squared > best.r_squared + TIE_TOLERANCE:
            best = curve
        elif (
            abs(curve.r_squared - best.r_squared) <= TIE_TOLERANCE
            and curve.family.n_coefficients < best.family.n_coefficients
        ):
            best = curve
    return best
