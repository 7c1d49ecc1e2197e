"""Input validation helpers for the estimator interface."""
from __future__ import annotations

import numpy as np
from sklearn.utils.validation import check_array

from .production import ProductionLine, StageProfile

# column order for array input, matching the stage table minus stage_index
STAGE_COLUMNS = (
    "time_mean",
    "time_std",
    "generic_unit_cost",
    "custom_unit_cost",
    "modification_cost",
    "holding_cost",
    "turnover",
    "std_inventory",
    "inventory_adjustment",
)
REQUIRED_STAGE_COLUMNS = STAGE_COLUMNS[:-1]


def check_positions(X) -> np.ndarray:
    """Coerce ``X`` to a 1-D float array of positions; accepts (n,) or (n, 1)."""
    arr = np.asarray(X, dtype=float)
    if arr.ndim == 0:
        arr = arr.reshape(1)
    if arr.ndim == 2:
        if arr.shape[1] != 1:
            raise ValueError(f"expected a single feature column, got shape {arr.shape}")
        arr = arr[:, 0]
    return check_array(arr.reshape(-1, 1), dtype=float, ensure_all_finite=True)[:, 0]


def check_series(X, y) -> tuple[np.ndarray, np.ndarray]:
    x = check_positions(X)
    y = check_array(np.asarray(y, dtype=float).reshape(-1, 1), ensure_all_finite=True)[:, 0]
    if x.shape[0] != y.shape[0]:
        raise ValueError(f"X has {x.shape[0]} samples but y has {y.shape[0]}")
    order = np.argsort(x, kind="stable")
    return x[order], y[order]


def check_stages(X) -> list[StageProfile]:
    """Turn a stage table into stage profiles.

    ``X`` may be a :class:`ProductionLine`, a sequence of
    :class:`StageProfile`, a data frame with named columns, or a 2-D array
    whose columns follow :data:`STAGE_COLUMNS` (the last one optional).
    Rows are stages 1..N in order.
    """
    if isinstance(X, ProductionLine):
        return list(X.stages)
    if isinstance(X, (list, tuple)) and X and all(isinstance(s, StageProfile) for s in X):
        return list(X)
    if hasattr(X, "columns"):
        names = [str(c).strip().lower() for c in X.columns]
        missing = [c for c in REQUIRED_STAGE_COLUMNS if c not in names]
        if missing:
            raise ValueError(f"stage frame is missing columns {missing}")
        cols = [c for c in STAGE_COLUMNS if c in names]
        arr = check_array(np.asarray(X, dtype=float)[:, [names.index(c) for c in cols]], dtype=float)
    else:
        arr = check_array(X, dtype=float, ensure_min_samples=1)
        if arr.shape[1] not in (len(STAGE_COLUMNS) - 1, len(STAGE_COLUMNS)):
            raise ValueError(
                f"stage array needs {len(STAGE_COLUMNS) - 1} or {len(STAGE_COLUMNS)} columns, "
                f"got {arr.shape[1]}"
            )
        cols = STAGE_COLUMNS[: arr.shape[1]]
    return [
        StageProfile(index=i + 1, **{c: float(v) for c, v in zip(cols, row)})
        for i, row in enumerate(arr)
    ]
