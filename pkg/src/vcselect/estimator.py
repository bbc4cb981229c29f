"""scikit-learn style classifier around selection plus learning on a fresh sample."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils.validation import check_consistent_length, check_is_fitted, column_or_1d

from .core import LossSpec, Sample
from .estimators import holdout_plan, kfold_plan
from .lattice import build_family
from .selection import learn_on_selected, select_model


def check_points(X, n_points: int | None = None) -> np.ndarray:
    """Validate point indices: a 1-D array or a single column of nonnegative integers."""
    arr = np.asarray(X)
    if arr.ndim == 2 and arr.shape[1] == 1:
        arr = arr[:, 0]
    arr = column_or_1d(arr)
    if arr.size == 0:
        raise ValueError("no points given")
    if not np.issubdtype(arr.dtype, np.number) or np.any(arr != np.round(arr)):
        raise ValueError("points must be integer indices")
    arr = arr.astype(np.int64)
    if arr.min() < 0:
        raise ValueError("points must be nonnegative")
    if n_points is not None and arr.max() >= n_points:
        raise ValueError(f"point {arr.max()} outside a domain of {n_points} points")
    return arr


def check_labels(y) -> np.ndarray:
    arr = column_or_1d(np.asarray(y))
    if not np.isin(arr, (0, 1)).all():
        raise ValueError("labels must be 0 or 1")
    return arr.astype(np.int64)


class ModelSelectionClassifier(ClassifierMixin, BaseEstimator):
    """Pick a partition model by cross-validated risk, then fit it on held-back records.

    The first ``selection_fraction`` of the records choose the model; the rest
    train the final hypothesis by empirical risk minimization.

    Parameters
    ----------
    family : {"two-block", "all-partitions"}
    cv : "holdout" or an integer number of folds
    c : validation fraction for holdout
    selection_fraction : share of records used for model selection
    n_points : domain size; inferred from the data when None
    """

    def __init__(self, family="two-block", cv="holdout", c=0.2, selection_fraction=0.5, n_points=None):
        self.family = family
        self.cv = cv
        self.c = c
        self.selection_fraction = selection_fraction
        self.n_points = n_points

    def fit(self, X, y):
        X = check_points(X, self.n_points)
        y = check_labels(y)
        check_consistent_length(X, y)
        if not 0 < self.selection_fraction < 1:
            raise ValueError("selection_fraction must lie in (0, 1)")
        n = self.n_points if self.n_points is not None else int(X.max()) + 1
        n_sel = int(self.selection_fraction * len(X))
        if self.cv == "holdout":
            plan = holdout_plan(n_sel, self.c)
        else:
            k = int(self.cv)
            n_sel -= n_sel % k
            plan = kfold_plan(n_sel, k)
        if n_sel >= len(X):
            raise ValueError("no records left for the final fit")
        records = tuple(zip(X.tolist(), y.tolist()))
        loss = LossSpec.simple()
        family = build_family(n, self.family)
        result = select_model(family, Sample(n, records[:n_sel]), plan, loss)
        result = learn_on_selected(result, Sample(n, records[n_sel:]), loss)
        self.selection_ = result
        self.partition_ = result.representative
        self.hypothesis_ = result.learned
        self.estimated_risks_ = result.risk_table
        self.n_points_ = n
        self.classes_ = np.array([0, 1])
        return self

    def predict(self, X):
        check_is_fitted(self, "hypothesis_")
        X = check_points(X, self.n_points_)
        table = np.asarray(self.hypothesis_.table)
        return table[X]
