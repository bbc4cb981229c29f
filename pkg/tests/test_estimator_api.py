import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from vcselect.estimator import ModelSelectionClassifier, check_labels, check_points


def _data(n_records=400, seed=0):
    rng = np.random.default_rng(seed)
    X = rng.integers(0, 4, size=n_records)
    y = (X >= 2).astype(int)
    flip = rng.random(n_records) < 0.05
    return X, np.where(flip, 1 - y, y)


def test_fit_predict_recovers_block_labeling():
    X, y = _data()
    clf = ModelSelectionClassifier(family="all-partitions").fit(X, y)
    assert clf.partition_ == "0011"
    assert list(clf.predict([0, 1, 2, 3])) == [0, 0, 1, 1]
    assert clf.score(X, y) > 0.9
    assert clf.n_points_ == 4 and list(clf.classes_) == [0, 1]


def test_kfold_and_column_input():
    X, y = _data(seed=1)
    clf = ModelSelectionClassifier(family="two-block", cv=4).fit(X.reshape(-1, 1), y)
    assert clf.selection_.selected.vc_dim == 2
    assert set(clf.estimated_risks_) == {"0000", "0001", "0010", "0011", "0100", "0101", "0110", "0111"}


def test_params_and_clone():
    clf = ModelSelectionClassifier(cv=3, c=0.25, n_points=6)
    assert clf.get_params() == {"family": "two-block", "cv": 3, "c": 0.25, "selection_fraction": 0.5, "n_points": 6}
    other = clone(clf).set_params(c=0.1)
    assert other.c == 0.1 and clf.c == 0.25


def test_predict_before_fit():
    with pytest.raises(NotFittedError):
        ModelSelectionClassifier().predict([0])


def test_input_validation():
    X, y = _data(40)
    with pytest.raises(ValueError):
        ModelSelectionClassifier().fit(X, y[:-1])
    with pytest.raises(ValueError):
        ModelSelectionClassifier().fit(X, y + 2)
    with pytest.raises(ValueError):
        ModelSelectionClassifier(selection_fraction=1.0).fit(X, y)
    with pytest.raises(ValueError):
        ModelSelectionClassifier(n_points=2).fit(X, y)
    clf = ModelSelectionClassifier().fit(X, y)
    with pytest.raises(ValueError):
        clf.predict([7])


def test_point_checks():
    assert list(check_points([[1], [0]])) == [1, 0]
    with pytest.raises(ValueError):
        check_points([0.5])
    with pytest.raises(ValueError):
        check_points([-1])
    with pytest.raises(ValueError):
        check_points([])
    assert list(check_labels([0, 1, 1])) == [0, 1, 1]
