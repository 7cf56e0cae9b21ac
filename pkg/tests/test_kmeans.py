import numpy as np
import pytest

from kwaypart.cuts import rand_index
from kwaypart.kmeans import kmeans_rows


def test_distinct_points_recovered():
    centers = np.array([[0.0, 0.0], [5.0, 0.0], [0.0, 5.0]])
    labels = np.repeat(np.arange(3), 4)
    res = kmeans_rows(centers[labels], 3, seed=1, restarts=3)
    assert rand_index(res.labels, labels) == 1.0
    assert res.inertia == pytest.approx(0.0, abs=1e-24)


def test_same_seed_same_labels(rng):
    X = rng.standard_normal((80, 3))
    a = kmeans_rows(X, 4, seed=9)
    b = kmeans_rows(X, 4, seed=9)
    np.testing.assert_array_equal(a.labels.labels, b.labels.labels)
    assert a.inertia == b.inertia


def test_restarts_never_worse(rng):
    X = rng.standard_normal((100, 2))
    one = kmeans_rows(X, 5, seed=3, restarts=1)
    many = kmeans_rows(X, 5, seed=3, restarts=8)
    assert many.inertia <= one.inertia + 1e-12


def test_inertia_history_non_increasing(rng):
    X = rng.standard_normal((60, 4))
    hist = np.array(kmeans_rows(X, 3, seed=0).inertia_history)
    assert np.all(np.diff(hist) <= 1e-12)


def test_too_many_clusters():
    with pytest.raises(ValueError):
        kmeans_rows(np.zeros((3, 2)), 4)
