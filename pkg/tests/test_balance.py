import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from altsent.balance import SmoteConfig, nearest_neighbors, smote, smote_with_provenance


def test_balanced_input_unchanged():
    X = np.arange(8.0).reshape(4, 2)
    y = np.array(["a", "b", "a", "b"])
    Xo, yo = smote(X, y)
    np.testing.assert_array_equal(Xo, X)
    np.testing.assert_array_equal(yo, y)


def test_singleton_class_is_duplicated():
    X = np.array([[0.0, 0.0], [1.0, 1.0], [2.0, 2.0], [9.0, 9.0]])
    y = np.array([0, 0, 0, 1])
    Xo, yo = smote(X, y, SmoteConfig(seed=3))
    np.testing.assert_array_equal(Xo[4:], np.tile([9.0, 9.0], (2, 1)))
    assert yo.tolist() == [0, 0, 0, 1, 1, 1]


def test_two_point_class_lands_on_segment():
    p, q = np.array([1.0, 2.0]), np.array([4.0, -1.0])
    X = np.vstack([p, q, np.zeros((8, 2)) + np.arange(8)[:, None]])
    y = np.array([1, 1] + [0] * 8)
    Xo, _ = smote(X, y, SmoteConfig(k_neighbors=5, seed=1))
    for row in Xo[10:]:
        d = q - p
        u = np.dot(row - p, d) / np.dot(d, d)
        assert -1e-12 <= u <= 1 + 1e-12
        np.testing.assert_allclose(p + u * d, row, atol=1e-12)


def test_empty_and_bad_config():
    with pytest.raises(ValueError):
        smote(np.empty((0, 2)), np.array([]))
    with pytest.raises(ValueError):
        SmoteConfig(k_neighbors=0)


def test_neighbour_ties_go_to_lower_index():
    pts = np.array([[0.0], [1.0], [-1.0], [2.0]])
    assert nearest_neighbors(pts, 2)[0].tolist() == [1, 2]


def test_neighbours_match_brute_force():
    rng = np.random.default_rng(0)
    pts = rng.integers(0, 4, size=(40, 2)).astype(float)
    nn = nearest_neighbors(pts, 3)
    for i in range(len(pts)):
        order = sorted((float(np.linalg.norm(pts[i] - pts[j])), j) for j in range(len(pts)) if j != i)
        assert nn[i].tolist() == [j for _, j in order[:3]]


@st.composite
def imbalanced(draw):
    n_classes = draw(st.integers(1, 4))
    sizes = [draw(st.integers(1, 25)) for _ in range(n_classes)]
    dims = draw(st.integers(1, 4))
    seed = draw(st.integers(0, 2**31))
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(sum(sizes), dims)).round(draw(st.integers(0, 3)))
    y = np.repeat(np.arange(n_classes), sizes)
    y = y[rng.permutation(len(y))]
    return X, y, draw(st.integers(1, 7)), seed


@settings(max_examples=200, deadline=None)
@given(imbalanced())
def test_smote_properties(case):
    X, y, k, seed = case
    cfg = SmoteConfig(k, seed)
    res = smote_with_provenance(X, y, cfg)
    _, counts = np.unique(res.y, return_counts=True)
    assert (counts == counts.max()).all()
    n = len(X)
    np.testing.assert_array_equal(res.X[:n], X)
    np.testing.assert_array_equal(res.y[:n], y)
    for row, label, (a, b) in zip(res.X[n:], res.y[n:], res.pairs):
        assert y[a] == label and y[b] == label
        assert np.all(row >= np.minimum(X[a], X[b])) and np.all(row <= np.maximum(X[a], X[b]))
    again = smote_with_provenance(X, y, cfg)
    assert again.X.tobytes() == res.X.tobytes() and again.y.tobytes() == res.y.tobytes()
