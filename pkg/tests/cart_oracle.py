"""Brute-force greedy CART used as an independent reference in tests.

Each node enumerates every (feature, midpoint) pair and evaluates the
weighted Gini impurity of the children directly from label counts.
"""

from collections import Counter


def gini(labels):
    n = len(labels)
    if n == 0:
        return 0.0
    return 1.0 - sum((c / n) ** 2 for c in Counter(labels).values())


def best_split(X, y):
    best = None
    n = len(y)
    for f in range(len(X[0])):
        values = sorted(set(row[f] for row in X))
        for lo, hi in zip(values, values[1:]):
            thr = (lo + hi) / 2
            left = [y[i] for i in range(n) if X[i][f] <= thr]
            right = [y[i] for i in range(n) if X[i][f] > thr]
            cost = len(left) * gini(left) + len(right) * gini(right)
            if best is None or cost < best[0] - 1e-12:
                best = (cost, f, thr)
    return best


def majority(labels, order):
    counts = Counter(labels)
    return max(order, key=lambda c: (counts[c], -order.index(c)))


def grow(X, y, depth, order):
    if depth == 0 or len(set(y)) <= 1:
        return ("leaf", majority(y, order))
    split = best_split(X, y)
    if split is None:
        return ("leaf", majority(y, order))
    _, f, thr = split
    li = [i for i in range(len(y)) if X[i][f] <= thr]
    ri = [i for i in range(len(y)) if X[i][f] > thr]
    return (
        "node", f, thr,
        grow([X[i] for i in li], [y[i] for i in li], depth - 1, order),
        grow([X[i] for i in ri], [y[i] for i in ri], depth - 1, order),
    )


def predict(tree, row):
    while tree[0] == "node":
        _, f, thr, left, right = tree
        tree = left if row[f] <= thr else right
    return tree[1]


def training_accuracy(X, y, depth):
    order = sorted(set(y))
    tree = grow(X, y, depth, order)
    return sum(predict(tree, row) == label for row, label in zip(X, y)) / len(y)
