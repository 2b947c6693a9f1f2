"""ID3 decision tree over continuous features using binary threshold splits.

Candidate thresholds are midpoints between consecutive distinct values of a
feature; the split with the largest information gain wins. Ties go to the
lowest feature index, then the lowest threshold.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import EmptySamples

GAIN_TOL = 1e-12
DEFAULT_MAX_DEPTH = 12


def entropy(labels) -> float:
    """Shannon entropy in bits of a label sequence."""
    labels = list(labels)
    if not labels:
        return 0.0
    _, counts = np.unique(np.asarray(labels), return_counts=True)
    return _entropy_counts(counts)


def _entropy_counts(counts) -> float:
    counts = np.asarray(counts, dtype=np.float64)
    total = counts.sum()
    p = counts[counts > 0] / total
    return float(-(p * np.log2(p)).sum()) + 0.0


@dataclass
class Node:
    label: int
    feature: int | None = None
    threshold: float | None = None
    left: "Node | None" = None
    right: "Node | None" = None
    gain: float = 0.0
    n_samples: int = 0

    @property
    def is_leaf(self) -> bool:
        return self.feature is None


@dataclass
class DecisionTree:
    """A trained tree; ``classes`` maps leaf label indices back to label values."""

    root: Node
    classes: list

    def predict_index(self, x) -> int:
        node = self.root
        while not node.is_leaf:
            node = node.left if x[node.feature] <= node.threshold else node.right
        return node.label

    def predict(self, x):
        return self.classes[self.predict_index(np.asarray(x, dtype=np.float64))]

    def nodes(self):
        stack = [self.root]
        while stack:
            node = stack.pop()
            yield node
            if not node.is_leaf:
                stack.extend((node.right, node.left))

    @property
    def depth(self) -> int:
        def walk(node):
            return 0 if node.is_leaf else 1 + max(walk(node.left), walk(node.right))
        return walk(self.root)


def split_gains(x: np.ndarray, y: np.ndarray, n_classes: int):
    """Information gain of every candidate split of one feature.

    Returns (thresholds, gains) with thresholds in increasing order.
    """
    order = np.argsort(x, kind="stable")
    xs, ys = x[order], y[order]
    boundaries = np.nonzero(xs[1:] != xs[:-1])[0]
    if boundaries.size == 0:
        return np.empty(0), np.empty(0)
    onehot = np.zeros((len(ys), n_classes))
    onehot[np.arange(len(ys)), ys] = 1.0
    left_counts = np.cumsum(onehot, axis=0)[boundaries]
    total = onehot.sum(axis=0)
    right_counts = total - left_counts
    n = len(ys)
    n_left = left_counts.sum(axis=1)
    n_right = n - n_left

    def h(counts, sizes):
        p = counts / sizes[:, None]
        with np.errstate(divide="ignore", invalid="ignore"):
            terms = np.where(p > 0, p * np.log2(np.where(p > 0, p, 1.0)), 0.0)
        return -terms.sum(axis=1)

    parent = _entropy_counts(total)
    gains = parent - (n_left / n) * h(left_counts, n_left) - (n_right / n) * h(right_counts, n_right)
    thresholds = (xs[boundaries] + xs[boundaries + 1]) / 2.0
    return thresholds, gains


def best_split(X: np.ndarray, y: np.ndarray, n_classes: int):
    """(feature, threshold, gain) maximizing information gain, or None if no split exists."""
    best = None
    for f in range(X.shape[1]):
        thresholds, gains = split_gains(X[:, f], y, n_classes)
        if gains.size == 0:
            continue
        i = int(np.argmax(gains >= gains.max() - GAIN_TOL))
        if best is None or gains[i] > best[2] + GAIN_TOL:
            best = (f, float(thresholds[i]), float(gains[i]))
    return best


def _majority(y: np.ndarray, n_classes: int) -> int:
    # argmax returns the first maximum, i.e. the lowest class index
    return int(np.argmax(np.bincount(y, minlength=n_classes)))


def _grow(X, y, n_classes, depth, max_depth) -> Node:
    node = Node(label=_majority(y, n_classes), n_samples=len(y))
    if depth >= max_depth or np.all(y == y[0]):
        return node
    split = best_split(X, y, n_classes)
    if split is None or split[2] <= GAIN_TOL:
        return node
    f, t, g = split
    mask = X[:, f] <= t
    node.feature, node.threshold, node.gain = f, t, g
    node.left = _grow(X[mask], y[mask], n_classes, depth + 1, max_depth)
    node.right = _grow(X[~mask], y[~mask], n_classes, depth + 1, max_depth)
    return node


def fit(X, labels, classes=None, max_depth: int = DEFAULT_MAX_DEPTH) -> DecisionTree:
    """Train on a feature matrix and a label sequence.

    ``classes`` fixes the label order used for majority tie-breaks; by
    default labels are ordered by first appearance.
    """
    X = np.asarray(X, dtype=np.float64)
    labels = list(labels)
    if len(labels) == 0:
        raise EmptySamples("cannot train a decision tree on zero samples")
    if classes is None:
        classes = list(dict.fromkeys(labels))
    index = {c: i for i, c in enumerate(classes)}
    y = np.asarray([index[c] for c in labels], dtype=np.int64)
    return DecisionTree(_grow(X, y, len(classes), 0, max_depth), list(classes))
