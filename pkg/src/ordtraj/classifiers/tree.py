"""CART classification tree grown on Gini impurity, without pruning."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

LEAF = -1


def gini(counts: np.ndarray) -> float:
    total = counts.sum()
    if total == 0:
        return 0.0
    p = counts / total
    return float(1.0 - np.sum(p * p))


def _best_split(X, codes, n_classes, min_leaf):
    """Lowest weighted child Gini over all features and thresholds.

    Returns ``(impurity, feature, threshold)``; ties keep the first feature
    and the first (smallest) threshold.
    """
    n, n_features = X.shape
    best = (np.inf, -1, 0.0)
    onehot = np.eye(n_classes)[codes]
    for f in range(n_features):
        order = np.argsort(X[:, f], kind="stable")
        xs = X[order, f]
        left = np.cumsum(onehot[order], axis=0)[:-1]  # counts with k+1 samples on the left
        n_left = np.arange(1, n)
        n_right = n - n_left
        right = left[-1] + onehot[order[-1]] - left
        valid = (xs[:-1] < xs[1:]) & (n_left >= min_leaf) & (n_right >= min_leaf)
        if not valid.any():
            continue
        gl = 1.0 - np.sum(left ** 2, axis=1) / n_left ** 2
        gr = 1.0 - np.sum(right ** 2, axis=1) / n_right ** 2
        weighted = (n_left * gl + n_right * gr) / n
        weighted = np.where(valid, weighted, np.inf)
        k = int(np.argmin(weighted))
        if weighted[k] < best[0]:
            thr = (xs[k] + xs[k + 1]) / 2.0
            if thr >= xs[k + 1]:  # midpoint rounded up onto the right value
                thr = xs[k]
            best = (float(weighted[k]), f, float(thr))
    return best


@dataclass(frozen=True)
class TreeModel:
    """Flat node arrays; ``feature == LEAF`` marks a leaf."""

    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    counts: np.ndarray  # class counts of the training samples reaching each node
    impurity: np.ndarray

    @property
    def n_nodes(self) -> int:
        return len(self.feature)

    def apply(self, X: np.ndarray) -> np.ndarray:
        node = np.zeros(len(X), dtype=np.int64)
        active = self.feature[node] != LEAF
        while active.any():
            idx = np.flatnonzero(active)
            f = self.feature[node[idx]]
            go_left = X[idx, f] <= self.threshold[node[idx]]
            node[idx] = np.where(go_left, self.left[node[idx]], self.right[node[idx]])
            active = self.feature[node] != LEAF
        return node

    def predict_codes(self, X: np.ndarray) -> np.ndarray:
        # argmax returns the smallest class code among tied majorities
        return np.argmax(self.counts[self.apply(X)], axis=1)

    def to_dict(self) -> dict:
        return {k: getattr(self, k).tolist() for k in
                ("feature", "threshold", "left", "right", "counts", "impurity")}

    @classmethod
    def from_dict(cls, d: dict) -> "TreeModel":
        return cls(
            np.array(d["feature"], dtype=np.int64),
            np.array(d["threshold"], dtype=float),
            np.array(d["left"], dtype=np.int64),
            np.array(d["right"], dtype=np.int64),
            np.array(d["counts"], dtype=np.int64).reshape(len(d["feature"]), -1),
            np.array(d["impurity"], dtype=float),
        )


def fit_tree(X: np.ndarray, codes: np.ndarray, n_classes: int, min_samples_split: int = 2,
             min_samples_leaf: int = 5, max_depth: int | None = None) -> TreeModel:
    feature, threshold, left, right, counts, impurity = [], [], [], [], [], []

    def new_node(idx):
        c = np.bincount(codes[idx], minlength=n_classes)
        feature.append(LEAF)
        threshold.append(0.0)
        left.append(LEAF)
        right.append(LEAF)
        counts.append(c)
        impurity.append(gini(c))
        return len(feature) - 1

    stack = [(new_node(np.arange(len(codes))), np.arange(len(codes)), 0)]
    while stack:
        node, idx, depth = stack.pop()
        if impurity[node] == 0.0 or len(idx) < min_samples_split:
            continue
        if max_depth is not None and depth >= max_depth:
            continue
        child_gini, f, thr = _best_split(X[idx], codes[idx], n_classes, min_samples_leaf)
        # only splits that strictly lower the weighted impurity
        if f < 0 or not child_gini < impurity[node] - 1e-12:
            continue
        mask = X[idx, f] <= thr
        li, ri = idx[mask], idx[~mask]
        feature[node], threshold[node] = f, thr
        left[node] = new_node(li)
        right[node] = new_node(ri)
        stack.append((right[node], ri, depth + 1))
        stack.append((left[node], li, depth + 1))
    return TreeModel(
        np.array(feature, dtype=np.int64),
        np.array(threshold, dtype=float),
        np.array(left, dtype=np.int64),
        np.array(right, dtype=np.int64),
        np.array(counts, dtype=np.int64).reshape(len(feature), n_classes),
        np.array(impurity, dtype=float),
    )
