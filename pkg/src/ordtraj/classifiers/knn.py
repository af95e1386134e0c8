"""k-nearest-neighbour voting with a deterministic tie rule."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import cdist


@dataclass(frozen=True)
class KNNModel:
    X: np.ndarray
    y: np.ndarray  # integer class codes
    k: int
    n_classes: int

    def predict_codes(self, Xq: np.ndarray, chunk: int = 2048) -> np.ndarray:
        """Majority vote among the ``k`` nearest training points.

        Neighbours are ordered by (distance, training index). A vote tie goes
        to the tied class owning the nearest neighbour.
        """
        k = min(self.k, len(self.y))
        out = np.empty(len(Xq), dtype=np.int64)
        for lo in range(0, len(Xq), chunk):
            d = cdist(Xq[lo:lo + chunk], self.X, "sqeuclidean")
            order = np.argsort(d, axis=1, kind="stable")[:, :k]
            neigh = self.y[order]
            for r, labels in enumerate(neigh):
                votes = np.bincount(labels, minlength=self.n_classes)
                tied = votes == votes.max()
                # labels are ordered nearest first
                out[lo + r] = next(c for c in labels if tied[c])
        return out

    def to_dict(self) -> dict:
        return {"X": self.X.tolist(), "y": self.y.tolist(), "k": self.k, "n_classes": self.n_classes}

    @classmethod
    def from_dict(cls, d: dict) -> "KNNModel":
        return cls(np.array(d["X"], dtype=float).reshape(len(d["y"]), -1),
                   np.array(d["y"], dtype=np.int64), d["k"], d["n_classes"])


def fit_knn(X: np.ndarray, codes: np.ndarray, k: int, n_classes: int) -> KNNModel:
    return KNNModel(np.array(X, dtype=float), np.asarray(codes, dtype=np.int64), k, n_classes)
