"""The four classifiers compared on ordinal features.

``train`` fits one of k-NN, linear SVM, RBF SVM or a CART tree behind a
common :class:`TrainedModel`; ``predict`` labels new vectors. Standardization
(on by default for k-NN and SVMs) is fitted on the training rows only.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from typing import Sequence

import numpy as np

from ..errors import InvalidInputError
from .knn import KNNModel, fit_knn
from .scaling import Standardizer
from .svm import SVMModel, fit_svm
from .tree import TreeModel, fit_tree

KINDS = ("knn", "svm_linear", "svm_rbf", "tree")
ALIASES = {
    "knn": "knn", "k-nn": "knn",
    "svm_linear": "svm_linear", "svm-l": "svm_linear", "svm_l": "svm_linear",
    "svm_rbf": "svm_rbf", "svm-r": "svm_rbf", "svm_r": "svm_rbf",
    "tree": "tree", "dt": "tree", "decision_tree": "tree",
}
MODEL_FORMAT_VERSION = 1


def canonical_kind(kind: str) -> str:
    try:
        return ALIASES[kind.strip().lower()]
    except KeyError:
        raise InvalidInputError(f"unknown classifier kind {kind!r}; expected one of {KINDS}") from None


@dataclass(frozen=True)
class ClassifierConfig:
    kind: str
    k: int = 2
    C: float = 1.0
    gamma: float | str = "scale"
    min_samples_split: int = 2
    min_samples_leaf: int = 5
    max_depth: int | None = None
    standardize: bool | None = None  # None: on for knn and svm, off for tree
    tol: float = 1e-3
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "kind", canonical_kind(self.kind))
        if self.k < 1:
            raise InvalidInputError(f"k must be >= 1, got {self.k}")
        if self.C <= 0:
            raise InvalidInputError(f"C must be positive, got {self.C}")
        if self.gamma != "scale" and float(self.gamma) <= 0:
            raise InvalidInputError(f"gamma must be positive or 'scale', got {self.gamma}")

    @property
    def uses_scaling(self) -> bool:
        if self.standardize is None:
            return self.kind != "tree"
        return self.standardize


@dataclass(frozen=True)
class TrainedModel:
    config: ClassifierConfig
    classes: tuple[str, ...]
    n_features: int
    scaler: Standardizer | None
    estimator: KNNModel | SVMModel | TreeModel

    def _prepare(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        if X.ndim == 1:
            X = X[None, :]
        if X.shape[1] != self.n_features:
            raise InvalidInputError(f"expected {self.n_features} features, got {X.shape[1]}")
        if not np.all(np.isfinite(X)):
            raise InvalidInputError("non-finite feature value")
        return self.scaler.transform(X) if self.scaler is not None else X

    def predict(self, X) -> np.ndarray:
        codes = self.estimator.predict_codes(self._prepare(X))
        return np.asarray(self.classes)[codes]

    def to_json(self) -> str:
        return json.dumps({
            "version": MODEL_FORMAT_VERSION,
            "config": asdict(self.config),
            "classes": list(self.classes),
            "n_features": self.n_features,
            "scaler": self.scaler.to_dict() if self.scaler is not None else None,
            "estimator": self.estimator.to_dict(),
        })

    @classmethod
    def from_json(cls, text: str) -> "TrainedModel":
        d = json.loads(text)
        if d.get("version") != MODEL_FORMAT_VERSION:
            raise InvalidInputError(f"unsupported model format version {d.get('version')}")
        config = ClassifierConfig(**d["config"])
        est_cls = {"knn": KNNModel, "tree": TreeModel}.get(config.kind, SVMModel)
        scaler = Standardizer.from_dict(d["scaler"]) if d["scaler"] is not None else None
        return cls(config, tuple(d["classes"]), d["n_features"], scaler,
                   est_cls.from_dict(d["estimator"]))


def train(config: ClassifierConfig, X, y: Sequence) -> TrainedModel:
    """Fit ``config.kind`` on rows ``X`` with labels ``y``."""
    X = np.asarray(X, dtype=float)
    y = np.asarray(y)
    if X.ndim != 2 or len(X) != len(y) or len(X) == 0:
        raise InvalidInputError(f"bad training shapes X={X.shape}, y={y.shape}")
    if not np.all(np.isfinite(X)):
        raise InvalidInputError("non-finite feature value in training data")
    classes, codes = np.unique(y, return_inverse=True)
    if len(classes) < 2:
        raise InvalidInputError(f"need at least 2 classes, got {list(classes)}")
    per_class = np.bincount(codes)
    if per_class.min() < 2:
        raise InvalidInputError(f"class {classes[per_class.argmin()]!r} has fewer than 2 examples")
    scaler = Standardizer.fit(X) if config.uses_scaling else None
    Xs = scaler.transform(X) if scaler is not None else X
    n_classes = len(classes)
    if config.kind == "knn":
        est = fit_knn(Xs, codes, config.k, n_classes)
    elif config.kind == "tree":
        est = fit_tree(Xs, codes, n_classes, config.min_samples_split,
                       config.min_samples_leaf, config.max_depth)
    else:
        kernel = "linear" if config.kind == "svm_linear" else "rbf"
        est = fit_svm(Xs, codes, n_classes, kernel, config.C, config.gamma, config.tol)
    return TrainedModel(config, tuple(str(c) for c in classes), X.shape[1], scaler, est)


def predict(model: TrainedModel, X) -> np.ndarray | str:
    """Label a single vector (returns a string) or a matrix of rows."""
    single = np.ndim(X) == 1
    labels = model.predict(X)
    return str(labels[0]) if single else labels


__all__ = [
    "KINDS", "ClassifierConfig", "TrainedModel", "canonical_kind", "train", "predict",
]
