"""Stratified k-fold evaluation, per-class metrics and parameter sweeps."""

from __future__ import annotations

import csv
import io
import json
import logging
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy import stats

from .classifiers import ClassifierConfig, canonical_kind, train
from .errors import InvalidInputError
from .features import SIGNALS, LabeledDataset, feature_set_name, parse_feature_set

logger = logging.getLogger(__name__)

N_FOLDS = 5
OVERALL = "__overall__"
RESULT_COLUMNS = [
    "D", "tau", "features", "signals", "classifier", "classes", "class",
    "precision", "sensitivity", "f1", "accuracy", "ci_half_width", "seed",
]


@dataclass(frozen=True)
class FoldPlan:
    """Fold number of every dataset row, plus the ids it was built from."""

    assignment: np.ndarray = field(repr=False)
    ids: np.ndarray = field(repr=False)
    n_folds: int
    seed: int

    def test_rows(self, fold: int) -> np.ndarray:
        return np.flatnonzero(self.assignment == fold)

    def train_rows(self, fold: int) -> np.ndarray:
        return np.flatnonzero(self.assignment != fold)

    @property
    def folds(self) -> list[np.ndarray]:
        """Trajectory ids of each fold."""
        return [self.ids[self.test_rows(f)] for f in range(self.n_folds)]


def make_folds(dataset: LabeledDataset, seed: int = 0, n_folds: int = N_FOLDS) -> FoldPlan:
    """Stratified random partition into ``n_folds`` folds.

    Each class is shuffled and dealt round-robin, continuing the deal where
    the previous class stopped, so both per-class and total fold sizes
    differ by at most one.
    """
    y = np.asarray(dataset.y)
    if len(y) == 0:
        raise InvalidInputError("cannot fold an empty dataset")
    rng = np.random.default_rng(seed)
    assignment = np.full(len(y), -1, dtype=np.int64)
    offset = 0
    for cls in dataset.classes:
        rows = np.flatnonzero(y == cls)
        if len(rows) < n_folds:
            raise InvalidInputError(f"class {cls!r} has {len(rows)} members, fewer than {n_folds} folds")
        perm = rng.permutation(rows)
        assignment[perm] = (offset + np.arange(len(perm))) % n_folds
        offset = (offset + len(perm)) % n_folds
    return FoldPlan(assignment, np.asarray(dataset.ids), n_folds, seed)


def confusion_matrix(y_true, y_pred, classes: Sequence[str]) -> np.ndarray:
    """Rows are true classes, columns predicted classes."""
    index = {c: i for i, c in enumerate(classes)}
    cm = np.zeros((len(classes), len(classes)), dtype=np.int64)
    for t, p in zip(y_true, y_pred):
        cm[index[t], index[p]] += 1
    return cm


def per_class_metrics(cm: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray, float]:
    """Precision, sensitivity, F1 per class and accuracy.

    A ratio with an empty denominator (a class never predicted, or absent
    from the test fold) counts as 0.
    """
    tp = np.diag(cm).astype(float)
    predicted = cm.sum(axis=0)
    actual = cm.sum(axis=1)
    with np.errstate(divide="ignore", invalid="ignore"):
        precision = np.where(predicted > 0, tp / predicted, 0.0)
        sensitivity = np.where(actual > 0, tp / actual, 0.0)
        denom = precision + sensitivity
        f1 = np.where(denom > 0, 2 * precision * sensitivity / denom, 0.0)
    accuracy = float(tp.sum() / cm.sum())
    return precision, sensitivity, f1, accuracy


def ci_half_width(values, confidence: float = 0.95) -> float:
    """Student-t half-width of the mean of ``values``."""
    values = np.asarray(values, dtype=float)
    k = len(values)
    if k < 2:
        return 0.0
    s = values.std(ddof=1)
    return float(stats.t.ppf(0.5 + confidence / 2, k - 1) * s / np.sqrt(k))


@dataclass
class MetricReport:
    classifier: str
    classes: tuple[str, ...]
    features: str = ""
    signals: tuple[str, ...] = SIGNALS
    dim: int | None = None
    delay: int | None = None
    seed: int = 0
    fold_accuracy: np.ndarray = field(default=None, repr=False)
    fold_precision: np.ndarray = field(default=None, repr=False)  # (folds, classes)
    fold_sensitivity: np.ndarray = field(default=None, repr=False)
    fold_f1: np.ndarray = field(default=None, repr=False)
    confusion: list = field(default_factory=list, repr=False)

    @property
    def accuracy(self) -> float:
        return float(np.mean(self.fold_accuracy))

    @property
    def accuracy_ci(self) -> float:
        return ci_half_width(self.fold_accuracy)

    def metric(self, name: str, cls: str) -> tuple[float, float]:
        """(mean, 95% half-width) of ``precision``, ``sensitivity`` or ``f1`` for one class."""
        values = getattr(self, f"fold_{name}")[:, self.classes.index(cls)]
        return float(values.mean()), ci_half_width(values)

    def rows(self) -> list[dict]:
        """Result-file rows: one per class, then the overall row.

        Class rows carry the F1 half-width in ``ci_half_width``; the overall
        row carries the accuracy half-width.
        """
        base = {
            "D": self.dim if self.dim is not None else "",
            "tau": self.delay if self.delay is not None else "",
            "features": self.features,
            "signals": "|".join(self.signals),
            "classifier": self.classifier,
            "classes": "|".join(self.classes),
            "accuracy": repr(self.accuracy),
            "seed": self.seed,
        }
        out = []
        for c in self.classes:
            f1, f1_ci = self.metric("f1", c)
            out.append({**base, "class": c,
                        "precision": repr(self.metric("precision", c)[0]),
                        "sensitivity": repr(self.metric("sensitivity", c)[0]),
                        "f1": repr(f1), "ci_half_width": repr(f1_ci)})
        out.append({**base, "class": OVERALL, "precision": "", "sensitivity": "", "f1": "",
                    "ci_half_width": repr(self.accuracy_ci)})
        return out

    def to_dict(self) -> dict:
        per_class = {}
        for c in self.classes:
            per_class[c] = {}
            for name in ("precision", "sensitivity", "f1"):
                mean, hw = self.metric(name, c)
                per_class[c][name] = {"mean": mean, "ci_half_width": hw}
        return {
            "D": self.dim, "tau": self.delay, "features": self.features,
            "signals": list(self.signals), "classifier": self.classifier,
            "classes": list(self.classes), "seed": self.seed,
            "accuracy": {"mean": self.accuracy, "ci_half_width": self.accuracy_ci,
                         "folds": self.fold_accuracy.tolist()},
            "per_class": per_class,
            "confusion": [cm.tolist() for cm in self.confusion],
        }


def evaluate(dataset: LabeledDataset, config: ClassifierConfig, plan: FoldPlan) -> MetricReport:
    """Train on all folds but one, test on the held-out fold, for every fold."""
    if len(plan.assignment) != len(dataset) or not np.array_equal(plan.ids, dataset.ids):
        raise InvalidInputError("fold plan was built for a different dataset")
    classes = dataset.classes
    acc, prec, sens, f1s, cms = [], [], [], [], []
    for fold in range(plan.n_folds):
        tr, te = plan.train_rows(fold), plan.test_rows(fold)
        missing = set(classes) - set(dataset.y[tr].tolist())
        if missing:
            raise InvalidInputError(f"training split of fold {fold} lacks classes {sorted(missing)}")
        model = train(config, dataset.X[tr], dataset.y[tr])
        pred = model.predict(dataset.X[te])
        cm = confusion_matrix(dataset.y[te], pred, classes)
        p, s, f, a = per_class_metrics(cm)
        acc.append(a)
        prec.append(p)
        sens.append(s)
        f1s.append(f)
        cms.append(cm)
    signals = tuple(s for s in SIGNALS if any(c.startswith(s + "_") for c in dataset.columns))
    feats = {c.rsplit("_", 1)[1] for c in dataset.columns}
    return MetricReport(
        classifier=config.kind, classes=classes,
        features=feature_set_name(feats), signals=signals,
        dim=dataset.params.dim if dataset.params else None,
        delay=dataset.params.delay if dataset.params else None,
        seed=plan.seed,
        fold_accuracy=np.array(acc), fold_precision=np.array(prec),
        fold_sensitivity=np.array(sens), fold_f1=np.array(f1s), confusion=cms,
    )


# --- sweeps --------------------------------------------------------------------


@dataclass(frozen=True)
class Grid:
    dims: tuple[int, ...] = (5,)
    delays: tuple[int, ...] = (1,)
    feature_sets: tuple[str, ...] = ("H+C+PST",)
    signal_sets: tuple[tuple[str, ...], ...] = (SIGNALS,)
    classifiers: tuple[str, ...] = ("svm_rbf",)
    class_subsets: tuple[tuple[str, ...], ...] = ((),)  # () means every class

    def __post_init__(self):
        object.__setattr__(self, "feature_sets", tuple(feature_set_name(f) for f in self.feature_sets))
        object.__setattr__(self, "classifiers", tuple(canonical_kind(k) for k in self.classifiers))
        for axis in ("dims", "delays", "feature_sets", "signal_sets", "classifiers", "class_subsets"):
            if not getattr(self, axis):
                raise InvalidInputError(f"grid axis {axis} is empty")

    @property
    def size(self) -> int:
        return (len(self.dims) * len(self.delays) * len(self.feature_sets) * len(self.signal_sets)
                * len(self.classifiers) * len(self.class_subsets))


def _run_cell(args):
    X, y, ids, columns, params, config, plan, meta = args
    ds = LabeledDataset(X, y, ids, columns, params)
    report = evaluate(ds, config, plan)
    report.features, report.signals = meta
    return report


def sweep(
    grid: Grid,
    source: Callable[[int, int], LabeledDataset],
    seed: int = 0,
    jobs: int = 1,
    config_overrides: dict | None = None,
    on_report: Callable[[MetricReport], None] | None = None,
    skip_invalid: bool = False,
) -> list[MetricReport]:
    """Evaluate every grid cell; reports come back in canonical grid order.

    ``source(D, tau)`` supplies the full feature matrix for one embedding.
    Folds are made once per (D, tau, class subset) and shared by every
    classifier and feature set of that slice. With ``skip_invalid`` a slice
    that cannot be folded (too few members of a class) is logged and left
    out instead of aborting the sweep.
    """
    overrides = config_overrides or {}
    tasks = []
    for dim in grid.dims:
        for delay in grid.delays:
            try:
                full = source(dim, delay)
            except InvalidInputError as exc:
                if not skip_invalid:
                    raise
                logger.warning("skipping D=%d tau=%d: %s", dim, delay, exc)
                continue
            for subset in grid.class_subsets:
                ds = full.subset_classes(subset) if subset else full
                try:
                    if len(ds.classes) < 2:
                        raise InvalidInputError(f"need at least 2 classes, found {list(ds.classes)}")
                    plan = make_folds(ds, seed)
                except InvalidInputError as exc:
                    if not skip_invalid:
                        raise
                    logger.warning("skipping D=%d tau=%d classes=%s: %s", dim, delay,
                                   "|".join(subset) or "all", exc)
                    continue
                for fs in grid.feature_sets:
                    for signals in grid.signal_sets:
                        sel = ds.select(parse_feature_set(fs), signals)
                        for kind in grid.classifiers:
                            cfg = ClassifierConfig(kind, seed=seed, **overrides)
                            tasks.append((sel.X, sel.y, sel.ids, sel.columns, sel.params, cfg, plan,
                                          (fs, tuple(s for s in SIGNALS if s in signals))))
    reports: list[MetricReport | None] = [None] * len(tasks)
    if jobs > 1 and len(tasks) > 1:
        from concurrent.futures import ProcessPoolExecutor, as_completed

        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futures = {pool.submit(_run_cell, t): i for i, t in enumerate(tasks)}
            for fut in as_completed(futures):
                reports[futures[fut]] = fut.result()
                if on_report:
                    on_report(reports[futures[fut]])
    else:
        for i, t in enumerate(tasks):
            reports[i] = _run_cell(t)
            if on_report:
                on_report(reports[i])
    return reports


def results_csv(reports: Iterable[MetricReport]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=RESULT_COLUMNS, lineterminator="\n")
    w.writeheader()
    for r in reports:
        w.writerows(r.rows())
    return buf.getvalue()


def results_json(reports: Iterable[MetricReport]) -> str:
    return json.dumps([r.to_dict() for r in reports], indent=1, sort_keys=True) + "\n"
