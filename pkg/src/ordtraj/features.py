"""Per-trajectory ordinal features and labeled datasets.

Each selected signal contributes its permutation entropy (``H``),
statistical complexity (``C``) and self-transition probability (``PST``),
in the fixed order latitude, longitude, distance and H, C, PST. Columns are
named ``<signal>_<feature>``, e.g. ``distance_PST``.
"""

from __future__ import annotations

import csv
import json
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import EmptyDatasetError, InvalidInputError, ParseError
from .geolife import Trajectory, derive_signals
from .io import atomic_write
from .ordinal import EmbeddingParams, extract_sequence, pattern_distribution
from .quantifiers import quantifiers
from .transition import build_graph, self_transition_probability

FEATURES = ("H", "C", "PST")
SIGNALS = ("latitude", "longitude", "distance")
# the feature sets compared in the experiments
FEATURE_SETS = {
    "H": ("H",),
    "C": ("C",),
    "PST": ("PST",),
    "H+C": ("H", "C"),
    "H+C+PST": ("H", "C", "PST"),
}


def _canonical(values: Iterable[str], universe: Sequence[str], what: str) -> tuple[str, ...]:
    values = set(values)
    unknown = values - set(universe)
    if unknown:
        raise InvalidInputError(f"unknown {what}: {sorted(unknown)}")
    if not values:
        raise InvalidInputError(f"{what} must be nonempty")
    return tuple(v for v in universe if v in values)


def parse_feature_set(name) -> tuple[str, ...]:
    """``"H+C+PST"`` or an iterable of feature names, in canonical order."""
    if isinstance(name, str):
        name = name.split("+")
    return _canonical([n.strip().upper() for n in name], FEATURES, "features")


def feature_set_name(features: Sequence[str]) -> str:
    return "+".join(parse_feature_set(features))


@dataclass(frozen=True)
class FeatureSpec:
    params: EmbeddingParams
    features: tuple[str, ...] = FEATURES
    signals: tuple[str, ...] = SIGNALS

    def __post_init__(self):
        object.__setattr__(self, "features", parse_feature_set(self.features))
        object.__setattr__(self, "signals", _canonical(self.signals, SIGNALS, "signals"))

    @property
    def columns(self) -> list[str]:
        return [f"{s}_{f}" for s in self.signals for f in self.features]

    @property
    def min_length(self) -> int:
        """Shortest signal that still yields one pattern transition."""
        return (self.params.dim - 1) * self.params.delay + 2


@dataclass(frozen=True)
class FeatureVector:
    traj_id: str
    label: str
    values: np.ndarray = field(repr=False)


@dataclass(frozen=True)
class Skip:
    traj_id: str
    label: str
    reason: str


def signal_features(x: np.ndarray, params: EmbeddingParams) -> dict[str, float]:
    """H, C and PST of one series (needs at least one transition)."""
    seq = extract_sequence(x, params)
    q = quantifiers(pattern_distribution(seq))
    pst = self_transition_probability(build_graph(seq))
    return {"H": q.entropy, "C": q.complexity, "PST": pst}


def extract_features(traj: Trajectory, spec: FeatureSpec, distance: str = "euclidean"):
    """FeatureVector for ``traj``, or a :class:`Skip` when a signal is too short."""
    bundle = derive_signals(traj, distance)
    signals = {s: bundle.get(s) for s in spec.signals}
    shortest = min(len(v) for v in signals.values())
    if shortest < spec.min_length:
        return Skip(traj.traj_id, traj.mode, "too_short")
    values = []
    for name in spec.signals:
        feats = signal_features(signals[name], spec.params)
        values.extend(feats[f] for f in spec.features)
    return FeatureVector(traj.traj_id, traj.mode, np.array(values))


@dataclass
class SkipReport:
    by_mode: Counter = field(default_factory=Counter)
    by_reason: Counter = field(default_factory=Counter)

    @property
    def total(self) -> int:
        return sum(self.by_mode.values())

    def add(self, skip: Skip):
        self.by_mode[skip.label] += 1
        self.by_reason[skip.reason] += 1

    def to_dict(self) -> dict:
        return {
            "total": self.total,
            "by_mode": dict(sorted(self.by_mode.items())),
            "by_reason": dict(sorted(self.by_reason.items())),
        }


@dataclass(frozen=True)
class LabeledDataset:
    """Feature matrix with one row per trajectory, rows sorted by id."""

    X: np.ndarray = field(repr=False)
    y: np.ndarray = field(repr=False)
    ids: np.ndarray = field(repr=False)
    columns: tuple[str, ...]
    params: EmbeddingParams | None = None

    def __post_init__(self):
        if self.X.ndim != 2 or self.X.shape != (len(self.y), len(self.columns)):
            raise InvalidInputError(
                f"matrix shape {self.X.shape} does not match {len(self.y)} rows x {len(self.columns)} columns"
            )
        if len(self.ids) != len(self.y):
            raise InvalidInputError("ids and labels differ in length")

    def __len__(self):
        return len(self.y)

    @property
    def classes(self) -> tuple[str, ...]:
        return tuple(sorted(set(self.y.tolist())))

    def select(self, features=FEATURES, signals=SIGNALS) -> "LabeledDataset":
        """Keep only the columns of the given feature set and signals."""
        features = parse_feature_set(features)
        signals = _canonical(signals, SIGNALS, "signals")
        wanted = [f"{s}_{f}" for s in signals for f in features]
        missing = [c for c in wanted if c not in self.columns]
        if missing:
            raise InvalidInputError(f"dataset lacks columns {missing}")
        idx = [self.columns.index(c) for c in wanted]
        return LabeledDataset(self.X[:, idx], self.y, self.ids, tuple(wanted), self.params)

    def subset_classes(self, classes: Sequence[str]) -> "LabeledDataset":
        keep = np.isin(self.y, list(classes))
        return LabeledDataset(self.X[keep], self.y[keep], self.ids[keep], self.columns, self.params)


def build_dataset(
    trajectories: Sequence[Trajectory],
    spec: FeatureSpec,
    distance: str = "euclidean",
    jobs: int = 1,
) -> tuple[LabeledDataset, SkipReport]:
    if not trajectories:
        raise InvalidInputError("no trajectories given")
    if jobs > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(
                pool.map(extract_features, trajectories, [spec] * len(trajectories),
                         [distance] * len(trajectories), chunksize=64)
            )
    else:
        results = [extract_features(t, spec, distance) for t in trajectories]
    report = SkipReport()
    vectors = []
    for r in results:
        if isinstance(r, Skip):
            report.add(r)
        else:
            vectors.append(r)
    if not vectors:
        raise EmptyDatasetError(f"all {len(trajectories)} trajectories were skipped")
    vectors.sort(key=lambda v: v.traj_id)
    dataset = LabeledDataset(
        np.vstack([v.values for v in vectors]),
        np.array([v.label for v in vectors]),
        np.array([v.traj_id for v in vectors]),
        tuple(spec.columns),
        spec.params,
    )
    return dataset, report


# --- CSV export ----------------------------------------------------------------


def write_feature_csv(path, dataset: LabeledDataset | None, columns: Sequence[str] | None = None):
    """``traj_id,mode,<columns>``; an empty dataset writes only the header."""
    cols = list(dataset.columns if dataset is not None else columns)
    with atomic_write(path) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["traj_id", "mode", *cols])
        if dataset is not None:
            for tid, label, row in zip(dataset.ids, dataset.y, dataset.X):
                w.writerow([tid, label, *(repr(float(v)) for v in row)])


def read_feature_csv(path, params: EmbeddingParams | None = None) -> LabeledDataset:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or rows[0][:2] != ["traj_id", "mode"]:
        raise ParseError(f"{path}: missing traj_id,mode header")
    columns = tuple(rows[0][2:])
    body = rows[1:]
    try:
        X = np.array([[float(v) for v in r[2:]] for r in body], dtype=float).reshape(len(body), len(columns))
    except ValueError as exc:
        raise ParseError(f"{path}: {exc}") from None
    return LabeledDataset(
        X,
        np.array([r[1] for r in body], dtype=object).astype(str) if body else np.array([], dtype=str),
        np.array([r[0] for r in body], dtype=object).astype(str) if body else np.array([], dtype=str),
        columns,
        params,
    )


def write_skip_report(path, report: SkipReport, extra: dict | None = None):
    payload = {**(extra or {}), **report.to_dict()}
    with atomic_write(path) as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
