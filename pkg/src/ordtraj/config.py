"""Run configuration: YAML file, ``ORDTRAJ_*`` environment overrides, CLI flags."""

from __future__ import annotations

import os
from dataclasses import asdict, dataclass, field
from pathlib import Path

import yaml

from .classifiers import canonical_kind
from .errors import InvalidInputError
from .evaluation import Grid
from .features import SIGNALS, FEATURE_SETS, feature_set_name
from .geolife import MODES
from .ordinal import MAX_DIM, MIN_DIM

ENV_PREFIX = "ORDTRAJ_"
# environment variable suffix -> (config key, parser)
ENV_KEYS = {
    "DATA_ROOT": ("data_root", str),
    "OUT": ("out", str),
    "SEED": ("seed", int),
    "JOBS": ("jobs", int),
    "DISTANCE": ("distance", str),
}
DISTANCES = ("euclidean", "haversine")


@dataclass
class GridConfig:
    D: list[int] = field(default_factory=lambda: [5])
    tau: list[int] = field(default_factory=lambda: [1])
    features: list[str] = field(default_factory=lambda: list(FEATURE_SETS))
    signals: list[list[str]] = field(default_factory=lambda: [list(SIGNALS)])
    classifiers: list[str] = field(default_factory=lambda: ["knn", "svm_linear", "svm_rbf", "tree"])
    classes: list[list[str]] = field(default_factory=lambda: [[]])

    def validate(self):
        for axis in ("D", "tau", "features", "signals", "classifiers", "classes"):
            if not getattr(self, axis):
                raise InvalidInputError(f"grid.{axis} must be nonempty")
        for d in self.D:
            if not MIN_DIM <= int(d) <= MAX_DIM:
                raise InvalidInputError(f"grid.D value {d} outside [{MIN_DIM}, {MAX_DIM}]")
        for t in self.tau:
            if int(t) < 1:
                raise InvalidInputError(f"grid.tau value {t} must be >= 1")
        self.features = [feature_set_name(f) for f in self.features]
        self.classifiers = [canonical_kind(k) for k in self.classifiers]
        for sig in self.signals:
            bad = set(sig) - set(SIGNALS)
            if bad or not sig:
                raise InvalidInputError(f"bad signal set {sig}")
        for subset in self.classes:
            bad = set(subset) - set(MODES)
            if bad:
                raise InvalidInputError(f"unknown classes {sorted(bad)}")

    def to_grid(self) -> Grid:
        return Grid(
            dims=tuple(int(d) for d in self.D),
            delays=tuple(int(t) for t in self.tau),
            feature_sets=tuple(self.features),
            signal_sets=tuple(tuple(s for s in SIGNALS if s in sig) for sig in self.signals),
            classifiers=tuple(self.classifiers),
            class_subsets=tuple(tuple(s for s in MODES if s in sub) for sub in self.classes),
        )

    @property
    def all_signals(self) -> tuple[str, ...]:
        wanted = {s for sig in self.signals for s in sig}
        return tuple(s for s in SIGNALS if s in wanted)


@dataclass
class RunConfig:
    data_root: str | None = None
    out: str = "out"
    seed: int = 0
    jobs: int = 1
    distance: str = "euclidean"
    grid: GridConfig = field(default_factory=GridConfig)
    classifier: dict = field(default_factory=dict)  # ClassifierConfig overrides, e.g. C, gamma
    report: dict = field(default_factory=lambda: {"fixed_D": 5, "fixed_tau": 1})

    def validate(self) -> "RunConfig":
        if self.distance not in DISTANCES:
            raise InvalidInputError(f"distance must be one of {DISTANCES}, got {self.distance!r}")
        if self.jobs < 1:
            raise InvalidInputError(f"jobs must be >= 1, got {self.jobs}")
        self.grid.validate()
        return self

    @property
    def out_dir(self) -> Path:
        return Path(self.out)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        d = dict(d or {})
        unknown = set(d) - {f for f in cls.__dataclass_fields__}
        if unknown:
            raise InvalidInputError(f"unknown config keys {sorted(unknown)}")
        grid = d.pop("grid", None) or {}
        bad = set(grid) - set(GridConfig.__dataclass_fields__)
        if bad:
            raise InvalidInputError(f"unknown grid keys {sorted(bad)}")
        base = cls(grid=GridConfig(**grid))
        for key, value in d.items():
            if key == "report":
                value = {**base.report, **(value or {})}
            setattr(base, key, value)
        base.seed, base.jobs = int(base.seed), int(base.jobs)
        return base.validate()

    def dump(self) -> str:
        return yaml.safe_dump(self.to_dict(), sort_keys=False)


def load_config(path=None, env=None, **overrides) -> RunConfig:
    """Defaults, then the YAML file, then ``ORDTRAJ_*`` variables, then ``overrides``."""
    data = {}
    if path is not None:
        with open(path) as fh:
            data = yaml.safe_load(fh) or {}
    env = os.environ if env is None else env
    for suffix, (key, conv) in ENV_KEYS.items():
        if ENV_PREFIX + suffix in env:
            data[key] = conv(env[ENV_PREFIX + suffix])
    data.update({k: v for k, v in overrides.items() if v is not None})
    return RunConfig.from_dict(data)

