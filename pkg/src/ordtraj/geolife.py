"""GeoLife trajectory ingestion.

Reads ``Data/<user>/Trajectory/*.plt`` point files and ``Data/<user>/labels.txt``
mode annotations, cuts each user's point stream into per-mode trajectories
and derives the latitude, longitude and step-distance signals.

A trajectory is a maximal run of consecutive points inside one label
interval (closed at both ends) with at least ``MIN_POINTS`` points. Only the
four canonical modes survive; car and taxi are merged.
"""

from __future__ import annotations

import json
import logging
from collections import Counter
from dataclasses import dataclass, field
from datetime import datetime
from pathlib import Path
from typing import Iterable, Iterator

import numpy as np

from .errors import InvalidInputError, ParseError, ValidationError

logger = logging.getLogger(__name__)

PLT_HEADER_LINES = 6
MIN_POINTS = 10
MODES = ("walk", "bike", "bus", "car_taxi")
MODE_MAP = {
    "walk": "walk",
    "walking": "walk",
    "bike": "bike",
    "bus": "bus",
    "car": "car_taxi",
    "taxi": "car_taxi",
}
EARTH_RADIUS_M = 6_371_008.8


@dataclass(frozen=True)
class GpsPoint:
    latitude: float
    longitude: float
    timestamp: datetime


@dataclass(frozen=True)
class LabelInterval:
    start: datetime
    end: datetime
    mode: str

    def __post_init__(self):
        if self.end < self.start:
            raise ValidationError(f"label interval ends ({self.end}) before it starts ({self.start})")

    def contains(self, t: datetime) -> bool:
        return self.start <= t <= self.end


def _check_coords(lat: float, lon: float, line: int | None = None):
    if not (np.isfinite(lat) and -90.0 <= lat <= 90.0):
        raise ValidationError(f"latitude {lat} outside [-90, 90]", line)
    if not (np.isfinite(lon) and -180.0 <= lon <= 180.0):
        raise ValidationError(f"longitude {lon} outside [-180, 180]", line)


def _parse_plt_time(date: str, clock: str, line: int) -> datetime:
    try:
        return datetime.strptime(f"{date} {clock}", "%Y-%m-%d %H:%M:%S")
    except ValueError:
        raise ParseError(f"bad date/time {date!r} {clock!r}", line) from None


def parse_plt(content: str) -> list[GpsPoint]:
    """Parse the text of one PLT file.

    Records look like ``lat,lon,0,altitude_feet,days_since_1899,date,time``.
    The altitude and serial-date fields must be numeric but are discarded.
    Line numbers in errors are 1-based and count the header.
    """
    points = []
    lines = content.splitlines()
    for lineno, raw in enumerate(lines[PLT_HEADER_LINES:], start=PLT_HEADER_LINES + 1):
        text = raw.strip()
        if not text:
            continue
        fields = text.split(",")
        if len(fields) != 7:
            raise ParseError(f"expected 7 comma-separated fields, got {len(fields)}", lineno)
        try:
            lat, lon = float(fields[0]), float(fields[1])
            for extra in fields[2:5]:
                float(extra)
        except ValueError:
            raise ParseError(f"non-numeric field in {text!r}", lineno) from None
        _check_coords(lat, lon, lineno)
        points.append(GpsPoint(lat, lon, _parse_plt_time(fields[5], fields[6], lineno)))
    return points


def format_plt(points: Iterable[GpsPoint]) -> str:
    """Render points as a PLT file (inverse of :func:`parse_plt` on lat, lon, time)."""
    header = [
        "Geolife trajectory",
        "WGS 84",
        "Altitude is in Feet",
        "Reserved 3",
        "0,2,255,My Track,0,0,2,8421376",
        "0",
    ]
    epoch = datetime(1899, 12, 30)
    rows = []
    for p in points:
        days = (p.timestamp - epoch).total_seconds() / 86400.0
        rows.append(
            f"{p.latitude!r},{p.longitude!r},0,0,{days!r},"
            f"{p.timestamp:%Y-%m-%d},{p.timestamp:%H:%M:%S}"
        )
    return "\n".join(header + rows) + "\n"


def parse_labels(content: str) -> list[LabelInterval]:
    """Parse ``labels.txt``; unknown mode strings are kept verbatim."""
    intervals = []
    lines = content.splitlines()
    for lineno, raw in enumerate(lines[1:], start=2):
        text = raw.strip()
        if not text:
            continue
        fields = text.split("\t")
        if len(fields) != 3:
            raise ParseError(f"expected 3 tab-separated fields, got {len(fields)}", lineno)
        try:
            start = datetime.strptime(fields[0].strip(), "%Y/%m/%d %H:%M:%S")
            end = datetime.strptime(fields[1].strip(), "%Y/%m/%d %H:%M:%S")
        except ValueError:
            raise ParseError(f"malformed timestamp in {text!r}", lineno) from None
        if end < start:
            raise ValidationError(f"interval end {fields[1]} precedes start {fields[0]}", lineno)
        intervals.append(LabelInterval(start, end, fields[2].strip()))
    return intervals


@dataclass(frozen=True)
class Trajectory:
    """Points of one uninterrupted single-mode run, as parallel arrays."""

    traj_id: str
    user: str
    mode: str
    latitude: np.ndarray = field(repr=False)
    longitude: np.ndarray = field(repr=False)
    timestamps: np.ndarray = field(repr=False)  # datetime64[s]

    def __post_init__(self):
        if self.mode not in MODES:
            raise InvalidInputError(f"unknown canonical mode {self.mode!r}")
        n = len(self.latitude)
        if not len(self.longitude) == len(self.timestamps) == n:
            raise InvalidInputError("latitude, longitude and timestamps differ in length")
        if n < MIN_POINTS:
            raise InvalidInputError(f"trajectory {self.traj_id} has {n} < {MIN_POINTS} points")
        if np.any(np.diff(self.timestamps) < np.timedelta64(0, "s")):
            raise InvalidInputError(f"trajectory {self.traj_id} has decreasing timestamps")

    def __len__(self):
        return len(self.latitude)

    @property
    def points(self) -> list[GpsPoint]:
        return [
            GpsPoint(float(a), float(o), t.astype(datetime))
            for a, o, t in zip(self.latitude, self.longitude, self.timestamps)
        ]

    def to_json(self) -> str:
        times = np.datetime_as_string(self.timestamps, unit="s")
        pts = [[float(a), float(o), str(t)] for a, o, t in zip(self.latitude, self.longitude, times)]
        return json.dumps({"id": self.traj_id, "user": self.user, "mode": self.mode, "points": pts})

    @classmethod
    def from_json(cls, line: str) -> "Trajectory":
        rec = json.loads(line)
        pts = rec["points"]
        return cls(
            rec["id"],
            rec["user"],
            rec["mode"],
            np.array([p[0] for p in pts], dtype=float),
            np.array([p[1] for p in pts], dtype=float),
            np.array([p[2] for p in pts], dtype="datetime64[s]"),
        )


@dataclass
class SegmentationStats:
    """Counters accumulated while segmenting; drops are data, not errors."""

    kept: Counter = field(default_factory=Counter)
    dropped_short: Counter = field(default_factory=Counter)
    dropped_mode: Counter = field(default_factory=Counter)
    unlabeled_points: int = 0

    def merge(self, other: "SegmentationStats"):
        self.kept.update(other.kept)
        self.dropped_short.update(other.dropped_short)
        self.dropped_mode.update(other.dropped_mode)
        self.unlabeled_points += other.unlabeled_points


def _to_datetime64(times: Iterable[datetime]) -> np.ndarray:
    return np.array(list(times), dtype="datetime64[s]")


def segment_trajectories(
    points: list[GpsPoint],
    labels: list[LabelInterval],
    user: str = "",
    stats: SegmentationStats | None = None,
) -> list[Trajectory]:
    """Cut a time-sorted point stream into labeled trajectories.

    Labels are visited in (start, end) order and each claims the still
    unclaimed points inside it, so a point joins at most one trajectory.
    """
    if stats is None:
        stats = SegmentationStats()
    if not points:
        return []
    times = _to_datetime64(p.timestamp for p in points)
    if np.any(np.diff(times) < np.timedelta64(0, "s")):
        raise InvalidInputError("points must be sorted by timestamp")
    lat = np.array([p.latitude for p in points])
    lon = np.array([p.longitude for p in points])
    claimed = np.zeros(len(points), dtype=bool)
    out = []
    for interval in sorted(labels, key=lambda iv: (iv.start, iv.end)):
        lo = np.searchsorted(times, np.datetime64(interval.start, "s"), side="left")
        hi = np.searchsorted(times, np.datetime64(interval.end, "s"), side="right")
        if lo >= hi:
            continue
        free = ~claimed[lo:hi]
        claimed[lo:hi] = True
        # maximal runs of unclaimed points inside [lo, hi)
        edges = np.diff(np.concatenate(([0], free.astype(np.int8), [0])))
        starts = np.flatnonzero(edges == 1) + lo
        stops = np.flatnonzero(edges == -1) + lo
        mode = MODE_MAP.get(interval.mode.strip().lower())
        for a, b in zip(starts, stops):
            if mode is None:
                stats.dropped_mode[interval.mode] += 1
            elif b - a < MIN_POINTS:
                stats.dropped_short[mode] += 1
            else:
                traj_id = f"{user}-{len(out):05d}" if user else f"{len(out):05d}"
                out.append(Trajectory(traj_id, user, mode, lat[a:b], lon[a:b], times[a:b]))
                stats.kept[mode] += 1
    stats.unlabeled_points += int((~claimed).sum())
    return out


@dataclass(frozen=True)
class SignalBundle:
    latitude: np.ndarray = field(repr=False)
    longitude: np.ndarray = field(repr=False)
    distance: np.ndarray = field(repr=False)

    def get(self, name: str) -> np.ndarray:
        return getattr(self, name)


def haversine_m(lat1, lon1, lat2, lon2) -> np.ndarray:
    lat1, lon1, lat2, lon2 = map(np.radians, (lat1, lon1, lat2, lon2))
    a = np.sin((lat2 - lat1) / 2) ** 2 + np.cos(lat1) * np.cos(lat2) * np.sin((lon2 - lon1) / 2) ** 2
    return 2 * EARTH_RADIUS_M * np.arcsin(np.sqrt(np.clip(a, 0.0, 1.0)))


def derive_signals(traj: Trajectory, distance: str = "euclidean") -> SignalBundle:
    """Latitude, longitude and consecutive-point distance series.

    ``distance="euclidean"`` measures steps in raw degree space;
    ``"haversine"`` gives great-circle meters.
    """
    lat = np.asarray(traj.latitude, dtype=float)
    lon = np.asarray(traj.longitude, dtype=float)
    if distance == "euclidean":
        step = np.hypot(np.diff(lat), np.diff(lon))
    elif distance == "haversine":
        step = haversine_m(lat[:-1], lon[:-1], lat[1:], lon[1:])
    else:
        raise InvalidInputError(f"unknown distance metric {distance!r}")
    return SignalBundle(lat, lon, step)


# --- directory-level ingestion -------------------------------------------------


def data_dir(root) -> Path:
    """Accept either the GeoLife root or its ``Data`` directory."""
    root = Path(root)
    return root / "Data" if (root / "Data").is_dir() else root


def list_users(root) -> list[str]:
    base = data_dir(root)
    if not base.is_dir():
        raise InvalidInputError(f"dataset root {root} does not exist")
    return sorted(p.name for p in base.iterdir() if p.is_dir())


def load_user(root, user: str) -> tuple[list[GpsPoint], list[LabelInterval]]:
    """All points of one user (time-sorted) and their label intervals."""
    udir = data_dir(root) / user
    labels_path = udir / "labels.txt"
    labels = parse_labels(labels_path.read_text()) if labels_path.exists() else []
    points: list[GpsPoint] = []
    for plt in sorted((udir / "Trajectory").glob("*.plt")):
        try:
            points.extend(parse_plt(plt.read_text()))
        except ParseError as exc:
            raise ParseError(f"{plt.name}: {exc}") from exc
    points.sort(key=lambda p: p.timestamp)
    return points, labels


def ingest_user(root, user: str) -> tuple[list[Trajectory], SegmentationStats]:
    stats = SegmentationStats()
    if not (data_dir(root) / user / "labels.txt").exists():
        return [], stats
    points, labels = load_user(root, user)
    return segment_trajectories(points, labels, user, stats), stats


@dataclass
class IngestReport:
    users_total: int = 0
    users_labeled: int = 0
    users_failed: dict = field(default_factory=dict)
    stats: SegmentationStats = field(default_factory=SegmentationStats)

    @property
    def total(self) -> int:
        return sum(self.stats.kept.values())

    def to_dict(self) -> dict:
        return {
            "users_total": self.users_total,
            "users_labeled": self.users_labeled,
            "users_failed": dict(sorted(self.users_failed.items())),
            "trajectories": {m: self.stats.kept.get(m, 0) for m in MODES},
            "total": self.total,
            "dropped_short": {m: self.stats.dropped_short.get(m, 0) for m in MODES},
            "dropped_mode": dict(sorted(self.stats.dropped_mode.items())),
            "unlabeled_points": self.stats.unlabeled_points,
        }


def _ingest_one(args):
    root, user = args
    try:
        trajs, stats = ingest_user(root, user)
        return user, trajs, stats, None
    except (ParseError, InvalidInputError, OSError) as exc:
        return user, [], SegmentationStats(), str(exc)


def ingest(root, jobs: int = 1) -> tuple[list[Trajectory], IngestReport]:
    """Ingest every user under ``root``; failing users are reported, not raised."""
    users = list_users(root)
    report = IngestReport(users_total=len(users))
    base = data_dir(root)
    report.users_labeled = sum((base / u / "labels.txt").exists() for u in users)
    tasks = [(str(root), u) for u in users]
    if jobs > 1 and len(tasks) > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_ingest_one, tasks))
    else:
        results = [_ingest_one(t) for t in tasks]
    trajectories = []
    for user, trajs, stats, error in results:  # already in sorted user order
        if error is not None:
            logger.warning("user %s failed: %s", user, error)
            report.users_failed[user] = error
            continue
        trajectories.extend(trajs)
        report.stats.merge(stats)
    return trajectories, report


def write_store(path, trajectories: Iterable[Trajectory]):
    """Newline-delimited JSON, one trajectory per line."""
    from .io import atomic_write

    with atomic_write(path) as fh:
        for t in trajectories:
            fh.write(t.to_json())
            fh.write("\n")


def iter_store(path) -> Iterator[Trajectory]:
    with open(path) as fh:
        for line in fh:
            if line.strip():
                yield Trajectory.from_json(line)


def read_store(path) -> list[Trajectory]:
    return list(iter_store(path))
