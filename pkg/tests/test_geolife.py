from datetime import datetime, timedelta

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ordtraj.errors import InvalidInputError, ParseError, ValidationError
from ordtraj.geolife import (
    GpsPoint,
    LabelInterval,
    SegmentationStats,
    Trajectory,
    derive_signals,
    format_plt,
    haversine_m,
    ingest,
    list_users,
    parse_labels,
    parse_plt,
    read_store,
    segment_trajectories,
    write_store,
)

HEADER = "\n".join(["Geolife trajectory", "WGS 84", "Altitude is in Feet", "Reserved 3",
                    "0,2,255,My Track,0,0,2,8421376", "0"]) + "\n"
T0 = datetime(2008, 4, 2, 11, 0, 0)


def stream(n, start=T0, step=5):
    return [GpsPoint(39.9 + 1e-4 * k, 116.3 + 2e-4 * k, start + timedelta(seconds=step * k)) for k in range(n)]


def label(points, mode):
    return LabelInterval(points[0].timestamp, points[-1].timestamp, mode)


def make_traj(lat, lon, mode="walk"):
    n = len(lat)
    times = np.datetime64("2008-01-01T00:00:00") + np.arange(n).astype("timedelta64[s]")
    return Trajectory("t", "u", mode, np.asarray(lat, float), np.asarray(lon, float), times)


# --- PLT ----------------------------------------------------------------------

def test_parse_plt_real_record():
    pts = parse_plt(HEADER + "39.906631,116.385564,0,492,39745.1201157407,2008-10-24,02:53:18\n")
    assert pts == [GpsPoint(39.906631, 116.385564, datetime(2008, 10, 24, 2, 53, 18))]


def test_parse_plt_empty_section():
    assert parse_plt(HEADER) == []


def test_parse_plt_latitude_out_of_range():
    with pytest.raises(ValidationError) as info:
        parse_plt(HEADER + "95.0,116.3,0,492,39745.12,2008-10-24,02:53:18\n")
    assert info.value.line == 7


def test_parse_plt_malformed_reports_line():
    body = "39.9,116.3,0,492,39745.12,2008-10-24,02:53:18\n39.9,116.3,0,492\n"
    with pytest.raises(ParseError, match="line 8"):
        parse_plt(HEADER + body)
    with pytest.raises(ParseError, match="line 7"):
        parse_plt(HEADER + "39.9,116.3,0,492,39745.12,2008-13-24,02:53:18\n")


def test_parse_plt_crlf():
    pts = parse_plt((HEADER + "39.9,116.3,0,1,39745.1,2008-10-24,02:53:18\n").replace("\n", "\r\n"))
    assert len(pts) == 1


coords = st.tuples(
    st.floats(-90, 90, allow_nan=False),
    st.floats(-180, 180, allow_nan=False),
    st.datetimes(min_value=datetime(1990, 1, 1), max_value=datetime(2030, 1, 1)).map(
        lambda d: d.replace(microsecond=0)
    ),
)


@settings(max_examples=200, deadline=None)
@given(st.lists(coords, max_size=30))
def test_plt_round_trip(records):
    pts = [GpsPoint(a, o, t) for a, o, t in records]
    assert parse_plt(format_plt(pts)) == pts


# --- labels -------------------------------------------------------------------

def test_parse_labels_example():
    text = "Start Time\tEnd Time\tTransportation Mode\n2008/04/02 11:24:21\t2008/04/02 11:50:45\tbus\n"
    (iv,) = parse_labels(text)
    assert iv == LabelInterval(datetime(2008, 4, 2, 11, 24, 21), datetime(2008, 4, 2, 11, 50, 45), "bus")


def test_parse_labels_header_only():
    assert parse_labels("Start Time\tEnd Time\tTransportation Mode\n") == []


def test_parse_labels_reversed_interval():
    with pytest.raises(ValidationError):
        parse_labels("h\n2008/04/02 11:50:45\t2008/04/02 11:24:21\tbus\n")
    with pytest.raises(ValidationError):
        LabelInterval(T0, T0 - timedelta(seconds=1), "bus")


def test_parse_labels_bad_timestamp():
    with pytest.raises(ParseError, match="line 2"):
        parse_labels("h\n2008-04-02 11:50:45\t2008/04/02 11:24:21\tbus\n")


# --- segmentation -------------------------------------------------------------

def test_segment_fifteen_bus_points():
    pts = stream(15)
    (traj,) = segment_trajectories(pts, [label(pts, "bus")], "010")
    assert traj.mode == "bus" and len(traj) == 15
    assert traj.traj_id == "010-00000"


def test_segment_nine_bike_points_dropped():
    pts = stream(9)
    stats = SegmentationStats()
    assert segment_trajectories(pts, [label(pts, "bike")], stats=stats) == []
    assert stats.dropped_short["bike"] == 1


def test_segment_mode_mapping_and_drops():
    pts = stream(60)
    labels = [label(pts[0:12], "car"), label(pts[12:24], "taxi"), label(pts[24:36], "Walking"),
              label(pts[36:48], "train"), label(pts[48:60], "bike")]
    stats = SegmentationStats()
    trajs = segment_trajectories(pts, labels, stats=stats)
    assert [t.mode for t in trajs] == ["car_taxi", "car_taxi", "walk", "bike"]
    assert stats.dropped_mode == {"train": 1}
    assert stats.unlabeled_points == 0


def test_segment_points_outside_labels_are_unlabeled():
    pts = stream(30)
    stats = SegmentationStats()
    (traj,) = segment_trajectories(pts, [label(pts[5:20], "walk")], stats=stats)
    assert len(traj) == 15
    assert stats.unlabeled_points == 15


@settings(max_examples=150, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 199), st.integers(0, 60),
                          st.sampled_from(["walk", "bus", "car", "airplane", "bike"])), max_size=12))
def test_segmentation_assigns_each_point_once(spans):
    pts = stream(200)
    labels = [LabelInterval(pts[a].timestamp, pts[min(a + w, 199)].timestamp, m) for a, w, m in spans]
    stats = SegmentationStats()
    trajs = segment_trajectories(pts, labels, "u", stats)
    seen = np.concatenate([t.timestamps for t in trajs]) if trajs else np.array([], "datetime64[s]")
    assert len(seen) == len(np.unique(seen))
    for t in trajs:
        assert len(t) >= 10 and t.mode in ("walk", "bike", "bus", "car_taxi")
        assert np.all(np.diff(t.timestamps) > np.timedelta64(0, "s"))
    assert sum(stats.kept.values()) == len(trajs)
    assert len(seen) + stats.unlabeled_points <= len(pts)


def test_trajectory_invariants():
    with pytest.raises(InvalidInputError):
        make_traj(np.zeros(9), np.zeros(9))
    with pytest.raises(InvalidInputError):
        make_traj(np.zeros(12), np.zeros(12), mode="train")


# --- signals ------------------------------------------------------------------

def test_distance_signal():
    lat = np.zeros(10)
    lon = np.zeros(10)
    lat[1:], lon[1:] = 3e-3, 4e-3
    s = derive_signals(make_traj(lat, lon))
    assert s.distance[0] == pytest.approx(5e-3, abs=1e-15)
    assert np.all(s.distance[1:] == 0)
    assert len(s.distance) == 9
    assert np.array_equal(s.latitude, lat) and np.array_equal(s.longitude, lon)


def test_haversine_option():
    # one degree of latitude is about 111.2 km
    assert haversine_m(0.0, 0.0, 1.0, 0.0) == pytest.approx(111_195, rel=1e-3)
    t = make_traj(np.linspace(0, 1e-3, 10), np.zeros(10))
    assert derive_signals(t, "haversine").distance == pytest.approx(np.full(9, 111_195 * 1e-3 / 9), rel=1e-3)
    with pytest.raises(InvalidInputError):
        derive_signals(t, "manhattan")


# --- directory ingestion ------------------------------------------------------

def test_fixture_matches_manifest(fixture_root, fixture_manifest):
    trajs, report = ingest(fixture_root)
    d = report.to_dict()
    assert d["trajectories"] == fixture_manifest["trajectories"]
    assert d["total"] == fixture_manifest["total"] == len(trajs)
    assert d["dropped_short"] == fixture_manifest["dropped_short"]
    assert d["dropped_mode"] == fixture_manifest["dropped_mode"]
    assert d["unlabeled_points"] == fixture_manifest["unlabeled_points"]
    assert (d["users_total"], d["users_labeled"]) == (3, 2)
    kept_points = sum(len(t) for t in trajs)
    assert kept_points <= fixture_manifest["points"]


def test_parallel_ingest_identical(fixture_root):
    a, _ = ingest(fixture_root, jobs=1)
    b, _ = ingest(fixture_root, jobs=2)
    assert [t.to_json() for t in a] == [t.to_json() for t in b]


def test_store_round_trip(tmp_path, fixture_root):
    trajs, _ = ingest(fixture_root)
    write_store(tmp_path / "s.ndjson", trajs)
    back = read_store(tmp_path / "s.ndjson")
    assert [t.to_json() for t in back] == [t.to_json() for t in trajs]


def test_failing_user_reported(tmp_path):
    udir = tmp_path / "Data" / "000"
    (udir / "Trajectory").mkdir(parents=True)
    (udir / "labels.txt").write_text("h\n")
    (udir / "Trajectory" / "x.plt").write_text(HEADER + "garbage\n")
    trajs, report = ingest(tmp_path)
    assert trajs == [] and "000" in report.users_failed
    assert list_users(tmp_path) == ["000"]
