import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import brute_features
from ordtraj import EmbeddingParams
from ordtraj.errors import EmptyDatasetError, InvalidInputError
from ordtraj.features import (
    FEATURE_SETS,
    FeatureSpec,
    FeatureVector,
    Skip,
    build_dataset,
    extract_features,
    feature_set_name,
    parse_feature_set,
    read_feature_csv,
    write_feature_csv,
)
from ordtraj.geolife import Trajectory, derive_signals, ingest


def traj(lat, lon, tid="t", mode="walk"):
    n = len(lat)
    times = np.datetime64("2008-01-01T00:00:00") + np.arange(n).astype("timedelta64[s]")
    return Trajectory(tid, "u", mode, np.asarray(lat, float), np.asarray(lon, float), times)


def random_traj(rng, n, tid, mode="walk"):
    return traj(39.9 + np.cumsum(rng.normal(0, 1e-4, n)), 116.3 + np.cumsum(rng.normal(0, 1e-4, n)), tid, mode)


def full_spec(dim=3, delay=1):
    return FeatureSpec(EmbeddingParams(dim, delay))


def test_columns_canonical_order():
    assert full_spec().columns == [
        "latitude_H", "latitude_C", "latitude_PST",
        "longitude_H", "longitude_C", "longitude_PST",
        "distance_H", "distance_C", "distance_PST",
    ]
    spec = FeatureSpec(EmbeddingParams(3), ("PST", "H"), ("distance", "latitude"))
    assert spec.columns == ["latitude_H", "latitude_PST", "distance_H", "distance_PST"]


def test_feature_set_names():
    assert set(FEATURE_SETS) == {"H", "C", "PST", "H+C", "H+C+PST"}
    assert parse_feature_set("C+H") == ("H", "C")
    assert feature_set_name(["PST", "C", "H"]) == "H+C+PST"
    with pytest.raises(InvalidInputError):
        parse_feature_set("H+X")


def test_straight_line_trajectory():
    # dyadic steps keep every distance exactly equal in floating point
    k = np.arange(20)
    out = extract_features(traj(39.0 + k / 1024, 116.0 + k / 512), full_spec())
    assert isinstance(out, FeatureVector)
    assert [str(v) for v in out.values] == ["0.0", "0.0", "1.0"] * 3


def test_ten_points_skipped_at_large_delay():
    out = extract_features(random_traj(np.random.default_rng(0), 10, "a"), full_spec(5, 3))
    assert out == Skip("a", "walk", "too_short")


@pytest.mark.parametrize("dim, delay", [(3, 1), (4, 2), (5, 3), (6, 2), (7, 1), (3, 5)])
def test_skip_rule_exact(dim, delay):
    rng = np.random.default_rng(dim * 10 + delay)
    need = (dim - 1) * delay + 2  # distance series has n - 1 samples
    for n in range(10, need + 4):
        out = extract_features(random_traj(rng, n, "x"), full_spec(dim, delay))
        assert isinstance(out, Skip) == (n - 1 < need)
    # latitude and longitude only: the shortest signal has n samples
    spec = FeatureSpec(EmbeddingParams(dim, delay), signals=("latitude", "longitude"))
    for n in range(10, need + 4):
        out = extract_features(random_traj(rng, n, "x"), spec)
        assert isinstance(out, Skip) == (n < need)


def test_matches_oracle():
    rng = np.random.default_rng(8)
    for _ in range(50):
        dim, delay = int(rng.integers(3, 8)), int(rng.integers(1, 4))
        t = random_traj(rng, int(rng.integers(40, 400)), "x")
        out = extract_features(t, FeatureSpec(EmbeddingParams(dim, delay)))
        s = derive_signals(t)
        expected = []
        for name in ("latitude", "longitude", "distance"):
            expected.extend(brute_features(s.get(name).tolist(), dim, delay))
        np.testing.assert_allclose(out.values, expected, rtol=0, atol=1e-10)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(10, 120), st.integers(3, 7), st.integers(1, 3))
def test_vector_ranges(seed, n, dim, delay):
    t = random_traj(np.random.default_rng(seed), n, "x")
    out = extract_features(t, full_spec(dim, delay))
    if isinstance(out, FeatureVector):
        assert len(out.values) == 9
        assert np.all(np.isfinite(out.values))
        assert np.all((out.values >= 0) & (out.values <= 1))


def test_build_dataset_one_short():
    rng = np.random.default_rng(1)
    ds, report = build_dataset([random_traj(rng, 50, "a", "bus"), random_traj(rng, 10, "b")], full_spec(5, 3))
    assert len(ds) == 1 and ds.ids.tolist() == ["a"]
    assert report.total == 1 and report.by_mode == {"walk": 1}


def test_build_dataset_all_skipped():
    with pytest.raises(EmptyDatasetError):
        build_dataset([random_traj(np.random.default_rng(2), 10, "a")], full_spec(5, 3))


def test_shuffle_permutes_rows_only():
    rng = np.random.default_rng(4)
    trajs = [random_traj(rng, int(rng.integers(12, 80)), f"id{k:03d}") for k in range(40)]
    a, _ = build_dataset(trajs, full_spec(4, 2))
    shuffled = [trajs[i] for i in rng.permutation(len(trajs))]
    b, _ = build_dataset(shuffled, full_spec(4, 2))
    assert a.ids.tolist() == sorted(a.ids.tolist()) == b.ids.tolist()
    assert np.array_equal(a.X, b.X)


def test_size_nonincreasing_in_delay(fixture_root):
    trajs, _ = ingest(fixture_root)
    sizes = []
    for delay in (1, 2, 3, 5, 10, 15):
        try:
            sizes.append(len(build_dataset(trajs, full_spec(5, delay))[0]))
        except EmptyDatasetError:
            sizes.append(0)
    assert sizes == sorted(sizes, reverse=True)
    assert sizes[0] == len(trajs)


def test_select_and_subset():
    rng = np.random.default_rng(6)
    trajs = [random_traj(rng, 40, f"{k}", mode) for k, mode in enumerate(["walk", "bus", "bike"] * 3)]
    ds, _ = build_dataset(trajs, full_spec())
    sub = ds.select("PST", ("distance",))
    assert sub.columns == ("distance_PST",)
    assert np.array_equal(sub.X[:, 0], ds.X[:, 8])
    assert ds.subset_classes(["bus", "walk"]).classes == ("bus", "walk")
    with pytest.raises(InvalidInputError):
        sub.select("H")


def test_csv_round_trip(tmp_path):
    rng = np.random.default_rng(7)
    ds, _ = build_dataset([random_traj(rng, 60, f"{k}") for k in range(5)], full_spec())
    write_feature_csv(tmp_path / "f.csv", ds)
    back = read_feature_csv(tmp_path / "f.csv")
    assert np.array_equal(back.X, ds.X)
    assert back.ids.tolist() == ds.ids.tolist() and back.columns == ds.columns
    write_feature_csv(tmp_path / "e.csv", None, full_spec().columns)
    empty = read_feature_csv(tmp_path / "e.csv")
    assert len(empty) == 0 and len(empty.columns) == 9
