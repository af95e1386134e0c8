"""Tidy plot-data tables derived from results and feature matrices."""

from __future__ import annotations

import csv
import io
import re
from pathlib import Path

from .errors import ParseError
from .evaluation import OVERALL, RESULT_COLUMNS
from .features import SIGNALS, read_feature_csv

CURVE_COLUMNS = ["features", "signals", "classifier", "classes", "D", "tau", "accuracy", "ci_half_width"]
PLANE_COLUMNS = ["D", "tau", "traj_id", "mode", "signal", "entropy", "complexity"]
FEATURE_FILE = re.compile(r"features_D(\d+)_tau(\d+)\.csv$")


def read_results(path) -> list[dict]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            return []
        if list(reader.fieldnames) != RESULT_COLUMNS:
            raise ParseError(f"{path}: unexpected header {reader.fieldnames}")
        rows = list(reader)
    for lineno, row in enumerate(rows, start=2):
        try:
            int(row["D"]), int(row["tau"]), float(row["accuracy"]), float(row["ci_half_width"])
        except (TypeError, ValueError):
            raise ParseError(f"{path}: malformed numeric field", lineno) from None
    return rows


def _table(columns, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    w.writerows(rows)
    return buf.getvalue()


def _curve(rows: list[dict], fixed_key: str, fixed_value: int | None, x_key: str) -> str:
    overall = [r for r in rows if r["class"] == OVERALL]
    if fixed_value is None and overall:
        fixed_value = min(int(r[fixed_key]) for r in overall)
    picked = [r for r in overall if int(r[fixed_key]) == fixed_value]
    picked.sort(key=lambda r: (r["features"], r["signals"], r["classifier"], r["classes"], int(r[x_key])))
    return _table(CURVE_COLUMNS, [[r[c] for c in CURVE_COLUMNS] for r in picked])


def accuracy_by_dim(rows: list[dict], tau: int | None = None) -> str:
    """Overall accuracy against D at one delay (the smallest present by default)."""
    return _curve(rows, "tau", tau, "D")


def accuracy_by_delay(rows: list[dict], dim: int | None = None) -> str:
    """Overall accuracy against tau at one dimension (the smallest present by default)."""
    return _curve(rows, "D", dim, "tau")


def complexity_entropy_plane(feature_dir) -> str:
    """(H, C) per trajectory and signal from every feature matrix in ``feature_dir``."""
    out = []
    files = []
    for path in Path(feature_dir).glob("features_D*_tau*.csv"):
        m = FEATURE_FILE.search(path.name)
        if m:
            files.append((int(m.group(1)), int(m.group(2)), path))
    for dim, tau, path in sorted(files):
        ds = read_feature_csv(path)
        for signal in SIGNALS:
            h_col, c_col = f"{signal}_H", f"{signal}_C"
            if h_col not in ds.columns or c_col not in ds.columns:
                continue
            hi, ci = ds.columns.index(h_col), ds.columns.index(c_col)
            for tid, mode, row in zip(ds.ids, ds.y, ds.X):
                out.append([dim, tau, tid, mode, signal, repr(float(row[hi])), repr(float(row[ci]))])
    return _table(PLANE_COLUMNS, out)
