"""Command-line pipeline: ``ingest``, ``extract``, ``evaluate``, ``report``.

Exit codes: 0 success, 1 data failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import reporting
from .config import DISTANCES, RunConfig, load_config
from .errors import EmptyDatasetError, InvalidInputError, OrdtrajError, ParseError
from .evaluation import results_csv, results_json, sweep
from .features import (
    FEATURES,
    FeatureSpec,
    Skip,
    SkipReport,
    build_dataset,
    read_feature_csv,
    write_feature_csv,
    write_skip_report,
)
from .geolife import ingest, list_users, read_store, write_store
from .io import atomic_write
from .ordinal import EmbeddingParams

logger = logging.getLogger("ordtraj")

STORE = "trajectories.ndjson"
INGEST_REPORT = "ingest_report.json"
FEATURE_DIR = "features"
PLOT_DIR = "plots"


class UsageError(Exception):
    """Bad invocation or missing prerequisite (exit code 2)."""


class DataError(Exception):
    """The data could not be processed (exit code 1)."""


def feature_path(out: Path, dim: int, tau: int) -> Path:
    return out / FEATURE_DIR / f"features_D{dim}_tau{tau}.csv"


def skip_path(out: Path, dim: int, tau: int) -> Path:
    return out / FEATURE_DIR / f"skips_D{dim}_tau{tau}.json"


def _write_json(path, payload):
    with atomic_write(path) as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def cmd_ingest(cfg: RunConfig) -> int:
    if not cfg.data_root:
        raise UsageError("no dataset root given (--data-root or data_root in the config)")
    root = Path(cfg.data_root)
    if not root.is_dir():
        raise UsageError(f"dataset root {root} does not exist")
    if not list_users(root):
        raise DataError(f"no users found under {root}")
    trajectories, report = ingest(root, jobs=cfg.jobs)
    out = cfg.out_dir
    write_store(out / STORE, trajectories)
    summary = report.to_dict()
    _write_json(out / INGEST_REPORT, summary)
    print(f"ingested {summary['total']} trajectories: "
          + ", ".join(f"{m}={n}" for m, n in summary["trajectories"].items()))
    if report.users_failed and len(report.users_failed) == report.users_total:
        raise DataError("every user failed to parse")
    return 0


def cmd_extract(cfg: RunConfig) -> int:
    store = cfg.out_dir / STORE
    if not store.exists():
        raise UsageError(f"trajectory store {store} not found; run `ordtraj ingest` first")
    trajectories = read_store(store)
    signals = cfg.grid.all_signals
    for dim in cfg.grid.D:
        for tau in cfg.grid.tau:
            spec = FeatureSpec(EmbeddingParams(int(dim), int(tau)), FEATURES, signals)
            csv_path, skips = feature_path(cfg.out_dir, dim, tau), skip_path(cfg.out_dir, dim, tau)
            meta = {"D": dim, "tau": tau, "signals": list(signals), "input": len(trajectories)}
            try:
                dataset, report = build_dataset(trajectories, spec, cfg.distance, cfg.jobs)
            except (EmptyDatasetError, InvalidInputError) as exc:
                logger.warning("D=%d tau=%d: %s; writing an empty matrix", dim, tau, exc)
                write_feature_csv(csv_path, None, spec.columns)
                write_skip_report(skips, _all_skipped(trajectories), {**meta, "rows": 0})
                continue
            write_feature_csv(csv_path, dataset)
            write_skip_report(skips, report, {**meta, "rows": len(dataset)})
            print(f"D={dim} tau={tau}: {len(dataset)} rows, {report.total} skipped")
    return 0


def _all_skipped(trajectories):
    report = SkipReport()
    for t in trajectories:
        report.add(Skip(t.traj_id, t.mode, "too_short"))
    return report


def cmd_evaluate(cfg: RunConfig) -> int:
    grid = cfg.grid.to_grid()
    for dim in grid.dims:
        for tau in grid.delays:
            if not feature_path(cfg.out_dir, dim, tau).exists():
                raise UsageError(f"missing feature matrix for D={dim} tau={tau}; run `ordtraj extract`")

    def source(dim, tau):
        return read_feature_csv(feature_path(cfg.out_dir, dim, tau), EmbeddingParams(dim, tau))

    partial = cfg.out_dir / "results.partial.ndjson"
    partial.parent.mkdir(parents=True, exist_ok=True)
    with open(partial, "w") as stream:
        def on_report(r):
            stream.write(json.dumps(r.to_dict(), sort_keys=True) + "\n")
            stream.flush()

        reports = sweep(grid, source, seed=cfg.seed, jobs=cfg.jobs,
                        config_overrides=cfg.classifier, on_report=on_report, skip_invalid=True)
    partial.unlink()
    with atomic_write(cfg.out_dir / "results.csv") as fh:
        fh.write(results_csv(reports))
    with atomic_write(cfg.out_dir / "results.json") as fh:
        fh.write(results_json(reports))
    if not reports:
        raise DataError("no grid cell could be evaluated")
    _print_summary(reports)
    return 0


def _print_summary(reports, top: int = 10):
    ranked = sorted(reports, key=lambda r: -r.accuracy)[:top]
    print(f"{len(reports)} cells evaluated; best by accuracy:")
    print(f"{'D':>2} {'tau':>3}  {'features':<8} {'classifier':<10} {'classes':<28} accuracy")
    for r in ranked:
        print(f"{r.dim:>2} {r.delay:>3}  {r.features:<8} {r.classifier:<10} "
              f"{'|'.join(r.classes):<28} {100 * r.accuracy:6.2f}% (+/- {100 * r.accuracy_ci:.2f})")


def cmd_report(cfg: RunConfig, results: str | None = None) -> int:
    path = Path(results) if results else cfg.out_dir / "results.csv"
    if not path.exists():
        raise UsageError(f"results file {path} not found")
    rows = reporting.read_results(path)
    plots = cfg.out_dir / PLOT_DIR
    fixed_dim = cfg.report.get("fixed_D")
    fixed_tau = cfg.report.get("fixed_tau")
    present_dims = {int(r["D"]) for r in rows}
    present_taus = {int(r["tau"]) for r in rows}
    with atomic_write(plots / "accuracy_by_D.csv") as fh:
        fh.write(reporting.accuracy_by_dim(rows, fixed_tau if fixed_tau in present_taus else None))
    with atomic_write(plots / "accuracy_by_tau.csv") as fh:
        fh.write(reporting.accuracy_by_delay(rows, fixed_dim if fixed_dim in present_dims else None))
    with atomic_write(plots / "complexity_entropy_plane.csv") as fh:
        fh.write(reporting.complexity_entropy_plane(cfg.out_dir / FEATURE_DIR))
    print(f"plot data written to {plots}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="YAML run configuration")
    common.add_argument("--data-root", metavar="PATH", help="GeoLife root (contains Data/)")
    common.add_argument("--out", metavar="PATH", help="output directory")
    common.add_argument("--seed", type=int, metavar="N")
    common.add_argument("--jobs", type=int, metavar="N", help="worker processes")
    common.add_argument("--distance", choices=DISTANCES, help="step-distance metric")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(
        prog="ordtraj",
        description="Ordinal-pattern features and transportation-mode classification for GeoLife.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("ingest", parents=[common], help="parse GeoLife into a trajectory store")
    sub.add_parser("extract", parents=[common], help="feature matrices for every (D, tau)")
    sub.add_parser("evaluate", parents=[common], help="cross-validated sweep over the grid")
    rep = sub.add_parser("report", parents=[common], help="plot-data tables from results")
    rep.add_argument("results", nargs="?", help="results CSV (default: <out>/results.csv)")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = load_config(args.config, data_root=args.data_root, out=args.out, seed=args.seed,
                          jobs=args.jobs, distance=args.distance)
    except (OSError, InvalidInputError, ValueError, TypeError) as exc:
        print(f"ordtraj: configuration error: {exc}", file=sys.stderr)
        return 2
    commands = {"ingest": cmd_ingest, "extract": cmd_extract, "evaluate": cmd_evaluate}
    try:
        if args.command == "report":
            return cmd_report(cfg, args.results)
        return commands[args.command](cfg)
    except UsageError as exc:
        print(f"ordtraj: {exc}", file=sys.stderr)
        return 2
    except (DataError, ParseError, OrdtrajError) as exc:
        print(f"ordtraj: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
