"""The GeoLife pipeline on the bundled fixture, without the CLI.

Ingest labeled GPS points into single-mode trajectories, turn each into
H, C and p_st features of its latitude, longitude and step-distance series,
then cross-validate a classifier. The fixture is tiny, so the accuracies say
nothing about the method; point ``root`` at a GeoLife download for that.
"""

from pathlib import Path

from ordtraj import EmbeddingParams
from ordtraj.classifiers import ClassifierConfig
from ordtraj.evaluation import evaluate, make_folds
from ordtraj.features import FeatureSpec, build_dataset
from ordtraj.geolife import ingest

root = Path(__file__).resolve().parents[1] / "tests" / "fixtures" / "geolife"

trajectories, report = ingest(root)
summary = report.to_dict()
print(f"{summary['total']} trajectories: {summary['trajectories']}")
print(f"dropped: short {summary['dropped_short']}, other modes {summary['dropped_mode']}, "
      f"{summary['unlabeled_points']} unlabeled points\n")

spec = FeatureSpec(EmbeddingParams(dim=4, delay=1))
dataset, skips = build_dataset(trajectories, spec)
print(f"feature matrix {dataset.X.shape}, {skips.total} skipped")
print("columns:", ", ".join(dataset.columns), "\n")

plan = make_folds(dataset, seed=0)
for kind in ("knn", "svm_rbf", "tree"):
    for fs in ("H+C", "PST", "H+C+PST"):
        r = evaluate(dataset.select(fs), ClassifierConfig(kind), plan)
        print(f"{kind:<8} {fs:<8} accuracy {100 * r.accuracy:5.1f}% +/- {100 * r.accuracy_ci:4.1f}")
