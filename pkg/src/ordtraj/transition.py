"""Ordinal-pattern transition graph and the self-transition probability."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import SequenceTooShortError
from .ordinal import OrdinalSequence


@dataclass(frozen=True)
class TransitionGraph:
    """Sparse weighted digraph over pattern indices.

    ``sources[k] -> targets[k]`` carries ``weights[k]``; edges are sorted by
    (source, target) and only observed transitions are stored.
    """

    dim: int
    sources: np.ndarray = field(repr=False)
    targets: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)
    n_transitions: int

    @property
    def n_edges(self) -> int:
        return int(self.weights.size)

    @property
    def edges(self) -> dict[tuple[int, int], float]:
        return {
            (int(s), int(t)): float(w)
            for s, t, w in zip(self.sources, self.targets, self.weights)
        }

    def weight(self, source: int, target: int) -> float:
        return self.edges.get((source, target), 0.0)

    def to_csv_rows(self) -> list[tuple[int, int, float]]:
        """Rows of the ``src_index,dst_index,weight`` edge-list export."""
        return [(int(s), int(t), float(w)) for s, t, w in zip(self.sources, self.targets, self.weights)]


def build_graph(seq: OrdinalSequence) -> TransitionGraph:
    if seq.m < 2:
        raise SequenceTooShortError(f"need at least 2 patterns for a transition, got {seq.m}")
    idx = np.asarray(seq.indices, dtype=np.int64)
    n_pat = seq.params.n_patterns
    # one integer key per (source, target) pair keeps the edge set sparse
    keys, counts = np.unique(idx[:-1] * n_pat + idx[1:], return_counts=True)
    sources, targets = np.divmod(keys, n_pat)
    total = seq.m - 1
    return TransitionGraph(seq.params.dim, sources, targets, counts / total, total)


def self_transition_probability(g: TransitionGraph) -> float:
    """Total weight carried by self-loops."""
    loops = g.sources == g.targets
    return float(np.sum(g.weights[loops]))
