import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import brute_pst, brute_sequence
from ordtraj import (
    EmbeddingParams,
    SequenceTooShortError,
    build_graph,
    extract_sequence,
    self_transition_probability,
)


def graph_of(series, dim=3, delay=1):
    params = EmbeddingParams(dim, delay) if dim >= 3 else EmbeddingParams.relaxed(dim, delay)
    return build_graph(extract_sequence(series, params))


def test_monotone_single_self_loop():
    g = graph_of([1, 2, 3, 4, 5])
    assert g.edges == {(0, 0): 1.0}
    assert self_transition_probability(g) == 1.0


def test_alternating_two_edges():
    g = graph_of([1, 2, 1, 2], dim=2)
    # (0,1) has index 0, (1,0) index 1
    assert g.edges == {(0, 1): 0.5, (1, 0): 0.5}
    assert self_transition_probability(g) == 0.0


def test_up_up_down_down():
    g = graph_of([1, 2, 3, 2, 1], dim=2)
    assert self_transition_probability(g) == pytest.approx(2 / 3, abs=1e-15)


def test_long_alternation():
    assert self_transition_probability(graph_of([1, 2] * 50, dim=2)) == 0.0


def test_needs_two_patterns():
    with pytest.raises(SequenceTooShortError):
        graph_of([1, 2, 3])


def test_edge_list_rows_sorted():
    g = graph_of(np.random.default_rng(0).normal(size=300), dim=4)
    rows = g.to_csv_rows()
    assert rows == sorted(rows)
    assert all(w > 0 for _, _, w in rows)
    assert g.n_transitions == 300 - 3 - 1


def test_pst_matches_direct_count():
    rng = np.random.default_rng(21)
    for _ in range(1000):
        n = int(rng.integers(10, 300))
        dim = int(rng.integers(3, 8))
        delay = int(rng.integers(1, 4))
        if n < (dim - 1) * delay + 2:
            continue
        x = np.round(rng.normal(size=n), int(rng.integers(0, 3)))  # rounding creates ties
        seq = brute_sequence(x.tolist(), dim, delay)
        g = graph_of(x, dim, delay)
        assert self_transition_probability(g) == pytest.approx(brute_pst(seq), abs=1e-12)


@settings(max_examples=200, deadline=None)
@given(st.lists(st.integers(-3, 3), min_size=6, max_size=200), st.integers(3, 5))
def test_weights_normalized(values, dim):
    if len(values) < dim + 1:
        return
    seq = extract_sequence(values, EmbeddingParams(dim))
    g = build_graph(seq)
    assert abs(g.weights.sum() - 1.0) <= 1e-12
    assert np.all(g.weights > 0)
    assert g.n_transitions == seq.m - 1
    assert g.n_edges <= min(seq.m - 1, seq.params.n_patterns ** 2)
    pst = self_transition_probability(g)
    assert 0.0 <= pst <= 1.0
    constant = len(set(seq.indices.tolist())) == 1
    assert (pst == 1.0) == constant
    no_repeat = not np.any(seq.indices[1:] == seq.indices[:-1])
    assert (pst == 0.0) == no_repeat
