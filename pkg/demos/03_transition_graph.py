"""Transition graph between consecutive ordinal patterns.

Edges count how often pattern i is followed by pattern j; weights are those
counts over the number of transitions. The self-transition probability is
the weight on the diagonal: it is high for smooth or persistent motion and
low when the local order keeps flipping.
"""

import numpy as np

from ordtraj import EmbeddingParams, build_graph, extract_sequence, self_transition_probability

rng = np.random.default_rng(1)
params = EmbeddingParams(3, 1)

examples = {
    "steady climb with jitter": np.arange(200) + rng.normal(0, 0.3, 200),
    "random walk": np.cumsum(rng.normal(size=200)),
    "white noise": rng.normal(size=200),
    "zigzag": np.tile([0.0, 1.0], 100),
}

for name, x in examples.items():
    g = build_graph(extract_sequence(x, params))
    print(f"{name}: {g.n_edges} edges over {g.n_transitions} transitions, "
          f"p_st = {self_transition_probability(g):.3f}")

print("\nedge list of the random walk (source, target, weight):")
g = build_graph(extract_sequence(examples["random walk"], params))
for s, t, w in g.to_csv_rows():
    print(f"  {s} -> {t}: {w:.3f}")
