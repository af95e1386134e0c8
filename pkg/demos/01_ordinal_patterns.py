"""Ordinal patterns of a short series, step by step.

Each window of D values sampled tau apart is replaced by the order in which
its positions must be read to visit the values from smallest to largest.
Equal values keep their original order, so the constant window [2, 2, 2]
reads (0, 1, 2) just like a rising one.
"""

import numpy as np

from ordtraj import EmbeddingParams, extract_sequence, max_delay, pattern_distribution

series = np.array([4.0, 7.0, 9.0, 10.0, 6.0, 11.0, 3.0, 3.0, 5.0])
params = EmbeddingParams(dim=3, delay=1)

seq = extract_sequence(series, params)
print(f"series: {series.tolist()}")
print(f"D={params.dim}, tau={params.delay}: {seq.m} windows\n")
for t, pattern in enumerate(seq.patterns):
    window = series[t : t + params.span]
    print(f"  t={t}  window {window.tolist()!s:<20} -> word {pattern.word}  index {pattern.index}")

dist = pattern_distribution(seq)
print("\npattern probabilities (index order):")
for idx, p in enumerate(dist.probabilities):
    print(f"  {idx}: {p:.3f}")

# The largest usable delay keeps (D-1)*tau strictly below the length.
print(f"\nmax delay for n={len(series)}, D=3: {max_delay(len(series), 3)}")

# Patterns only see order, so any increasing map leaves them unchanged.
warped = extract_sequence(np.exp(series) + series**3, params)
print("unchanged under x -> exp(x) + x^3:", np.array_equal(warped.indices, seq.indices))
