"""Slow, independent reference paths used to check the library.

Nothing here imports ``ordtraj``: patterns come from stable sorts of
window positions by value, indices from the lexicographic rank among all
permutations, entropies from plain ``math`` loops.
"""

import math
from functools import lru_cache
from itertools import permutations


@lru_cache(maxsize=None)
def _perm_rank(dim):
    return {p: i for i, p in enumerate(permutations(range(dim)))}


def brute_pattern(window):
    """Positions of the window in ascending order, earlier position first on ties."""
    pairs = sorted((v, pos) for pos, v in enumerate(window))
    return tuple(pos for _, pos in pairs)


def brute_index(word):
    return _perm_rank(len(word))[tuple(word)]


def brute_sequence(series, dim, delay):
    # Python's sort is stable, so sorting positions by value puts the earlier
    # of two equal values first, as brute_pattern does
    rank = _perm_rank(dim)
    span = (dim - 1) * delay + 1
    return [
        rank[tuple(sorted(range(dim), key=series[t:t + span:delay].__getitem__))]
        for t in range(len(series) - span + 1)
    ]


def brute_distribution(indices, dim):
    counts = [0] * math.factorial(dim)
    for i in indices:
        counts[i] += 1
    return [c / len(indices) for c in counts]


def _shannon(p):
    return -math.fsum(x * math.log(x) for x in p if x > 0)


def brute_entropy(p):
    return _shannon(p) / math.log(len(p))


def brute_complexity(p, dim):
    n = math.factorial(dim)
    u = [1.0 / n] * n
    mix = [(a + b) / 2 for a, b in zip(p, u)]
    js = _shannon(mix) - (_shannon(p) + _shannon(u)) / 2
    js_max = _shannon([(1.0 + 1.0 / n) / 2] + [0.5 / n] * (n - 1)) - _shannon(u) / 2
    return js / js_max * brute_entropy(p)


def brute_pst(indices):
    repeats = sum(1 for a, b in zip(indices, indices[1:]) if a == b)
    return repeats / (len(indices) - 1)


def brute_features(series, dim, delay):
    seq = brute_sequence(list(series), dim, delay)
    p = brute_distribution(seq, dim)
    return brute_entropy(p), brute_complexity(p, dim), brute_pst(seq)
