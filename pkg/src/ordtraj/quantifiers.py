"""Information-theory quantifiers of an ordinal-pattern distribution.

All entropies use the natural logarithm. The normalized permutation
entropy is a ratio and therefore base-free; the Jensen-Shannon term must
share the base of the normalization constant ``q_zero``, which is written
with natural logs.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import factorial, log

import numpy as np

from .errors import InvalidInputError
from .ordinal import PatternDistribution


@dataclass(frozen=True)
class QuantifierPair:
    """A point on the complexity-entropy plane."""

    entropy: float
    complexity: float


def _entropy(p: np.ndarray) -> float:
    p = p[p > 0]
    # adding 0.0 turns the -0.0 of a degenerate distribution into +0.0
    return float(-np.sum(p * np.log(p))) + 0.0


def _probabilities(p) -> np.ndarray:
    if isinstance(p, PatternDistribution):
        return np.asarray(p.probabilities, dtype=float)
    return np.asarray(p, dtype=float)


def shannon_entropy(p) -> float:
    """Shannon entropy in nats, with ``0 ln 0 = 0``."""
    return _entropy(_probabilities(p))


def permutation_entropy(p) -> float:
    """Shannon entropy divided by its maximum ``ln(N)``, ``N`` the alphabet size."""
    probs = _probabilities(p)
    if probs.size < 2:
        raise InvalidInputError("normalized entropy needs at least two patterns")
    return _entropy(probs) / log(probs.size)


def q_zero(dim: int) -> float:
    """Inverse of the largest Jensen-Shannon divergence from uniform over ``dim!`` states."""
    n = factorial(dim)
    return -2.0 / ((n + 1) / n * log(n + 1) - 2 * log(2 * n) + log(n))


def jensen_shannon(p, q) -> float:
    """``S[(p+q)/2] - (S[p] + S[q]) / 2`` in nats."""
    p = _probabilities(p)
    q = _probabilities(q)
    # clipped at zero: cancellation leaves ~1e-16 residue for p == q
    return max(0.0, _entropy(0.5 * (p + q)) - 0.5 * (_entropy(p) + _entropy(q)))


def _dim_of(probs: np.ndarray, dim: int | None) -> int:
    if dim is not None:
        return dim
    n, d = probs.size, 1
    while factorial(d) < n:
        d += 1
    if factorial(d) != n:
        raise InvalidInputError(f"distribution of length {n} is not over d! patterns; pass dim")
    return d


def disequilibrium(p, dim: int | None = None) -> float:
    """Normalized Jensen-Shannon divergence between ``p`` and the uniform distribution."""
    if isinstance(p, PatternDistribution):
        dim = p.params.dim
    probs = _probabilities(p)
    uniform = np.full(probs.size, 1.0 / probs.size)
    return q_zero(_dim_of(probs, dim)) * jensen_shannon(probs, uniform)


def statistical_complexity(p, dim: int | None = None) -> float:
    return disequilibrium(p, dim) * permutation_entropy(p)


def quantifiers(p: PatternDistribution) -> QuantifierPair:
    h = permutation_entropy(p)
    return QuantifierPair(h, disequilibrium(p) * h)
