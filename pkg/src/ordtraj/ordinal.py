"""Ordinal-pattern transformation of univariate time series.

A window of ``dim`` samples spaced ``delay`` apart is replaced by the
permutation that sorts it ascending. Equal values keep their temporal
order, so the earlier sample always receives the lower rank.

Patterns are identified either by their rank word (the sorting
permutation, e.g. ``(1, 2, 0)`` for the window ``[3, 1, 2]``) or by the
Lehmer code of that word, a dense index in ``[0, dim! - 1]``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import factorial
from typing import Sequence

import numpy as np

from .errors import InvalidInputError, SeriesTooShortError

MIN_DIM = 3
MAX_DIM = 7


def as_series(samples) -> np.ndarray:
    """Validate ``samples`` as a finite, nonempty 1-D float array."""
    x = np.asarray(samples, dtype=float)
    if x.ndim != 1:
        raise InvalidInputError(f"expected a 1-D series, got shape {x.shape}")
    if x.size == 0:
        raise InvalidInputError("series is empty")
    if not np.all(np.isfinite(x)):
        bad = int(np.flatnonzero(~np.isfinite(x))[0])
        raise InvalidInputError(f"non-finite sample at position {bad}")
    return x


@dataclass(frozen=True)
class EmbeddingParams:
    """Embedding dimension and delay of the ordinal transform."""

    dim: int
    delay: int = 1
    strict: bool = field(default=True, repr=False, compare=False)

    def __post_init__(self):
        if self.strict and not MIN_DIM <= self.dim <= MAX_DIM:
            raise InvalidInputError(
                f"embedding dimension must lie in [{MIN_DIM}, {MAX_DIM}], got {self.dim}"
            )
        if self.delay < 1:
            raise InvalidInputError(f"embedding delay must be >= 1, got {self.delay}")
        if self.dim < 2:
            raise InvalidInputError(f"embedding dimension must be >= 2, got {self.dim}")

    @classmethod
    def relaxed(cls, dim: int, delay: int = 1) -> "EmbeddingParams":
        """Parameters outside the supported [3, 7] range (any ``dim >= 2``)."""
        return cls(dim, delay, strict=False)

    @property
    def n_patterns(self) -> int:
        return factorial(self.dim)

    @property
    def span(self) -> int:
        """Number of samples covered by one window."""
        return (self.dim - 1) * self.delay + 1


def max_delay(n: int, dim: int) -> int:
    """Largest delay satisfying ``delay * (dim - 1) < n``."""
    if dim < 2:
        raise InvalidInputError(f"dimension must be >= 2, got {dim}")
    if n < dim:
        raise InvalidInputError(f"no window of dimension {dim} fits in {n} samples")
    return (n - 1) // (dim - 1)


def lehmer_index(words: np.ndarray) -> np.ndarray:
    """Lehmer codes of the rank words stored in the rows of ``words``."""
    words = np.atleast_2d(np.asarray(words, dtype=np.int64))
    dim = words.shape[1]
    # smaller[t, j, k] is True when a later entry k is smaller than entry j
    smaller = words[:, None, :] < words[:, :, None]
    later = np.triu(np.ones((dim, dim), dtype=bool), k=1)
    digits = (smaller & later).sum(axis=2)
    weights = np.array([factorial(dim - 1 - j) for j in range(dim)], dtype=np.int64)
    return digits @ weights


def rank_word(index: int, dim: int) -> tuple[int, ...]:
    """Inverse of :func:`lehmer_index` for a single pattern."""
    if not 0 <= index < factorial(dim):
        raise InvalidInputError(f"pattern index {index} out of range for D={dim}")
    remaining = list(range(dim))
    word = []
    for j in range(dim):
        digit, index = divmod(index, factorial(dim - 1 - j))
        word.append(remaining.pop(digit))
    return tuple(word)


@dataclass(frozen=True)
class Pattern:
    """One ordinal pattern, stored by rank word."""

    word: tuple[int, ...]

    def __post_init__(self):
        if sorted(self.word) != list(range(len(self.word))):
            raise InvalidInputError(f"{self.word} is not a permutation of 0..{len(self.word) - 1}")

    @property
    def dim(self) -> int:
        return len(self.word)

    @property
    def index(self) -> int:
        return int(lehmer_index(np.array(self.word))[0])

    @classmethod
    def from_index(cls, index: int, dim: int) -> "Pattern":
        return cls(rank_word(index, dim))


def extract_pattern(window: Sequence[float]) -> Pattern:
    """Pattern of a single window; ties resolved by temporal position."""
    w = as_series(window)
    return Pattern(tuple(int(i) for i in np.argsort(w, kind="stable")))


def _readonly(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class OrdinalSequence:
    """Pattern indices of every window of a series, in temporal order."""

    indices: np.ndarray = field(repr=False)
    params: EmbeddingParams
    n: int

    @property
    def m(self) -> int:
        return int(self.indices.size)

    @property
    def patterns(self) -> list[Pattern]:
        return [Pattern.from_index(int(i), self.params.dim) for i in self.indices]

    def __len__(self):
        return self.m


def extract_sequence(series, params: EmbeddingParams) -> OrdinalSequence:
    """Slide a window with unit stride and map each position to its pattern."""
    x = as_series(series)
    n = x.size
    m = n - (params.dim - 1) * params.delay
    if m < 1:
        raise SeriesTooShortError(n, params.dim, params.delay)
    positions = np.arange(m)[:, None] + params.delay * np.arange(params.dim)
    words = np.argsort(x[positions], axis=1, kind="stable")
    return OrdinalSequence(_readonly(lehmer_index(words)), params, n)


@dataclass(frozen=True)
class PatternDistribution:
    """Relative frequency of each of the ``dim!`` patterns (dense)."""

    probabilities: np.ndarray = field(repr=False)
    params: EmbeddingParams

    def __getitem__(self, pattern) -> float:
        if isinstance(pattern, Pattern):
            pattern = pattern.index
        return float(self.probabilities[pattern])


def pattern_distribution(seq: OrdinalSequence) -> PatternDistribution:
    if seq.m < 1:
        raise InvalidInputError("ordinal sequence is empty")
    counts = np.bincount(seq.indices, minlength=seq.params.n_patterns)
    return PatternDistribution(_readonly(counts / seq.m), seq.params)
