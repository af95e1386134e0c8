"""Ordinal-pattern features for transportation-mode classification of GPS trajectories."""

from .errors import (
    EmptyDatasetError,
    InvalidInputError,
    ParseError,
    SequenceTooShortError,
    SeriesTooShortError,
    ValidationError,
)
from .ordinal import (
    EmbeddingParams,
    OrdinalSequence,
    Pattern,
    PatternDistribution,
    extract_pattern,
    extract_sequence,
    max_delay,
    pattern_distribution,
)
from .quantifiers import (
    QuantifierPair,
    permutation_entropy,
    q_zero,
    shannon_entropy,
    statistical_complexity,
)
from .transition import TransitionGraph, build_graph, self_transition_probability

__version__ = "0.1.0"
