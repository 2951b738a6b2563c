"""Weighted fractional Sobolev embeddings on radial functions: exponent
calculus, discrete norms, numerical verification and a mountain-pass solver."""

from .exponents import (
    DomainError,
    EmbeddingReport,
    PotentialFamily,
    SpaceParams,
    WeightExponents,
    admissible_ranges,
    alpha_star,
    classify_potentials,
    delta_inf,
    delta_zero,
    q_star,
)

__version__ = "0.1.0"
