"""Weighted Lebesgue spaces L^p(φ_p) and their pairing."""

from .spaces import (
    EmbeddingChain,
    WeightedSpace,
    conjugate,
    dual_extremal,
    dual_norm_gap,
    embedding_chain,
    exponent_key,
    holder_gap,
    make_weights,
    pairing,
    parse_exponent,
    random_chain_defect,
    weight_family,
    weighted_norm,
)

__all__ = [
    "EmbeddingChain",
    "WeightedSpace",
    "conjugate",
    "dual_extremal",
    "dual_norm_gap",
    "embedding_chain",
    "exponent_key",
    "holder_gap",
    "make_weights",
    "pairing",
    "parse_exponent",
    "random_chain_defect",
    "weight_family",
    "weighted_norm",
]
