"""Similarity graph construction, CRF energy, and the MAP solve."""

from .energy import energy, energy_of_graph, energy_terms
from .graph import SimilarityGraph, build_similarity
from .solve import (
    DEFAULT_BACKEND,
    CrfConfig,
    DepthField,
    available_backends,
    solve_map,
)

__all__ = [
    "CrfConfig",
    "DepthField",
    "SimilarityGraph",
    "DEFAULT_BACKEND",
    "available_backends",
    "build_similarity",
    "energy",
    "energy_of_graph",
    "energy_terms",
    "solve_map",
]
