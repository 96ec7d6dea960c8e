"""CRF energy: masked unary data term plus similarity-weighted smoothness.

E(y) = sum_{p masked} (y_p - d_p)^2
     + lam * sum_{unordered 4-connected (b,c)} sim(b,c) (y_b - y_c)^2
"""

from __future__ import annotations

import numpy as np

from ..annotation import DepthTargets
from ..errors import DimensionError
from ..raster import Raster
from .graph import SimilarityGraph, build_similarity


def energy_terms(
    graph: SimilarityGraph, targets: DepthTargets, y: np.ndarray
) -> tuple[float, float]:
    """Return (unary, binary) evaluated at y; the total is unary + lam*binary."""
    n = graph.n_pixels
    y = np.asarray(y, dtype=float).ravel()
    if y.shape != (n,) or targets.d.shape != (n,):
        raise DimensionError(
            f"expected {n} pixels, got y={y.shape} d={targets.d.shape}"
        )
    unary = float(((y - targets.d)[targets.mask] ** 2).sum())
    y2 = y.reshape(graph.height, graph.width)
    dh = y2[:, :-1] - y2[:, 1:]
    dv = y2[:-1, :] - y2[1:, :]
    binary = float((graph.wh * dh**2).sum() + (graph.wv * dv**2).sum())
    return unary, binary


def energy_of_graph(
    graph: SimilarityGraph, targets: DepthTargets, y: np.ndarray, lam: float
) -> float:
    unary, binary = energy_terms(graph, targets, y)
    return unary + lam * binary


def energy(raster: Raster, targets: DepthTargets, y: np.ndarray, config) -> float:
    """Energy at y for a raster and CrfConfig; builds the similarity graph."""
    graph = build_similarity(raster, config.beta)
    return energy_of_graph(graph, targets, y, config.lam)
