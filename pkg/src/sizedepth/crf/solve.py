"""MAP depth inference: solve (diag(mask) + lam*(diag(s) - W)) y = d.

The system is symmetric positive definite whenever at least one pixel is
masked and lam > 0 (or everything is masked), so a preconditioned
conjugate gradient solve recovers the closed-form optimum without ever
forming the matrix. The compiled kernel is used when available, with a
vectorized numpy fallback selected at import.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from ..annotation import DepthTargets
from ..errors import (
    DimensionError,
    EmptyConstraintError,
    SolverError,
    UnderdeterminedError,
)
from ..raster import Raster
from . import _solve_np
from .energy import energy_terms
from .graph import SimilarityGraph, build_similarity

try:
    from . import _core
except ImportError:
    _core = None

DEFAULT_BACKEND = "cython" if _core is not None else "numpy"


def available_backends() -> list[str]:
    backends = ["numpy"]
    if _core is not None:
        backends.insert(0, "cython")
    return backends


def _kernel(backend: str | None):
    name = backend or DEFAULT_BACKEND
    if name == "cython":
        if _core is None:
            raise ValueError("cython backend requested but the extension is not built")
        return _core.solve_pcg, "cython"
    if name == "numpy":
        return _solve_np.solve_pcg, "numpy"
    raise ValueError(f"unknown backend {name!r}; expected one of {available_backends()}")


@dataclass(frozen=True)
class CrfConfig:
    """Hyperparameters of the propagation: lam trades the data term
    against smoothness, beta sharpens the similarity kernel."""

    lam: float = 1.0
    beta: float = 10.0
    tol: float = 1e-8
    max_iter: int = 10000

    def __post_init__(self):
        if self.lam < 0:
            raise DimensionError(f"lam must be >= 0, got {self.lam}")
        if self.beta < 0:
            raise DimensionError(f"beta must be >= 0, got {self.beta}")
        if not (0 < self.tol < 1):
            raise DimensionError(f"tol must lie in (0, 1), got {self.tol}")
        if self.max_iter < 1:
            raise DimensionError(f"max_iter must be >= 1, got {self.max_iter}")


@dataclass(frozen=True)
class DepthField:
    """Solved depth values (height x width) plus solve diagnostics."""

    y: np.ndarray
    config_used: CrfConfig
    residual: float
    iterations: int
    unary_energy: float = 0.0
    binary_energy: float = 0.0
    wall_time_s: float = 0.0
    backend: str = ""
    unit: str = "relative"

    @property
    def height(self) -> int:
        return self.y.shape[0]

    @property
    def width(self) -> int:
        return self.y.shape[1]


def solve_map(
    raster: Raster,
    targets: DepthTargets,
    config: CrfConfig | None = None,
    backend: str | None = None,
    graph: SimilarityGraph | None = None,
) -> DepthField:
    """Minimize the CRF energy for the given targets.

    Precomputing ``graph`` (build_similarity) lets callers reuse it across
    solves with the same raster and beta.
    """
    config = config or CrfConfig()
    n = raster.n_pixels
    if targets.d.shape != (n,):
        raise DimensionError(f"targets sized {targets.d.shape} for raster of {n} pixels")
    n_masked = targets.n_masked
    if n_masked == 0:
        raise EmptyConstraintError("cannot solve without any annotated pixel")
    if config.lam == 0 and n_masked < n:
        raise UnderdeterminedError(
            "lam = 0 leaves unannotated pixels unconstrained; annotate every patch "
            "or use lam > 0"
        )
    if graph is None:
        graph = build_similarity(raster, config.beta)
    elif graph.height != raster.height or graph.width != raster.width:
        raise DimensionError("similarity graph does not match raster dimensions")

    kernel, backend_name = _kernel(backend)
    h, w = raster.height, raster.width
    mask2 = targets.mask.reshape(h, w).astype(np.float64)
    b2 = targets.d.reshape(h, w)

    start = time.perf_counter()
    y2, residual, iterations = kernel(
        mask2, b2, graph.wh, graph.wv, config.lam, config.tol, config.max_iter
    )
    elapsed = time.perf_counter() - start
    if residual > config.tol:
        raise SolverError(
            f"no convergence after {iterations} iterations "
            f"(residual {residual:.3e} > tol {config.tol:.3e})",
            residual=residual,
            iterations=iterations,
        )
    unary, binary = energy_terms(graph, targets, y2.ravel())
    return DepthField(
        y=y2,
        config_used=config,
        residual=residual,
        iterations=iterations,
        unary_energy=unary,
        binary_energy=binary,
        wall_time_s=elapsed,
        backend=backend_name,
    )
