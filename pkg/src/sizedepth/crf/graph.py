"""4-connected similarity graph over the working raster.

Edge weights follow sim(b, c) = exp(-beta * |I_b - I_c|), so they live in
(0, 1]: identical neighbors weigh 1, sharp intensity steps approach 0 as
beta grows.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import DimensionError
from ..raster import Raster


@dataclass(frozen=True)
class SimilarityGraph:
    """Edge weights of the 4-connected pixel graph.

    ``wh[r, c]`` weights the horizontal edge (r, c)-(r, c+1) and
    ``wv[r, c]`` the vertical edge (r, c)-(r+1, c); ``degrees`` holds the
    per-pixel sum of incident weights, flat row-major.
    """

    height: int
    width: int
    wh: np.ndarray
    wv: np.ndarray
    degrees: np.ndarray

    @property
    def n_pixels(self) -> int:
        return self.height * self.width

    @property
    def n_edges(self) -> int:
        return self.height * (self.width - 1) + self.width * (self.height - 1)

    def edges(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Flat edge arrays (b, c, weight) over unordered 4-connected pairs,
        horizontal edges first, both in row-major scan order."""
        h, w = self.height, self.width
        idx = np.arange(h * w).reshape(h, w)
        b = np.concatenate([idx[:, :-1].ravel(), idx[:-1, :].ravel()])
        c = np.concatenate([idx[:, 1:].ravel(), idx[1:, :].ravel()])
        weights = np.concatenate([self.wh.ravel(), self.wv.ravel()])
        return b, c, weights

    def dense_system(self, mask: np.ndarray, lam: float) -> np.ndarray:
        """Dense diag(mask) + lam * (diag(s) - W). Test oracle only; the
        solvers never materialize this."""
        n = self.n_pixels
        a = np.zeros((n, n))
        b, c, weights = self.edges()
        a[b, c] = -lam * weights
        a[c, b] = -lam * weights
        a[np.arange(n), np.arange(n)] = mask.astype(float) + lam * self.degrees
        return a


def build_similarity(raster: Raster, beta: float) -> SimilarityGraph:
    """One weight exp(-beta * |I_b - I_c|) per 4-connected pixel pair."""
    if raster.intensity is None:
        raise DimensionError("raster intensity not computed")
    if beta < 0:
        raise DimensionError(f"beta must be >= 0, got {beta}")
    inten = raster.intensity
    wh = np.exp(-beta * np.abs(inten[:, :-1] - inten[:, 1:]))
    wv = np.exp(-beta * np.abs(inten[:-1, :] - inten[1:, :]))
    deg = np.zeros((raster.height, raster.width))
    deg[:, :-1] += wh
    deg[:, 1:] += wh
    deg[:-1, :] += wv
    deg[1:, :] += wv
    return SimilarityGraph(
        height=raster.height,
        width=raster.width,
        wh=wh,
        wv=wv,
        degrees=deg.ravel(),
    )
