"""Evaluation: N-point sampling plus MSE, cosine similarity, and
pairwise rank accuracy between predicted and ground-truth depth.

MSE is computed after min-max normalizing both vectors to [0, 1] (depth
is only defined up to scale here); cosine and rank accuracy are scale
tolerant already and use the raw values. Ties count as rank-concordant.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError

DEFAULT_N_POINTS = 10


@dataclass(frozen=True)
class MetricsReport:
    mse: float
    cosine_similarity: float
    pairwise_rank_accuracy: float
    n_points: int
    cosine_defined: bool = True


def sample_points(seed: int, count: int, width: int, height: int) -> np.ndarray:
    """Draw ``count`` distinct pixel coordinates, uniform without
    replacement; returns (count, 2) of (row, col). Deterministic in seed."""
    n = width * height
    if count < 1 or count > n:
        raise DimensionError(f"cannot sample {count} points from {n} pixels")
    rng = np.random.default_rng(seed)
    flat = rng.choice(n, size=count, replace=False)
    return np.stack([flat // width, flat % width], axis=1)


def _minmax(v: np.ndarray) -> np.ndarray:
    lo, hi = v.min(), v.max()
    if hi == lo:
        return np.zeros_like(v)
    return (v - lo) / (hi - lo)


def evaluate(pred: np.ndarray, gt: np.ndarray) -> MetricsReport:
    """Score predicted against ground-truth depth at the same points."""
    pred = np.asarray(pred, dtype=float).ravel()
    gt = np.asarray(gt, dtype=float).ravel()
    if pred.size == 0 or pred.shape != gt.shape:
        raise DimensionError(
            f"need equal-length nonempty vectors, got {pred.shape} vs {gt.shape}"
        )

    mse = float(np.mean((_minmax(pred) - _minmax(gt)) ** 2))

    norm_p = float(np.linalg.norm(pred))
    norm_g = float(np.linalg.norm(gt))
    cosine_defined = norm_p > 0 and norm_g > 0
    cosine = float(pred @ gt / (norm_p * norm_g)) if cosine_defined else float("nan")

    n = pred.size
    if n < 2:
        rank = 1.0  # no pairs to get wrong
    else:
        iu, ju = np.triu_indices(n, k=1)
        sp = np.sign(pred[iu] - pred[ju])
        sg = np.sign(gt[iu] - gt[ju])
        rank = float(np.mean(sp * sg >= 0))

    return MetricsReport(
        mse=mse,
        cosine_similarity=cosine,
        pairwise_rank_accuracy=rank,
        n_points=n,
        cosine_defined=cosine_defined,
    )


def evaluate_at_points(
    pred_map: np.ndarray, gt_map: np.ndarray, points: np.ndarray
) -> MetricsReport:
    """Evaluate two (H, W) depth maps at sampled (row, col) points."""
    if pred_map.shape != gt_map.shape:
        raise DimensionError(f"shape mismatch {pred_map.shape} vs {gt_map.shape}")
    rows, cols = points[:, 0], points[:, 1]
    return evaluate(pred_map[rows, cols], gt_map[rows, cols])
