"""Patch grid, size annotations, and the size-to-depth conversion.

A human labels the real-world size of the dominant component of each
patch; the pinhole relation depth = focal * size / pixel_extent turns
each label into a per-patch depth target shared by all its pixels.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConflictError, DimensionError, EmptyConstraintError

DEFAULT_GRID_ROWS = 7
DEFAULT_GRID_COLS = 7


@dataclass(frozen=True)
class PatchGrid:
    """Partition of an image_height x image_width raster into rows x cols
    rectangular patches. Remainder pixels go to the last row/column patch,
    so every pixel belongs to exactly one patch."""

    rows: int
    cols: int
    image_width: int
    image_height: int

    def __post_init__(self):
        if self.rows < 1 or self.cols < 1:
            raise DimensionError(f"grid must be at least 1x1, got {self.rows}x{self.cols}")
        if self.rows > self.image_height or self.cols > self.image_width:
            raise DimensionError(
                f"grid {self.rows}x{self.cols} exceeds image {self.image_height}x{self.image_width}"
            )

    @property
    def n_patches(self) -> int:
        return self.rows * self.cols

    def patch_bounds(self, row: int, col: int) -> tuple[int, int, int, int]:
        """Half-open pixel bounds (y0, y1, x0, x1) of patch (row, col)."""
        if not (0 <= row < self.rows and 0 <= col < self.cols):
            raise DimensionError(f"patch ({row}, {col}) outside grid {self.rows}x{self.cols}")
        ph = self.image_height // self.rows
        pw = self.image_width // self.cols
        y0 = row * ph
        x0 = col * pw
        y1 = self.image_height if row == self.rows - 1 else y0 + ph
        x1 = self.image_width if col == self.cols - 1 else x0 + pw
        return y0, y1, x0, x1

    def patch_of_pixel(self, y: int, x: int) -> tuple[int, int]:
        ph = self.image_height // self.rows
        pw = self.image_width // self.cols
        return min(y // ph, self.rows - 1), min(x // pw, self.cols - 1)

    def patch_width_px(self, row: int, col: int) -> int:
        _, _, x0, x1 = self.patch_bounds(row, col)
        return x1 - x0


@dataclass(frozen=True)
class SizeAnnotation:
    """One human label: the dominant component of patch (row, col) has
    real-world size ``real_size`` meters and spans ``pixel_extent`` pixels
    in the photo (None means: assume it spans the patch width)."""

    row: int
    col: int
    real_size: float
    pixel_extent: float | None = None

    def __post_init__(self):
        if not self.real_size > 0:
            raise DimensionError(f"real_size must be > 0, got {self.real_size}")
        if self.pixel_extent is not None and not self.pixel_extent > 0:
            raise DimensionError(f"pixel_extent must be > 0, got {self.pixel_extent}")


@dataclass(frozen=True)
class DepthTargets:
    """Per-pixel depth targets ``d`` (flat, row-major) plus the mask of
    pixels whose patch carries an annotation. Unmasked entries are 0."""

    d: np.ndarray
    mask: np.ndarray

    def __post_init__(self):
        if self.d.shape != self.mask.shape or self.d.ndim != 1:
            raise DimensionError("d and mask must be equal-length flat vectors")

    @property
    def n_masked(self) -> int:
        return int(self.mask.sum())


def size_to_depth(real_size: float, pixel_extent: float, focal_length: float = 1.0) -> float:
    """Pinhole relation: depth = focal_length * real_size / pixel_extent.

    With focal_length = 1 the result is relative depth; a true focal
    length in pixels makes it metric.
    """
    if not (real_size > 0 and pixel_extent > 0 and focal_length > 0):
        raise DimensionError(
            f"size_to_depth needs positive inputs, got size={real_size} "
            f"extent={pixel_extent} focal={focal_length}"
        )
    return focal_length * real_size / pixel_extent


def targets_from_annotations(
    grid: PatchGrid,
    annotations: list[SizeAnnotation],
    focal_length: float = 1.0,
) -> DepthTargets:
    """Rasterize annotations into per-pixel depth targets.

    Every pixel of an annotated patch gets that patch's depth value and
    mask=True; pixels of unannotated patches stay masked out.
    """
    if not annotations:
        raise EmptyConstraintError("at least one patch must be annotated")
    seen = set()
    for ann in annotations:
        if not (0 <= ann.row < grid.rows and 0 <= ann.col < grid.cols):
            raise DimensionError(
                f"annotation targets patch ({ann.row}, {ann.col}) outside grid "
                f"{grid.rows}x{grid.cols}"
            )
        if (ann.row, ann.col) in seen:
            raise ConflictError(f"patch ({ann.row}, {ann.col}) annotated twice")
        seen.add((ann.row, ann.col))

    d = np.zeros(grid.image_height * grid.image_width)
    mask = np.zeros(grid.image_height * grid.image_width, dtype=bool)
    d2 = d.reshape(grid.image_height, grid.image_width)
    m2 = mask.reshape(grid.image_height, grid.image_width)
    for ann in annotations:
        extent = ann.pixel_extent
        if extent is None:
            extent = float(grid.patch_width_px(ann.row, ann.col))
        depth = size_to_depth(ann.real_size, extent, focal_length)
        y0, y1, x0, x1 = grid.patch_bounds(ann.row, ann.col)
        d2[y0:y1, x0:x1] = depth
        m2[y0:y1, x0:x1] = True
    return DepthTargets(d=d, mask=mask)
