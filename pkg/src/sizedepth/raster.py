"""Image loading, area-average resizing, and per-pixel intensity.

Depth propagation runs on a small working raster (default 63x84); the
similarity kernel only ever looks at the scalar intensity channel.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, replace

import numpy as np
from PIL import Image, UnidentifiedImageError

from .errors import DecodeError, DimensionError

# Working resolution: 63 rows x 84 columns.
DEFAULT_HEIGHT = 63
DEFAULT_WIDTH = 84

# Rec. 601 luma weights on [0, 1] channels.
_LUMA = np.array([0.299, 0.587, 0.114])


@dataclass(frozen=True)
class Raster:
    """An RGB image with an optional scalar intensity channel, all in [0, 1].

    ``rgb`` is (height, width, 3) float64, ``intensity`` (height, width)
    float64 or None until computed. Pixels are indexed row-major:
    p = row * width + col.
    """

    width: int
    height: int
    rgb: np.ndarray
    intensity: np.ndarray | None = None

    def __post_init__(self):
        if self.width < 1 or self.height < 1 or self.width * self.height < 2:
            raise DimensionError(
                f"raster must contain at least one 4-connected edge, got {self.height}x{self.width}"
            )
        if self.rgb.shape != (self.height, self.width, 3):
            raise DimensionError(
                f"rgb shape {self.rgb.shape} does not match {self.height}x{self.width}x3"
            )
        if self.rgb.min() < 0.0 or self.rgb.max() > 1.0:
            raise DimensionError("rgb channels must lie in [0, 1]")
        if self.intensity is not None:
            if self.intensity.shape != (self.height, self.width):
                raise DimensionError(
                    f"intensity shape {self.intensity.shape} does not match {self.height}x{self.width}"
                )
            if self.intensity.min() < 0.0 or self.intensity.max() > 1.0:
                raise DimensionError("intensity must lie in [0, 1]")

    @property
    def n_pixels(self) -> int:
        return self.width * self.height


def _area_weights(n_src: int, n_dst: int) -> np.ndarray:
    """Row-stochastic (n_dst, n_src) matrix of exact box-filter overlaps.

    Output cell i covers the source interval [i*s, (i+1)*s) with
    s = n_src/n_dst. Overlap lengths are computed in integer units of
    1/n_dst so the weights are exact; each row sums to 1.
    """
    w = np.zeros((n_dst, n_src))
    for i in range(n_dst):
        lo = i * n_src  # interval bounds scaled by n_dst
        hi = (i + 1) * n_src
        j0 = lo // n_dst
        j1 = -(-hi // n_dst)  # ceil division
        for j in range(j0, min(j1, n_src)):
            overlap = min(hi, (j + 1) * n_dst) - max(lo, j * n_dst)
            if overlap > 0:
                w[i, j] = overlap
    return w / n_src


def resize_area(rgb: np.ndarray, target_width: int, target_height: int) -> np.ndarray:
    """Resample (H, W, 3) float data so each output pixel is the exact
    area-weighted mean of the source pixels it covers."""
    h, w = rgb.shape[:2]
    if h == target_height and w == target_width:
        return rgb.copy()
    wy = _area_weights(h, target_height)
    wx = _area_weights(w, target_width)
    out = np.tensordot(wy, rgb, axes=(1, 0))  # (Ht, W, 3)
    out = np.tensordot(wx, out, axes=(1, 1)).transpose(1, 0, 2)  # (Ht, Wt, 3)
    return np.clip(out, 0.0, 1.0)


def load_and_resize(
    image_bytes: bytes,
    target_width: int = DEFAULT_WIDTH,
    target_height: int = DEFAULT_HEIGHT,
) -> Raster:
    """Decode a PNG/JPEG and box-filter it down to the working resolution.

    Channels are mapped to [0, 1]; a constant-color image stays constant.
    """
    if target_width < 2 or target_height < 2:
        raise DimensionError(
            f"target dimensions must be >= 2, got {target_width}x{target_height}"
        )
    try:
        img = Image.open(io.BytesIO(image_bytes))
        img = img.convert("RGB")
    except (UnidentifiedImageError, OSError, ValueError) as exc:
        raise DecodeError(f"could not decode image: {exc}") from None
    rgb = np.asarray(img, dtype=np.float64) / 255.0
    rgb = resize_area(rgb, target_width, target_height)
    return Raster(width=target_width, height=target_height, rgb=rgb)


def compute_intensity(raster: Raster) -> Raster:
    """Attach the Rec. 601 luma of the rgb channels as the intensity plane."""
    luma = raster.rgb @ _LUMA
    return replace(raster, intensity=np.clip(luma, 0.0, 1.0))


def raster_from_array(rgb: np.ndarray) -> Raster:
    """Wrap an (H, W, 3) array in [0, 1] as a Raster with intensity computed."""
    rgb = np.asarray(rgb, dtype=np.float64)
    h, w = rgb.shape[:2]
    return compute_intensity(Raster(width=w, height=h, rgb=rgb))


def raster_from_intensity(gray: np.ndarray) -> Raster:
    """Build a gray Raster directly from an (H, W) intensity plane."""
    gray = np.asarray(gray, dtype=np.float64)
    rgb = np.repeat(gray[:, :, None], 3, axis=2)
    h, w = gray.shape
    return Raster(width=w, height=h, rgb=rgb, intensity=gray.copy())
