"""Persistence: PFM depth files, 16-bit PNG previews, annotation JSON,
and CSV reports.

All writers are deterministic: identical inputs produce byte-identical
files. Depth values are stored as 32-bit floats (the PFM payload type),
so arrays that are float32-representable round-trip bit exactly.
"""

from __future__ import annotations

import csv
import io as _stdio
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image

from .annotation import SizeAnnotation
from .errors import DecodeError, DimensionError, SchemaError

PFM_GRAY_TAG = "Pf"
PFM_SCALE = -1.0  # negative marks little-endian; magnitude 1 = unscaled values


@dataclass(frozen=True)
class DepthFileHeader:
    """Parsed PFM header. ``unit`` is API-level metadata (relative |
    meters); the PFM format itself has no slot for it."""

    tag: str
    width: int
    height: int
    scale: float
    unit: str = "relative"


# ---------------------------------------------------------------------------
# PFM depth files


def pfm_bytes(values: np.ndarray) -> bytes:
    """Encode an (H, W) array as grayscale PFM: rows bottom-to-top,
    little-endian float32, scale -1.0."""
    values = np.asarray(values, dtype=np.float64)
    if values.ndim != 2:
        raise DimensionError(f"depth payload must be 2-D, got shape {values.shape}")
    if not np.isfinite(values).all():
        raise DimensionError("depth payload contains non-finite values")
    h, w = values.shape
    header = f"{PFM_GRAY_TAG}\n{w} {h}\n{PFM_SCALE}\n".encode("ascii")
    payload = np.flipud(values).astype("<f4").tobytes()
    return header + payload


def parse_pfm(data: bytes) -> tuple[np.ndarray, DepthFileHeader]:
    """Decode grayscale PFM bytes into a float64 (H, W) array."""
    try:
        nl1 = data.index(b"\n")
        nl2 = data.index(b"\n", nl1 + 1)
        nl3 = data.index(b"\n", nl2 + 1)
        tag = data[:nl1].decode("ascii").strip()
        dims = data[nl1 + 1 : nl2].split()
        width, height = int(dims[0]), int(dims[1])
        scale = float(data[nl2 + 1 : nl3])
    except (ValueError, IndexError) as exc:
        raise DecodeError(f"malformed PFM header: {exc}") from None
    if tag != PFM_GRAY_TAG:
        raise DecodeError(f"expected grayscale PFM tag {PFM_GRAY_TAG!r}, got {tag!r}")
    if width < 1 or height < 1:
        raise DecodeError(f"bad PFM dimensions {width}x{height}")
    if scale >= 0:
        raise DecodeError("big-endian PFM payloads are not supported")
    payload = data[nl3 + 1 :]
    expected = width * height * 4
    if len(payload) != expected:
        raise DimensionError(
            f"PFM payload holds {len(payload)} bytes, header implies {expected}"
        )
    values = np.frombuffer(payload, dtype="<f4").reshape(height, width)
    values = np.flipud(values).astype(np.float64)
    header = DepthFileHeader(tag=tag, width=width, height=height, scale=scale)
    return values, header


def write_depth(field_or_values, path) -> None:
    """Write a DepthField (or bare 2-D array) as a PFM file."""
    values = getattr(field_or_values, "y", field_or_values)
    Path(path).write_bytes(pfm_bytes(values))


def read_depth(path) -> np.ndarray:
    """Read a PFM depth file back into a float64 (H, W) array."""
    values, _ = parse_pfm(Path(path).read_bytes())
    return values


# ---------------------------------------------------------------------------
# PNG preview (lossy, never read back)


def depth_preview_png_bytes(values: np.ndarray) -> bytes:
    """Min-max normalized 16-bit grayscale PNG; a constant field renders
    as mid-gray."""
    values = np.asarray(values, dtype=np.float64)
    lo, hi = values.min(), values.max()
    if hi == lo:
        scaled = np.full(values.shape, 32768, dtype=np.uint16)
    else:
        scaled = np.round((values - lo) / (hi - lo) * 65535.0).astype(np.uint16)
    img = Image.fromarray(scaled)  # uint16 maps to 16-bit grayscale
    buf = _stdio.BytesIO()
    img.save(buf, format="PNG")
    return buf.getvalue()


def write_depth_preview(values: np.ndarray, path) -> None:
    Path(path).write_bytes(depth_preview_png_bytes(values))


# ---------------------------------------------------------------------------
# Annotation documents
#
# { "grid": {"rows": int, "cols": int},
#   "focal_length": number | null,
#   "annotations": [ {"row": int, "col": int, "real_size_m": number,
#                     "pixel_extent": number | null} ] }
#
# Unknown extra fields are preserved on read and ignored semantically.


def _require(doc: dict, key: str, path: str):
    if key not in doc:
        raise SchemaError(f"{path}.{key}" if path else key, "missing required field")
    return doc[key]


def _check_int(value, path: str, minimum: int | None = None) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise SchemaError(path, f"expected an integer, got {value!r}")
    if minimum is not None and value < minimum:
        raise SchemaError(path, f"must be >= {minimum}, got {value}")
    return value


def _check_number(value, path: str, positive: bool = False) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SchemaError(path, f"expected a number, got {value!r}")
    if positive and not value > 0:
        raise SchemaError(path, f"must be > 0, got {value}")
    return float(value)


def validate_annotation_doc(doc) -> None:
    """Raise SchemaError (naming the offending field path) unless the
    document matches the annotation schema."""
    if not isinstance(doc, dict):
        raise SchemaError("", f"expected an object, got {type(doc).__name__}")
    grid = _require(doc, "grid", "")
    if not isinstance(grid, dict):
        raise SchemaError("grid", "expected an object")
    _check_int(_require(grid, "rows", "grid"), "grid.rows", minimum=1)
    _check_int(_require(grid, "cols", "grid"), "grid.cols", minimum=1)
    focal = doc.get("focal_length")
    if focal is not None:
        _check_number(focal, "focal_length", positive=True)
    anns = _require(doc, "annotations", "")
    if not isinstance(anns, list):
        raise SchemaError("annotations", "expected an array")
    seen = set()
    for i, ann in enumerate(anns):
        path = f"annotations[{i}]"
        if not isinstance(ann, dict):
            raise SchemaError(path, "expected an object")
        row = _check_int(_require(ann, "row", path), f"{path}.row", minimum=0)
        col = _check_int(_require(ann, "col", path), f"{path}.col", minimum=0)
        if row >= grid["rows"] or col >= grid["cols"]:
            raise SchemaError(path, f"patch ({row}, {col}) outside grid")
        _check_number(_require(ann, "real_size_m", path), f"{path}.real_size_m", positive=True)
        extent = ann.get("pixel_extent")
        if extent is not None:
            _check_number(extent, f"{path}.pixel_extent", positive=True)
        if (row, col) in seen:
            raise SchemaError(path, f"patch ({row}, {col}) annotated twice")
        seen.add((row, col))


def annotation_doc_bytes(doc: dict) -> bytes:
    """Canonical UTF-8 serialization: sorted keys, 2-space indent."""
    validate_annotation_doc(doc)
    return (json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=False) + "\n").encode("utf-8")


def write_annotations(doc: dict, path) -> None:
    Path(path).write_bytes(annotation_doc_bytes(doc))


def read_annotations(path) -> dict:
    """Read and validate an annotation document; extra fields survive."""
    raw = Path(path).read_bytes()
    try:
        doc = json.loads(raw.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise SchemaError("", f"not valid UTF-8 JSON: {exc}") from None
    validate_annotation_doc(doc)
    return doc


def make_annotation_doc(
    rows: int,
    cols: int,
    annotations: list[SizeAnnotation],
    focal_length: float | None = None,
) -> dict:
    return {
        "grid": {"rows": rows, "cols": cols},
        "focal_length": focal_length,
        "annotations": [
            {
                "row": a.row,
                "col": a.col,
                "real_size_m": a.real_size,
                "pixel_extent": a.pixel_extent,
            }
            for a in annotations
        ],
    }


def parse_annotation_doc(doc: dict) -> tuple[int, int, float, list[SizeAnnotation]]:
    """Semantic view of a validated document:
    (grid_rows, grid_cols, focal_length, annotations)."""
    validate_annotation_doc(doc)
    focal = doc.get("focal_length")
    annotations = [
        SizeAnnotation(
            row=a["row"],
            col=a["col"],
            real_size=float(a["real_size_m"]),
            pixel_extent=None if a.get("pixel_extent") is None else float(a["pixel_extent"]),
        )
        for a in doc["annotations"]
    ]
    return doc["grid"]["rows"], doc["grid"]["cols"], 1.0 if focal is None else float(focal), annotations


# ---------------------------------------------------------------------------
# CSV reports (RFC-4180-style quoting via the csv module)

METRICS_CSV_HEADER = ["image_id", "n_points", "mse", "cosine", "rank_accuracy", "lambda", "beta"]


def metrics_csv_row(image_id: str, report, lam=None, beta=None) -> list:
    return [
        image_id,
        report.n_points,
        repr(report.mse),
        repr(report.cosine_similarity),
        repr(report.pairwise_rank_accuracy),
        "" if lam is None else repr(lam),
        "" if beta is None else repr(beta),
    ]


def write_csv(path, header: list, rows: list[list]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def format_csv(header: list, rows: list[list]) -> str:
    buf = _stdio.StringIO()
    writer = csv.writer(buf)
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()
