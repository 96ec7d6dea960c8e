"""sizedepth: human size labels on a patch grid propagated into dense
depth maps via a Gaussian CRF, plus evaluation and noise-study tooling."""

from .annotation import (
    DepthTargets,
    PatchGrid,
    SizeAnnotation,
    size_to_depth,
    targets_from_annotations,
)
from .crf import (
    DEFAULT_BACKEND,
    CrfConfig,
    DepthField,
    SimilarityGraph,
    available_backends,
    build_similarity,
    energy,
    solve_map,
)
from .metrics import MetricsReport, evaluate, sample_points
from .raster import (
    DEFAULT_HEIGHT,
    DEFAULT_WIDTH,
    Raster,
    compute_intensity,
    load_and_resize,
)
from .study import NoiseStudyConfig, SyntheticScene, generate_scene, run_study

__version__ = "0.1.0"

__all__ = [
    "CrfConfig",
    "DepthField",
    "DepthTargets",
    "MetricsReport",
    "NoiseStudyConfig",
    "PatchGrid",
    "Raster",
    "SimilarityGraph",
    "SizeAnnotation",
    "SyntheticScene",
    "DEFAULT_BACKEND",
    "DEFAULT_HEIGHT",
    "DEFAULT_WIDTH",
    "available_backends",
    "build_similarity",
    "compute_intensity",
    "energy",
    "evaluate",
    "generate_scene",
    "load_and_resize",
    "run_study",
    "sample_points",
    "size_to_depth",
    "solve_map",
    "targets_from_annotations",
]
