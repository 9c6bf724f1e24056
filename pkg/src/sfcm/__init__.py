"""Change detection for co-registered grayscale image pairs.

The pipeline: load two acquisitions of the same scene, form the
normalized difference image, cluster it with fuzzy c-means under an
optional spatial regularization, and read the change map off the
brightest cluster. A synthetic speckle benchmark with known ground
truth quantifies detection quality.
"""

from .benchmark import (
    BenchRow,
    DetectionMetrics,
    Disk,
    Phantom,
    Rect,
    StandardScene,
    add_speckle,
    benchmark_csv,
    benchmark_rows,
    make_phantom,
    metrics_to_csv,
    score,
    speckled_pair,
    standard_scene,
)
from .clustering import (
    ChangeResult,
    apply_spatial,
    fcm_membership,
    fcm_objective,
    init_centers,
    run_sfcm,
    spatial_intensity,
    spatial_neighbor,
    sweep_m,
    sweep_pq,
    trace_to_csv,
    update_centers,
)
from .config import SfcmConfig, load_config, parse_config, save_config
from .diffimage import difference_image, quantize
from .errors import ConfigError, ImageIOError, NumericalError
from .estimator import SpatialFuzzyCMeans
from .grid import defuzzify, load_image, save_image

__version__ = "0.1.0"

__all__ = [
    "BenchRow",
    "ChangeResult",
    "ConfigError",
    "DetectionMetrics",
    "Disk",
    "ImageIOError",
    "NumericalError",
    "Phantom",
    "Rect",
    "SfcmConfig",
    "SpatialFuzzyCMeans",
    "StandardScene",
    "add_speckle",
    "apply_spatial",
    "benchmark_csv",
    "benchmark_rows",
    "defuzzify",
    "difference_image",
    "fcm_membership",
    "fcm_objective",
    "init_centers",
    "load_config",
    "load_image",
    "make_phantom",
    "metrics_to_csv",
    "parse_config",
    "quantize",
    "run_sfcm",
    "save_config",
    "save_image",
    "score",
    "spatial_intensity",
    "spatial_neighbor",
    "speckled_pair",
    "standard_scene",
    "sweep_m",
    "sweep_pq",
    "trace_to_csv",
    "update_centers",
    "__version__",
]
