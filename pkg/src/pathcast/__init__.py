"""pathcast: scene-raster to pathloss-map generation via discrete tokens.

Two quantized autoencoders (scene rasters, pathloss maps) define discrete
latent spaces; a carrier-conditioned mixture-of-experts transformer maps
between them.  A deterministic synthetic renderer supplies paired data.
"""

import torch

from .codec import VQCodec
from .conditioning import BandRegistry, FrequencyEmbedding, normalize_frequency, sinusoidal_encoding
from .errors import (
    ContractViolationError,
    NumericAbortError,
    StaleCheckpointError,
    UnknownBandError,
)
from .evaluation import ConvBaseline, NmseReport, NmseRow, nmse, nmse_db, run_ablation
from .mapper import PathlossGenerator, PathlossMapper
from .synthdata import build_dataset, generate_scene, render_pathloss_map, render_scene_raster

__version__ = "0.1.0"


def enable_determinism() -> None:
    """Single-threaded torch so repeated runs are bit-identical."""
    torch.set_num_threads(1)


__all__ = [
    "BandRegistry",
    "ContractViolationError",
    "ConvBaseline",
    "FrequencyEmbedding",
    "NmseReport",
    "NmseRow",
    "NumericAbortError",
    "PathlossGenerator",
    "PathlossMapper",
    "StaleCheckpointError",
    "UnknownBandError",
    "VQCodec",
    "build_dataset",
    "enable_determinism",
    "generate_scene",
    "nmse",
    "nmse_db",
    "normalize_frequency",
    "render_pathloss_map",
    "render_scene_raster",
    "run_ablation",
    "sinusoidal_encoding",
    "__version__",
]
