"""Top-down orthographic scene rasters.

Roads, open ground, and building roofs are painted in distinct albedo
bands and quantized to 8 bits. This is the "camera" of the synthetic
pipeline: the raster and the pathloss grid share one ground footprint.
"""

import numpy as np

from ..errors import ContractViolationError
from .scene import CaptureConfig, SceneSpec, raster_pixel_centers

GROUND_ALBEDO = (0.34, 0.42, 0.30)
ROAD_ALBEDO = (0.18, 0.18, 0.20)


def render_scene_raster(scene: SceneSpec, cfg: CaptureConfig) -> np.ndarray:
    """Paint the scene footprint as an (image_hw, image_hw, 3) uint8 raster."""
    x_min, y_min, x_max, y_max = cfg.footprint
    if x_min < 0 or y_min < 0 or x_max > scene.extent_m or y_max > scene.extent_m:
        raise ContractViolationError(
            f"capture footprint {cfg.footprint} exceeds world extent "
            f"[0, {scene.extent_m}]^2; lower the altitude or enlarge the scene"
        )

    xs, ys = raster_pixel_centers(cfg)
    gx, gy = np.meshgrid(xs, ys)

    img = np.empty((cfg.image_hw, cfg.image_hw, 3), dtype=np.float64)
    img[:] = GROUND_ALBEDO
    road = scene.road_mask(gx, gy)
    img[road] = ROAD_ALBEDO
    # Roofs paint over roads/ground; later (taller-agnostic) boxes never
    # overlap earlier ones by construction.
    for b in scene.buildings:
        mask = b.footprint_contains(gx, gy)
        img[mask] = b.albedo_rgb
    return np.round(img * 255.0).astype(np.uint8)
