"""Synthetic paired scene-raster / pathloss-map data generation."""

from .physics import (
    SPEED_OF_LIGHT_M_S,
    db_to_pixel,
    free_space_pathloss_db,
    obstruction_penalty_db,
    pixel_to_db,
    render_pathloss_map,
    segment_intersects_box,
)
from .raster import render_scene_raster
from .scene import (
    CAMERA_FOV_DEG,
    SCENARIOS,
    Building,
    CaptureConfig,
    SceneSpec,
    fov_extent_for_altitude,
    generate_scene,
    make_capture,
    receiver_cell_centers,
    tx_trajectory,
)
from .store import (
    DatasetManifest,
    SampleInfo,
    ScheduleRow,
    build_dataset,
    load_schedule,
    read_array,
    write_array,
)

__all__ = [
    "SPEED_OF_LIGHT_M_S",
    "CAMERA_FOV_DEG",
    "SCENARIOS",
    "Building",
    "CaptureConfig",
    "SceneSpec",
    "DatasetManifest",
    "SampleInfo",
    "ScheduleRow",
    "build_dataset",
    "db_to_pixel",
    "fov_extent_for_altitude",
    "free_space_pathloss_db",
    "generate_scene",
    "load_schedule",
    "make_capture",
    "obstruction_penalty_db",
    "pixel_to_db",
    "read_array",
    "receiver_cell_centers",
    "render_pathloss_map",
    "render_scene_raster",
    "segment_intersects_box",
    "tx_trajectory",
    "write_array",
]
