"""Procedural urban scenes and capture geometry.

A scene is a square patch of ground with road corridors and axis-aligned
box buildings. Two layouts are supported: ``crossroad`` (two orthogonal
corridors meeting at the centre) and ``wide_lane`` (a single corridor at
least twice as wide). Generation is fully determined by (seed,
scenario_id, extent_m).
"""

import math
from dataclasses import dataclass, field

import numpy as np

from ..errors import ContractViolationError

SCENARIOS = ("crossroad", "wide_lane")

# Road corridor half-widths in meters. wide_lane is deliberately >= 2x the
# crossroad corridor so the layouts are visually and electromagnetically
# distinct.
CROSSROAD_ROAD_WIDTH_M = 14.0
WIDE_LANE_ROAD_WIDTH_M = 32.0

# Camera field-of-view law: the ground footprint of a downward-looking
# capture grows linearly with altitude, footprint = 2 * altitude * tan(fov/2).
CAMERA_FOV_DEG = 60.0


@dataclass(frozen=True)
class Building:
    """An axis-aligned box with a flat roof."""

    x_min: float
    y_min: float
    x_max: float
    y_max: float
    height: float
    albedo_rgb: tuple[float, float, float]

    def footprint_contains(self, x, y):
        return (
            (x >= self.x_min) & (x <= self.x_max) & (y >= self.y_min) & (y <= self.y_max)
        )


@dataclass(frozen=True)
class SceneSpec:
    """A generated scene: world extent, buildings, and road layout."""

    seed: int
    scenario_id: str
    extent_m: float
    buildings: tuple[Building, ...] = field(default_factory=tuple)

    @property
    def road_width_m(self) -> float:
        if self.scenario_id == "crossroad":
            return CROSSROAD_ROAD_WIDTH_M
        return WIDE_LANE_ROAD_WIDTH_M

    def road_mask(self, x, y):
        """Vectorized predicate: True where (x, y) lies on a road corridor."""
        half = 0.5 * self.road_width_m
        c = 0.5 * self.extent_m
        on_lane = np.abs(np.asarray(y) - c) <= half
        if self.scenario_id == "wide_lane":
            return on_lane
        return on_lane | (np.abs(np.asarray(x) - c) <= half)


@dataclass(frozen=True)
class CaptureConfig:
    """Geometry of one aligned (raster, receiver-grid) capture.

    The raster and the receiver grid share the same square ground
    footprint of side ``fov_extent_m`` centred at the transmitter's
    ground projection; the transmitter sits at ``tx_position`` with the
    camera co-located on the platform underside.
    """

    altitude_m: float
    frequency_hz: float
    grid_n: int
    tx_position: tuple[float, float, float]
    fov_extent_m: float
    image_hw: int

    def __post_init__(self):
        if self.grid_n <= 0:
            raise ContractViolationError(f"grid_n must be positive, got {self.grid_n}")
        if self.image_hw <= 0:
            raise ContractViolationError(
                f"image_hw must be positive, got {self.image_hw}"
            )
        if self.altitude_m <= 0 or self.frequency_hz <= 0:
            raise ContractViolationError("altitude_m and frequency_hz must be positive")

    @property
    def footprint(self) -> tuple[float, float, float, float]:
        """(x_min, y_min, x_max, y_max) of the shared ground footprint."""
        tx_x, tx_y, _ = self.tx_position
        half = 0.5 * self.fov_extent_m
        return (tx_x - half, tx_y - half, tx_x + half, tx_y + half)


def fov_extent_for_altitude(altitude_m: float) -> float:
    """Ground coverage side length at a given altitude under the camera law."""
    return 2.0 * altitude_m * math.tan(math.radians(CAMERA_FOV_DEG) / 2.0)


def make_capture(
    altitude_m: float,
    frequency_hz: float,
    tx_xy: tuple[float, float],
    grid_n: int = 32,
    image_hw: int = 64,
) -> CaptureConfig:
    """Build a CaptureConfig with the footprint tied to altitude."""
    return CaptureConfig(
        altitude_m=float(altitude_m),
        frequency_hz=float(frequency_hz),
        grid_n=int(grid_n),
        tx_position=(float(tx_xy[0]), float(tx_xy[1]), float(altitude_m)),
        fov_extent_m=fov_extent_for_altitude(altitude_m),
        image_hw=int(image_hw),
    )


def receiver_cell_centers(cfg: CaptureConfig) -> tuple[np.ndarray, np.ndarray]:
    """World x/y coordinates of receiver cell centres, each shaped (grid_n,).

    Row index i marches along +y, column index j along +x, matching the
    raster pixel layout.
    """
    x_min, y_min, x_max, y_max = cfg.footprint
    step = cfg.fov_extent_m / cfg.grid_n
    xs = x_min + (np.arange(cfg.grid_n) + 0.5) * step
    ys = y_min + (np.arange(cfg.grid_n) + 0.5) * step
    return xs, ys


def raster_pixel_centers(cfg: CaptureConfig) -> tuple[np.ndarray, np.ndarray]:
    """World x/y coordinates of raster pixel centres, each shaped (image_hw,)."""
    x_min, y_min, x_max, y_max = cfg.footprint
    step = cfg.fov_extent_m / cfg.image_hw
    xs = x_min + (np.arange(cfg.image_hw) + 0.5) * step
    ys = y_min + (np.arange(cfg.image_hw) + 0.5) * step
    return xs, ys


def _boxes_overlap(a: tuple, b: tuple, margin: float = 2.0) -> bool:
    ax0, ay0, ax1, ay1 = a
    bx0, by0, bx1, by1 = b
    return not (
        ax1 + margin <= bx0 or bx1 + margin <= ax0 or ay1 + margin <= by0 or by1 + margin <= ay0
    )


def _sample_building(
    rng: np.random.Generator,
    region: tuple[float, float, float, float],
    road_clearance,
    existing: list[tuple],
    max_tries: int = 40,
) -> tuple | None:
    """Rejection-sample one building footprint inside ``region``.

    ``road_clearance(x0, y0, x1, y1)`` must return True when the box keeps
    clear of every road corridor.
    """
    rx0, ry0, rx1, ry1 = region
    for _ in range(max_tries):
        w = rng.uniform(8.0, 28.0)
        h = rng.uniform(8.0, 28.0)
        if rx1 - rx0 < w or ry1 - ry0 < h:
            continue
        x0 = rng.uniform(rx0, rx1 - w)
        y0 = rng.uniform(ry0, ry1 - h)
        box = (x0, y0, x0 + w, y0 + h)
        if not road_clearance(*box):
            continue
        if any(_boxes_overlap(box, other) for other in existing):
            continue
        return box
    return None


def generate_scene(seed: int, scenario_id: str, extent_m: float) -> SceneSpec:
    """Generate a deterministic scene for the given scenario.

    crossroad layouts carry two orthogonal road corridors through the
    centre with buildings filling the four quadrants; wide_lane layouts
    carry a single, wider corridor with buildings in the two flanking
    strips. Buildings never intersect a road corridor.
    """
    if extent_m <= 0:
        raise ContractViolationError(f"extent_m must be positive, got {extent_m}")
    if scenario_id not in SCENARIOS:
        raise ContractViolationError(
            f"unknown scenario_id {scenario_id!r}; expected one of {SCENARIOS}"
        )

    rng = np.random.default_rng(np.random.SeedSequence([int(seed), SCENARIOS.index(scenario_id), 7771]))
    e = float(extent_m)
    c = 0.5 * e
    half_road = 0.5 * (
        CROSSROAD_ROAD_WIDTH_M if scenario_id == "crossroad" else WIDE_LANE_ROAD_WIDTH_M
    )
    gap = 3.0  # setback between facades and the road edge

    if scenario_id == "crossroad":
        lo, hi = 0.02 * e, 0.98 * e
        regions = [
            (lo, lo, c - half_road - gap, c - half_road - gap),
            (c + half_road + gap, lo, hi, c - half_road - gap),
            (lo, c + half_road + gap, c - half_road - gap, hi),
            (c + half_road + gap, c + half_road + gap, hi, hi),
        ]

        def clearance(x0, y0, x1, y1):
            return (x1 < c - half_road or x0 > c + half_road) and (
                y1 < c - half_road or y0 > c + half_road
            )

    else:
        lo, hi = 0.02 * e, 0.98 * e
        regions = [
            (lo, lo, hi, c - half_road - gap),
            (lo, c + half_road + gap, hi, hi),
        ]

        def clearance(x0, y0, x1, y1):
            return y1 < c - half_road or y0 > c + half_road

    buildings: list[Building] = []
    footprints: list[tuple] = []
    per_region = 1 + int(rng.integers(1, 3))  # 2..3 buildings per region
    for region in regions:
        for _ in range(per_region):
            box = _sample_building(rng, region, clearance, footprints)
            if box is None:
                continue
            footprints.append(box)
            height = float(rng.uniform(10.0, 45.0))
            tint = rng.uniform(-0.08, 0.08, size=3)
            albedo = np.clip(np.array([0.55, 0.38, 0.32]) + tint, 0.0, 1.0)
            buildings.append(
                Building(
                    x_min=float(box[0]),
                    y_min=float(box[1]),
                    x_max=float(box[2]),
                    y_max=float(box[3]),
                    height=height,
                    albedo_rgb=tuple(float(a) for a in albedo),
                )
            )

    return SceneSpec(
        seed=int(seed),
        scenario_id=scenario_id,
        extent_m=e,
        buildings=tuple(buildings),
    )


def tx_trajectory(scene: SceneSpec, n_snapshots: int) -> np.ndarray:
    """Ground-plane transmitter positions, shaped (n_snapshots, 2).

    The platform moves at uniform speed along a scenario-specific
    polyline whose x-y projection depends only on (scenario, extent), so
    it is identical across flight altitudes and frequency bands:
    crossroad follows an L along the two corridors, wide_lane runs
    straight down the lane. Waypoints stay within the central 40% of the
    extent so capture footprints remain inside the world at the supported
    altitudes.
    """
    if n_snapshots <= 0:
        raise ContractViolationError("n_snapshots must be positive")
    e = scene.extent_m
    c = 0.5 * e
    if scene.scenario_id == "crossroad":
        waypoints = np.array([[0.3 * e, c], [c, c], [c, 0.7 * e]])
    else:
        waypoints = np.array([[0.3 * e, c], [0.7 * e, c]])

    seg = np.diff(waypoints, axis=0)
    seg_len = np.hypot(seg[:, 0], seg[:, 1])
    cum = np.concatenate([[0.0], np.cumsum(seg_len)])
    total = cum[-1]
    # Midpoint sampling of n equal arc-length steps keeps n_snapshots=1 sane
    # and avoids duplicating polyline corners.
    s = total * (np.arange(n_snapshots) + 0.5) / n_snapshots
    out = np.empty((n_snapshots, 2))
    for i, si in enumerate(s):
        k = min(np.searchsorted(cum, si, side="right") - 1, len(seg) - 1)
        t = (si - cum[k]) / seg_len[k]
        out[i] = waypoints[k] + t * seg[k]
    return out
