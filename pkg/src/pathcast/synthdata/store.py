"""Dataset files: raw 8-bit array containers plus a JSON manifest.

Array container layout (little endian):

    bytes 0..3   magic "WPG1"
    bytes 4..15  uint32 height, width, channels
    bytes 16..   raw uint8 data, C order (height, width, channels)

The manifest lists every sample with its condition tags and the band
registry, and is the single source of truth for downstream training.
"""

import hashlib
import json
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..errors import ContractViolationError
from .physics import db_to_pixel, render_pathloss_map
from .raster import render_scene_raster
from .scene import SCENARIOS, generate_scene, make_capture, tx_trajectory

MAGIC = b"WPG1"
MANIFEST_NAME = "manifest.json"
DATASET_FORMAT = "pathcast-dataset"
DATASET_VERSION = 1


def write_array(path, arr: np.ndarray) -> None:
    """Write a uint8 array of shape (h, w) or (h, w, c) as a WPG1 container."""
    arr = np.asarray(arr)
    if arr.dtype != np.uint8:
        raise ContractViolationError(f"WPG1 stores uint8 arrays, got {arr.dtype}")
    if arr.ndim == 2:
        arr = arr[:, :, None]
    if arr.ndim != 3:
        raise ContractViolationError(f"expected (h, w[, c]) array, got shape {arr.shape}")
    h, w, c = arr.shape
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<III", h, w, c))
        fh.write(np.ascontiguousarray(arr).tobytes())


def read_array(path) -> np.ndarray:
    """Read a WPG1 container; (h, w) arrays come back 2-D, others (h, w, c)."""
    with open(path, "rb") as fh:
        header = fh.read(16)
        if len(header) != 16 or header[:4] != MAGIC:
            raise ContractViolationError(f"{path}: not a WPG1 array file")
        h, w, c = struct.unpack("<III", header[4:16])
        data = fh.read(h * w * c)
    if len(data) != h * w * c:
        raise ContractViolationError(f"{path}: truncated WPG1 payload")
    arr = np.frombuffer(data, dtype=np.uint8).reshape(h, w, c)
    return arr[:, :, 0] if c == 1 else arr


@dataclass(frozen=True)
class ScheduleRow:
    """One dataset condition: (scenario, altitude, band) with a snapshot count."""

    scenario_id: str
    altitude_m: float
    frequency_hz: float
    n_snapshots: int


@dataclass(frozen=True)
class SampleInfo:
    """Manifest entry for one aligned (raster, pathloss map) pair."""

    scenario_id: str
    altitude_m: float
    frequency_hz: float
    snapshot_index: int
    raster: str
    map: str
    image_hw: int
    grid_n: int

    @property
    def condition(self) -> tuple[str, float, float]:
        return (self.scenario_id, self.altitude_m, self.frequency_hz)


class DatasetManifest:
    """In-memory view of a dataset directory."""

    def __init__(self, root, meta: dict):
        self.root = Path(root)
        self.meta = meta
        self.samples = [SampleInfo(**row) for row in meta["samples"]]

    @classmethod
    def load(cls, root) -> "DatasetManifest":
        root = Path(root)
        path = root / MANIFEST_NAME
        if not path.exists():
            raise ContractViolationError(f"no {MANIFEST_NAME} under {root}")
        with open(path) as fh:
            meta = json.load(fh)
        if meta.get("format") != DATASET_FORMAT:
            raise ContractViolationError(f"{path}: unrecognised manifest format")
        return cls(root, meta)

    @property
    def bands_hz(self) -> list[float]:
        return [b["frequency_hz"] for b in self.meta["bands"]]

    @property
    def conditions(self) -> list[tuple[str, float, float]]:
        seen: dict[tuple, None] = {}
        for s in self.samples:
            seen.setdefault(s.condition)
        return list(seen)

    def select(self, conditions=None) -> list[SampleInfo]:
        """Samples matching any of the (scenario, altitude, frequency) rows."""
        if not conditions:
            return list(self.samples)
        keys = {(c[0], float(c[1]), float(c[2])) for c in conditions}
        picked = [s for s in self.samples if s.condition in keys]
        missing = keys - {s.condition for s in picked}
        if missing:
            raise ContractViolationError(
                f"conditions not present in manifest: {sorted(missing)}"
            )
        return picked

    def load_raster(self, sample: SampleInfo) -> np.ndarray:
        return read_array(self.root / sample.raster)

    def load_map(self, sample: SampleInfo) -> np.ndarray:
        return read_array(self.root / sample.map)

    def content_hash(self) -> str:
        blob = json.dumps(self.meta, sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


def _band_tag(frequency_hz: float) -> str:
    ghz = frequency_hz / 1e9
    return f"{ghz:g}GHz".replace(".", "p")


def build_dataset(
    schedule: list[ScheduleRow],
    seed: int,
    out_path,
    extent_m: dict[str, float] | float | None = None,
    image_hw: int = 64,
    grid_n: int = 32,
) -> DatasetManifest:
    """Render every scheduled snapshot and write the dataset directory.

    One scene is generated per scenario from (seed, scenario); the Tx
    trajectory's x-y projection is shared across altitudes and bands of
    that scenario, so rasters at equal snapshot_index differ only through
    the altitude-dependent footprint and maps additionally through the
    band.
    """
    if not schedule:
        raise ContractViolationError("schedule must be non-empty")
    keys = [(r.scenario_id, r.altitude_m, r.frequency_hz) for r in schedule]
    if len(set(keys)) != len(keys):
        raise ContractViolationError("schedule contains duplicate condition rows")
    for row in schedule:
        if row.n_snapshots <= 0:
            raise ContractViolationError("each schedule row needs n_snapshots > 0")
        if row.scenario_id not in SCENARIOS:
            raise ContractViolationError(f"unknown scenario {row.scenario_id!r}")

    if extent_m is None:
        extent_m = {"crossroad": 320.0, "wide_lane": 900.0}
    if not isinstance(extent_m, dict):
        extent_m = {s: float(extent_m) for s in SCENARIOS}

    out = Path(out_path)
    (out / "raster").mkdir(parents=True, exist_ok=True)
    (out / "map").mkdir(parents=True, exist_ok=True)

    scenes = {}
    trajectories = {}
    for row in schedule:
        key = row.scenario_id
        if key not in scenes:
            scenes[key] = generate_scene(seed, key, extent_m[key])
        # The densest snapshot count of a scenario fixes its trajectory so
        # every condition shares the same positions prefix-free by index.
        trajectories[key] = max(trajectories.get(key, 0), row.n_snapshots)

    traj = {k: tx_trajectory(scenes[k], n) for k, n in trajectories.items()}

    raster_cache: dict[tuple, str] = {}
    samples: list[dict] = []
    for row in schedule:
        scene = scenes[row.scenario_id]
        for snap in range(row.n_snapshots):
            tx_xy = traj[row.scenario_id][snap]
            cfg = make_capture(
                row.altitude_m, row.frequency_hz, tx_xy, grid_n=grid_n, image_hw=image_hw
            )
            raster_key = (row.scenario_id, row.altitude_m, snap)
            if raster_key not in raster_cache:
                raster = render_scene_raster(scene, cfg)
                name = f"raster/{row.scenario_id}_a{row.altitude_m:g}_s{snap:04d}.wpg"
                write_array(out / name, raster)
                raster_cache[raster_key] = name
            pl_db = render_pathloss_map(scene, cfg)
            map_name = (
                f"map/{row.scenario_id}_a{row.altitude_m:g}_"
                f"{_band_tag(row.frequency_hz)}_s{snap:04d}.wpg"
            )
            write_array(out / map_name, db_to_pixel(pl_db))
            samples.append(
                {
                    "scenario_id": row.scenario_id,
                    "altitude_m": row.altitude_m,
                    "frequency_hz": row.frequency_hz,
                    "snapshot_index": snap,
                    "raster": raster_cache[raster_key],
                    "map": map_name,
                    "image_hw": image_hw,
                    "grid_n": grid_n,
                }
            )

    bands = sorted({row.frequency_hz for row in schedule})
    meta = {
        "format": DATASET_FORMAT,
        "version": DATASET_VERSION,
        "seed": seed,
        "image_hw": image_hw,
        "grid_n": grid_n,
        "extent_m": extent_m,
        "bands": [{"f_id": i, "frequency_hz": f} for i, f in enumerate(bands)],
        "samples": samples,
    }
    with open(out / MANIFEST_NAME, "w") as fh:
        json.dump(meta, fh, indent=1, sort_keys=True)
        fh.write("\n")
    return DatasetManifest(out, meta)


def load_schedule(path) -> list[ScheduleRow]:
    """Parse a schedule file: JSON list of condition rows."""
    with open(path) as fh:
        rows = json.load(fh)
    out = []
    for row in rows:
        out.append(
            ScheduleRow(
                scenario_id=row["scenario_id"],
                altitude_m=float(row["altitude_m"]),
                frequency_hz=float(row["frequency_hz"]),
                n_snapshots=int(row["n_snapshots"]),
            )
        )
    return out
