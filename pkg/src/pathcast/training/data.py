"""Dataset access for training: splits, filters, and array loading."""

import hashlib
import math

import numpy as np

from ..errors import ContractViolationError
from ..synthdata.physics import pixel_to_db
from ..synthdata.store import DatasetManifest, SampleInfo


def snapshot_key(sample: SampleInfo) -> int:
    """Deterministic hash of a sample's geometry (band-independent).

    All bands of one snapshot land in the same split so a band never leaks
    its geometry into the other side.
    """
    tag = f"{sample.scenario_id}|{sample.altitude_m:g}|{sample.snapshot_index}"
    return int.from_bytes(hashlib.sha256(tag.encode()).digest()[:8], "little")


def split_samples(
    samples: list[SampleInfo], eval_fraction: float = 0.2
) -> tuple[list[SampleInfo], list[SampleInfo]]:
    """Deterministic train/eval split by snapshot hash."""
    if not 0.0 < eval_fraction < 1.0:
        raise ContractViolationError(f"eval_fraction must lie in (0, 1), got {eval_fraction}")
    cut = int(round((1.0 - eval_fraction) * 1000))
    train = [s for s in samples if snapshot_key(s) % 1000 < cut]
    held = [s for s in samples if snapshot_key(s) % 1000 >= cut]
    return train, held


def split_tag(samples: list[SampleInfo]) -> str:
    """Content hash of a sample list, for recording which split was used."""
    blob = "\n".join(
        f"{s.scenario_id}|{s.altitude_m:g}|{s.frequency_hz:g}|{s.snapshot_index}"
        for s in samples
    )
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


def unique_rasters(samples: list[SampleInfo]) -> list[SampleInfo]:
    """One representative per raster (bands share the raster of a snapshot)."""
    seen: dict[str, SampleInfo] = {}
    for s in samples:
        seen.setdefault(s.raster, s)
    return list(seen.values())


def load_rasters(manifest: DatasetManifest, samples: list[SampleInfo]) -> np.ndarray:
    if not samples:
        raise ContractViolationError("no samples selected")
    return np.stack([manifest.load_raster(s) for s in samples])


def load_maps_db(manifest: DatasetManifest, samples: list[SampleInfo]) -> np.ndarray:
    """Pathloss maps as dB float64 (via the pixel mapping)."""
    if not samples:
        raise ContractViolationError("no samples selected")
    return np.stack([pixel_to_db(manifest.load_map(s)) for s in samples])


def load_maps_px(manifest: DatasetManifest, samples: list[SampleInfo]) -> np.ndarray:
    if not samples:
        raise ContractViolationError("no samples selected")
    return np.stack([manifest.load_map(s) for s in samples])


def frequencies(samples: list[SampleInfo]) -> np.ndarray:
    return np.array([s.frequency_hz for s in samples], dtype=np.float64)


def fewshot_subset(
    samples: list[SampleInfo], fraction: float, seed: int
) -> list[SampleInfo]:
    """ceil(fraction * N) samples, picked deterministically from the seed."""
    if not 0.0 < fraction <= 1.0:
        raise ContractViolationError(f"fraction must lie in (0, 1], got {fraction}")
    if not samples:
        raise ContractViolationError("no samples to subsample")
    n_pick = math.ceil(fraction * len(samples))
    rng = np.random.default_rng(np.random.SeedSequence([seed, 9219]))
    order = rng.permutation(len(samples))
    return [samples[i] for i in sorted(order[:n_pick])]


def condition_tag(conditions) -> str:
    """Compact human-readable label for a set of conditions."""
    parts = []
    for scenario, alt, f_hz in conditions:
        parts.append(f"{scenario}@{alt:g}m@{f_hz / 1e9:g}GHz")
    return "+".join(parts)
