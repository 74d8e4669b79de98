"""Shared fixtures: thread pinning and a tiny session-scoped dataset."""

import pytest
import torch

torch.set_num_threads(1)

from pathcast.synthdata.store import ScheduleRow, build_dataset

# Small enough that codec/mapper micro-training stays in the seconds range:
# 16px rasters quantize to 4x4 tokens with two downsamples, 8px grids to 4x4
# with one.
TINY_IMAGE_HW = 16
TINY_GRID_N = 8

TINY_CODEC_KW = dict(
    num_codes=8,
    code_dim=4,
    base_channels=4,
    token_hw=4,
    batch_size=8,
    seed=0,
)

TINY_MAPPER_KW = dict(
    d_model=16,
    n_heads=2,
    n_blocks=1,
    d_ff=32,
    n_routed_experts=2,
    freq_dim=4,
    batch_size=8,
    seed=0,
)


@pytest.fixture(scope="session")
def tiny_dataset(tmp_path_factory):
    """Crossroad at 70 m, two bands, 12 snapshots each, 16px/8-cell captures."""
    root = tmp_path_factory.mktemp("data") / "tiny"
    schedule = [
        ScheduleRow("crossroad", 70.0, 1.6e9, 12),
        ScheduleRow("crossroad", 70.0, 28e9, 12),
    ]
    return build_dataset(
        schedule, seed=0, out_path=root, image_hw=TINY_IMAGE_HW, grid_n=TINY_GRID_N
    )


@pytest.fixture(scope="session")
def tiny_codecs(tiny_dataset):
    """A sensory and a channel codec trained briefly on the tiny dataset."""
    from pathcast.codec import VQCodec
    from pathcast.training.data import load_maps_px, load_rasters, unique_rasters

    samples = tiny_dataset.select()
    rasters = load_rasters(tiny_dataset, unique_rasters(samples))
    maps_px = load_maps_px(tiny_dataset, samples)
    sensory = VQCodec(modality="sensory", n_epochs=2, **TINY_CODEC_KW).fit(rasters)
    channel = VQCodec(modality="channel", n_epochs=2, **TINY_CODEC_KW).fit(maps_px)
    return sensory, channel
