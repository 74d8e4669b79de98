"""The two training stages, few-shot adaptation, and the baseline run."""

from ..codec import VQCodec
from ..errors import ContractViolationError, StaleCheckpointError
from ..evaluation.baseline import ConvBaseline
from ..mapper import PathlossMapper, codec_fingerprint
from ..synthdata.store import DatasetManifest
from .config import TrainConfig
from .data import (
    fewshot_subset,
    frequencies,
    load_maps_db,
    load_maps_px,
    load_rasters,
    split_samples,
    unique_rasters,
)

_CODEC_STAGES = {"codec_sensory": "sensory", "codec_channel": "channel"}


def _train_samples(cfg: TrainConfig, manifest: DatasetManifest, eval_fraction: float):
    samples = manifest.select(cfg.filter)
    train, _ = split_samples(samples, eval_fraction)
    if not train:
        raise ContractViolationError("the training side of the split is empty")
    return train


def run_stage1(cfg: TrainConfig, manifest: DatasetManifest, eval_fraction: float = 0.2) -> VQCodec:
    """Train one codec (scene rasters or pathloss maps) on the train split."""
    if cfg.stage not in _CODEC_STAGES:
        raise ContractViolationError(
            f"run_stage1 wants a codec stage, got {cfg.stage!r}"
        )
    train = _train_samples(cfg, manifest, eval_fraction)
    modality = _CODEC_STAGES[cfg.stage]
    if modality == "sensory":
        X = load_rasters(manifest, unique_rasters(train))
    else:
        X = load_maps_px(manifest, train)
    codec = VQCodec(modality=modality, **cfg.estimator_overrides())
    codec.fit(X)
    return codec


def run_stage2(
    cfg: TrainConfig,
    manifest: DatasetManifest,
    sensory_codec: VQCodec,
    channel_codec: VQCodec,
    eval_fraction: float = 0.2,
) -> PathlossMapper:
    """Tokenize the train split with frozen codecs and train the mapper.

    Codec weights are fingerprinted before and after; any drift aborts,
    since stage 2 must never touch stage-1 parameters.
    """
    if cfg.stage != "mapper":
        raise ContractViolationError(f"run_stage2 wants stage 'mapper', got {cfg.stage!r}")
    fp_s = codec_fingerprint(sensory_codec)
    fp_c = codec_fingerprint(channel_codec)
    train = _train_samples(cfg, manifest, eval_fraction)
    X = sensory_codec.transform(load_rasters(manifest, train))
    y = channel_codec.transform(load_maps_px(manifest, train))
    mapper = PathlossMapper(
        num_sensory_codes=sensory_codec.num_codes,
        num_channel_codes=channel_codec.num_codes,
        **cfg.estimator_overrides(),
    )
    mapper.fit(X, y, frequencies(train))
    if codec_fingerprint(sensory_codec) != fp_s or codec_fingerprint(channel_codec) != fp_c:
        raise RuntimeError("stage 2 mutated frozen codec parameters")
    mapper.sensory_fingerprint_ = fp_s
    mapper.channel_fingerprint_ = fp_c
    return mapper


def run_fewshot(
    mapper: PathlossMapper,
    cfg: TrainConfig,
    manifest: DatasetManifest,
    sensory_codec: VQCodec,
    channel_codec: VQCodec,
    eval_fraction: float = 0.2,
) -> PathlossMapper:
    """Adapt a trained mapper to a new condition from a few samples.

    Picks ceil(fewshot_fraction * N) train-split samples of the target
    condition, registers any new bands, and fine-tunes the full mapper
    (codecs stay frozen).  The input mapper is not modified; an adapted
    copy is returned.
    """
    if cfg.stage != "finetune":
        raise ContractViolationError(f"run_fewshot wants stage 'finetune', got {cfg.stage!r}")
    if mapper.sensory_fingerprint_ is not None:
        if mapper.sensory_fingerprint_ != codec_fingerprint(sensory_codec):
            raise StaleCheckpointError("scene codec differs from the one the mapper was trained on")
        if mapper.channel_fingerprint_ != codec_fingerprint(channel_codec):
            raise StaleCheckpointError("pathloss codec differs from the one the mapper was trained on")
    train = _train_samples(cfg, manifest, eval_fraction)
    subset = fewshot_subset(train, cfg.fewshot_fraction, cfg.seed)
    adapted = PathlossMapper.from_state(mapper.to_state())
    if cfg.learning_rate is not None:
        adapted.set_params(learning_rate=cfg.learning_rate)
    adapted.set_params(batch_size=cfg.batch_size)
    for f_hz in sorted({s.frequency_hz for s in subset}):
        adapted.register_band(f_hz)
    X = sensory_codec.transform(load_rasters(manifest, subset))
    y = channel_codec.transform(load_maps_px(manifest, subset))
    adapted.fit_more(X, y, frequencies(subset), cfg.epochs)
    return adapted


def run_baseline(cfg: TrainConfig, manifest: DatasetManifest, eval_fraction: float = 0.2) -> ConvBaseline:
    """Train the direct-regression baseline on the same split."""
    if cfg.stage != "baseline":
        raise ContractViolationError(f"run_baseline wants stage 'baseline', got {cfg.stage!r}")
    train = _train_samples(cfg, manifest, eval_fraction)
    X = load_rasters(manifest, train)
    y = load_maps_db(manifest, train)
    baseline = ConvBaseline(grid_n=manifest.meta["grid_n"], **cfg.estimator_overrides())
    baseline.fit(X, y, frequencies(train))
    return baseline
