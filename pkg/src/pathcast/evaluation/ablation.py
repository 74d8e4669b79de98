"""Ablation runner: full model vs single-switch reduced variants."""

from pathlib import Path

from ..errors import ContractViolationError
from .report import NmseReport, make_row

ABLATION_VARIANTS = {
    "full": {},
    "no_freq_embed": {"use_freq_embedding": False},
    "no_srmoe": {"use_routed_experts": False},
}


def run_ablation(
    manifest,
    conditions,
    seed: int = 0,
    stage1: dict | None = None,
    stage2: dict | None = None,
    eval_fraction: float = 0.2,
    workdir=None,
) -> NmseReport:
    """Train each variant with identical seed/budget and compare NMSE.

    Codecs are trained once and shared, so the variants differ only in
    the single mapper config switch.  Rows are tagged train_tag=variant,
    mode="ablation"; NMSE pools the held-out samples of every condition.
    """
    # Imported here: the training package depends on evaluation.baseline,
    # so a module-level import would be circular.
    from ..mapper import PathlossGenerator
    from ..training.checkpoints import save_checkpoint, state_id
    from ..training.config import TrainConfig
    from ..training.data import (
        condition_tag,
        frequencies,
        load_maps_db,
        load_rasters,
        split_samples,
    )
    from ..training.stages import run_stage1, run_stage2

    conditions = [(str(s), float(a), float(f)) for s, a, f in conditions]
    bands = {c[2] for c in conditions}
    if len(bands) < 2:
        raise ContractViolationError(
            f"ablation needs at least 2 bands to be meaningful, got {len(bands)}"
        )
    stage1 = dict(stage1 or {})
    stage2 = dict(stage2 or {})
    s1_epochs = stage1.pop("epochs", 200)
    s2_epochs = stage2.pop("epochs", 300)
    sensory_model = stage1.pop("sensory_model", {})
    channel_model = stage1.pop("channel_model", {})
    base_model = stage2.pop("model", {})

    cfg_s = TrainConfig(
        stage="codec_sensory", epochs=s1_epochs, seed=seed, filter=conditions,
        model=sensory_model, **stage1,
    )
    cfg_c = TrainConfig(
        stage="codec_channel", epochs=s1_epochs, seed=seed, filter=conditions,
        model=channel_model, **stage1,
    )
    sensory = run_stage1(cfg_s, manifest, eval_fraction)
    channel = run_stage1(cfg_c, manifest, eval_fraction)

    held = []
    for cond in conditions:
        _, h = split_samples(manifest.select([cond]), eval_fraction)
        held += h
    if not held:
        raise ContractViolationError("no held-out samples for the ablation conditions")
    rasters = load_rasters(manifest, held)
    truth = load_maps_db(manifest, held)
    f_hz = frequencies(held)

    cid_s = state_id(sensory.to_state())
    cid_c = state_id(channel.to_state())
    if workdir is not None:
        workdir = Path(workdir)
        save_checkpoint(workdir / "codec_sensory.ckpt", "sensory_codec", sensory.to_state())
        save_checkpoint(workdir / "codec_channel.ckpt", "channel_codec", channel.to_state())

    rows = []
    checkpoints = {"sensory_codec": cid_s, "channel_codec": cid_c}
    test_tag = condition_tag(conditions)
    for variant, switch in ABLATION_VARIANTS.items():
        cfg_m = TrainConfig(
            stage="mapper", epochs=s2_epochs, seed=seed, filter=conditions,
            model={**base_model, **switch}, **stage2,
        )
        mapper = run_stage2(cfg_m, manifest, sensory, channel, eval_fraction)
        cid_m = state_id(mapper.to_state())
        checkpoints[f"mapper_{variant}"] = cid_m
        if workdir is not None:
            save_checkpoint(workdir / f"mapper_{variant}.ckpt", "mapper", mapper.to_state())
        pipeline = PathlossGenerator(sensory, mapper, channel)
        pred = pipeline.predict(rasters, f_hz)
        rows.append(
            make_row(
                pred,
                truth,
                train_tag=variant,
                test_tag=test_tag,
                mode="ablation",
                seed=seed,
                fraction=0.0,
                checkpoint_ids=(cid_s, cid_c, cid_m),
            )
        )
    provenance = {
        "dataset_hash": manifest.content_hash(),
        "seed": seed,
        "mode": "ablation",
        "eval_fraction": eval_fraction,
        "checkpoints": checkpoints,
    }
    return NmseReport(rows=rows, provenance=provenance)
