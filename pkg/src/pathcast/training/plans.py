"""Experiment plans: train per mode, evaluate, and emit a report."""

from pathlib import Path

from ..errors import ContractViolationError
from ..evaluation.report import NmseReport, make_row
from ..mapper import PathlossGenerator
from ..synthdata.store import DatasetManifest
from .checkpoints import save_checkpoint
from .config import ExperimentPlan, TrainConfig
from .data import (
    condition_tag,
    frequencies,
    load_maps_db,
    load_rasters,
    split_samples,
    split_tag,
)
from .stages import run_fewshot, run_stage1, run_stage2

DEFAULT_STAGE1_EPOCHS = 200
DEFAULT_STAGE2_EPOCHS = 300
DEFAULT_FEWSHOT_EPOCHS = 60


def _stage_cfg(stage, section: dict, seed: int, cond_filter, default_epochs: int) -> TrainConfig:
    section = dict(section)
    section.pop("sensory_model", None)
    section.pop("channel_model", None)
    epochs = section.pop("epochs", default_epochs)
    return TrainConfig(stage=stage, epochs=epochs, seed=seed, filter=cond_filter, **section)


def _eval_rows(plan, manifest, pipeline, mode, fraction, ckpt_ids, allow_unknown):
    rows = []
    train_tag = condition_tag(plan.train_conditions)
    for cond in plan.test_conditions:
        samples = manifest.select([cond])
        _, held = split_samples(samples, plan.eval_fraction)
        if not held:
            raise ContractViolationError(f"no held-out samples for condition {cond}")
        rasters = load_rasters(manifest, held)
        truth = load_maps_db(manifest, held)
        pred = pipeline.predict(rasters, frequencies(held), allow_unknown_band=allow_unknown)
        rows.append(
            make_row(
                pred,
                truth,
                train_tag=train_tag,
                test_tag=condition_tag([cond]),
                mode=mode,
                seed=plan.seed,
                fraction=fraction,
                checkpoint_ids=ckpt_ids,
            )
        )
    return rows


def run_plan(plan: ExperimentPlan, workdir) -> NmseReport:
    """Execute a full experiment plan; checkpoints land under ``workdir``.

    full_sample / unified: train on the plan's train conditions, evaluate
    on each test condition's held-out split.  zero_shot: evaluate the
    held-out conditions with the identity embedding zeroed.  few_shot:
    additionally fine-tune on each configured fraction of the target
    train split and report every rung (the zero-shot row is included as
    the fraction-0 reference).
    """
    manifest = DatasetManifest.load(plan.dataset)
    workdir = Path(workdir)
    workdir.mkdir(parents=True, exist_ok=True)
    codec_conditions = plan.codec_conditions or plan.train_conditions

    cfg_s = _stage_cfg("codec_sensory", plan.stage1, plan.seed, codec_conditions, DEFAULT_STAGE1_EPOCHS)
    cfg_c = _stage_cfg("codec_channel", plan.stage1, plan.seed, codec_conditions, DEFAULT_STAGE1_EPOCHS)
    cfg_s.model = dict(plan.stage1.get("sensory_model", {}))
    cfg_c.model = dict(plan.stage1.get("channel_model", {}))
    sensory = run_stage1(cfg_s, manifest, plan.eval_fraction)
    channel = run_stage1(cfg_c, manifest, plan.eval_fraction)
    cid_s = save_checkpoint(workdir / "codec_sensory.ckpt", "sensory_codec", sensory.to_state())
    cid_c = save_checkpoint(workdir / "codec_channel.ckpt", "channel_codec", channel.to_state())

    cfg_m = _stage_cfg("mapper", plan.stage2, plan.seed, plan.train_conditions, DEFAULT_STAGE2_EPOCHS)
    mapper = run_stage2(cfg_m, manifest, sensory, channel, plan.eval_fraction)
    cid_m = save_checkpoint(workdir / "mapper.ckpt", "mapper", mapper.to_state())

    checkpoints = {"sensory_codec": cid_s, "channel_codec": cid_c, "mapper": cid_m}
    rows = []
    if plan.mode in ("full_sample", "unified"):
        pipeline = PathlossGenerator(sensory, mapper, channel)
        rows += _eval_rows(plan, manifest, pipeline, plan.mode, 0.0, (cid_s, cid_c, cid_m), False)
    else:
        pipeline = PathlossGenerator(sensory, mapper, channel)
        rows += _eval_rows(plan, manifest, pipeline, "zero_shot", 0.0, (cid_s, cid_c, cid_m), True)
        if plan.mode == "few_shot":
            for fraction in plan.fewshot_fractions:
                cfg_f = _stage_cfg(
                    "finetune", plan.fewshot, plan.seed, plan.test_conditions, DEFAULT_FEWSHOT_EPOCHS
                )
                cfg_f.fewshot_fraction = fraction
                adapted = run_fewshot(mapper, cfg_f, manifest, sensory, channel, plan.eval_fraction)
                cid_f = save_checkpoint(
                    workdir / f"mapper_fewshot_{fraction:g}.ckpt", "mapper", adapted.to_state()
                )
                checkpoints[f"mapper_fewshot_{fraction:g}"] = cid_f
                tuned = PathlossGenerator(sensory, adapted, channel)
                rows += _eval_rows(
                    plan, manifest, tuned, "few_shot", fraction, (cid_s, cid_c, cid_f), False
                )

    eval_samples = []
    for cond in plan.test_conditions:
        _, held = split_samples(manifest.select([cond]), plan.eval_fraction)
        eval_samples += held
    provenance = {
        "dataset_hash": manifest.content_hash(),
        "seed": plan.seed,
        "mode": plan.mode,
        "eval_fraction": plan.eval_fraction,
        "eval_split": split_tag(eval_samples),
        "checkpoints": checkpoints,
    }
    return NmseReport(rows=rows, provenance=provenance)
