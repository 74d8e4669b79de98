"""Command-line surface: dataset generation, training, evaluation, reports.

Exit codes: 0 on success, 2 on contract violations (bad inputs, stale or
mismatched artifacts), 3 on numeric aborts (non-finite losses).
"""

import argparse
import json
import os
import sys
from pathlib import Path

import torch

from .errors import ContractViolationError, NumericAbortError
from .synthdata.store import DatasetManifest, ScheduleRow, build_dataset
from .training.config import SEED_ENV_VAR, ExperimentPlan, TrainConfig, resolve_seed


def _load_json(path):
    with open(path) as fh:
        return json.load(fh)


def _train_config(path, stage: str, seed_flag) -> TrainConfig:
    raw = _load_json(path) if path else {}
    raw.setdefault("stage", stage)
    if raw["stage"] != stage:
        raise ContractViolationError(
            f"config stage {raw['stage']!r} does not match the {stage!r} command"
        )
    raw.setdefault("epochs", {"finetune": 60}.get(stage, 200 if stage.startswith("codec") else 300))
    if seed_flag is not None:
        raw["seed"] = seed_flag
    return TrainConfig(**raw)


def _manifest(path) -> DatasetManifest:
    return DatasetManifest.load(path)


# -- verbs -------------------------------------------------------------------


def cmd_gen_data(args) -> int:
    raw = _load_json(args.config)
    if isinstance(raw, list):
        raw = {"schedule": raw}
    rows = [
        ScheduleRow(
            scenario_id=r["scenario_id"],
            altitude_m=float(r["altitude_m"]),
            frequency_hz=float(r["frequency_hz"]),
            n_snapshots=int(r["n_snapshots"]),
        )
        for r in raw["schedule"]
    ]
    seed = resolve_seed(args.seed if args.seed is not None else raw.get("seed", 0))
    manifest = build_dataset(
        rows,
        seed=seed,
        out_path=args.out,
        extent_m=raw.get("extent_m"),
        image_hw=int(raw.get("image_hw", 64)),
        grid_n=int(raw.get("grid_n", 32)),
    )
    print(f"wrote {len(manifest.samples)} samples to {args.out}")
    return 0


def cmd_train_codec(args) -> int:
    from .training.checkpoints import save_checkpoint
    from .training.stages import run_stage1

    stage = f"codec_{args.modality}"
    cfg = _train_config(args.config, stage, args.seed)
    codec = run_stage1(cfg, _manifest(args.data), args.eval_fraction)
    cid = save_checkpoint(args.out, f"{args.modality}_codec", codec.to_state())
    print(f"saved {args.modality} codec {cid} to {args.out}")
    return 0


def cmd_train_mapper(args) -> int:
    from .training.checkpoints import load_model, save_checkpoint
    from .training.stages import run_stage2

    cfg = _train_config(args.config, "mapper", args.seed)
    sensory = load_model(args.codec_s, "sensory_codec")
    channel = load_model(args.codec_c, "channel_codec")
    mapper = run_stage2(cfg, _manifest(args.data), sensory, channel, args.eval_fraction)
    cid = save_checkpoint(args.out, "mapper", mapper.to_state())
    print(f"saved mapper {cid} to {args.out}")
    return 0


def cmd_train_baseline(args) -> int:
    from .training.checkpoints import save_checkpoint
    from .training.stages import run_baseline

    cfg = _train_config(args.config, "baseline", args.seed)
    baseline = run_baseline(cfg, _manifest(args.data), args.eval_fraction)
    cid = save_checkpoint(args.out, "baseline", baseline.to_state())
    print(f"saved baseline {cid} to {args.out}")
    return 0


def cmd_finetune(args) -> int:
    from .training.checkpoints import load_model, save_checkpoint
    from .training.stages import run_fewshot

    cfg = _train_config(args.config, "finetune", args.seed)
    mapper = load_model(args.mapper, "mapper")
    sensory = load_model(args.codec_s, "sensory_codec")
    channel = load_model(args.codec_c, "channel_codec")
    adapted = run_fewshot(mapper, cfg, _manifest(args.data), sensory, channel, args.eval_fraction)
    cid = save_checkpoint(args.out, "mapper", adapted.to_state())
    print(f"saved fine-tuned mapper {cid} to {args.out}")
    return 0


def cmd_eval(args) -> int:
    from .evaluation.report import NmseReport, make_row
    from .mapper import PathlossGenerator
    from .training.checkpoints import load_checkpoint, load_model
    from .training.data import (
        condition_tag,
        frequencies,
        load_maps_db,
        load_rasters,
        split_samples,
        split_tag,
    )

    manifest = _manifest(args.data)
    if args.conditions:
        conditions = [(str(s), float(a), float(f)) for s, a, f in _load_json(args.conditions)]
    else:
        conditions = manifest.conditions
    seed = resolve_seed(args.seed if args.seed is not None else 0)

    if args.baseline:
        model = load_model(args.baseline, "baseline")
        ckpt_ids = (load_checkpoint(args.baseline)["id"],)
        predict = model.predict
        mode, train_tag = "baseline", "baseline"
    else:
        if not (args.codec_s and args.codec_c and args.mapper):
            raise ContractViolationError(
                "eval needs --codec-s, --codec-c and --mapper (or --baseline)"
            )
        sensory = load_model(args.codec_s, "sensory_codec")
        channel = load_model(args.codec_c, "channel_codec")
        mapper = load_model(args.mapper, "mapper")
        pipeline = PathlossGenerator(sensory, mapper, channel)
        ckpt_ids = tuple(
            load_checkpoint(p)["id"] for p in (args.codec_s, args.codec_c, args.mapper)
        )
        predict = lambda X, f: pipeline.predict(X, f, allow_unknown_band=args.allow_unknown_band)
        mode = "zero_shot" if args.allow_unknown_band else "eval"
        train_tag = "pipeline"

    rows, eval_samples = [], []
    for cond in conditions:
        _, held = split_samples(manifest.select([cond]), args.eval_fraction)
        if not held:
            raise ContractViolationError(f"no held-out samples for condition {cond}")
        eval_samples += held
        pred = predict(load_rasters(manifest, held), frequencies(held))
        rows.append(
            make_row(
                pred,
                load_maps_db(manifest, held),
                train_tag=train_tag,
                test_tag=condition_tag([cond]),
                mode=mode,
                seed=seed,
                checkpoint_ids=ckpt_ids,
            )
        )
    report = NmseReport(
        rows=rows,
        provenance={
            "dataset_hash": manifest.content_hash(),
            "seed": seed,
            "mode": mode,
            "eval_fraction": args.eval_fraction,
            "eval_split": split_tag(eval_samples),
            "checkpoints": {f"model_{i}": c for i, c in enumerate(ckpt_ids)},
        },
    )
    report.to_json(args.out)
    print(f"wrote {len(rows)} rows to {args.out}")
    return 0


def cmd_ablate(args) -> int:
    from .evaluation.ablation import run_ablation
    from .evaluation.report import write_json_csv

    raw = _load_json(args.config)
    conditions = raw.get("conditions")
    if not conditions:
        raise ContractViolationError("ablate config needs a 'conditions' list")
    seed = resolve_seed(args.seed if args.seed is not None else raw.get("seed", 0))
    report = run_ablation(
        _manifest(args.data),
        conditions,
        seed=seed,
        stage1=raw.get("stage1"),
        stage2=raw.get("stage2"),
        eval_fraction=args.eval_fraction,
        workdir=args.out,
    )
    json_path, csv_path = write_json_csv(report, args.out)
    print(f"wrote {json_path} and {csv_path}")
    return 0


def cmd_report(args) -> int:
    from .evaluation.report import NmseReport, emit_report

    report = NmseReport.from_json(args.infile)
    emit_report(report, args.fmt, args.out)
    print(f"wrote {args.out}")
    return 0


def cmd_run_plan(args) -> int:
    from .evaluation.report import write_json_csv
    from .training.plans import run_plan

    raw = _load_json(args.plan)
    if args.seed is not None:
        raw["seed"] = args.seed
    plan = ExperimentPlan(**raw)
    report = run_plan(plan, args.out)
    json_path, csv_path = write_json_csv(report, args.out)
    print(f"wrote {json_path} and {csv_path}")
    return 0


# -- parser ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pathcast",
        description="Scene-raster to pathloss-map generation: data, training, evaluation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, data=True):
        p.add_argument("--seed", type=int, default=None, help="override every configured seed")
        p.add_argument("--eval-fraction", type=float, default=0.2)
        if data:
            p.add_argument("--data", required=True, help="dataset directory")

    p = sub.add_parser("gen-data", help="render a synthetic paired dataset")
    p.add_argument("--config", required=True, help="schedule JSON")
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(func=cmd_gen_data)

    p = sub.add_parser("train-codec", help="stage 1: train one codec")
    common(p)
    p.add_argument("--modality", choices=("sensory", "channel"), required=True)
    p.add_argument("--config", default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_train_codec)

    p = sub.add_parser("train-mapper", help="stage 2: train the token mapper")
    common(p)
    p.add_argument("--codec-s", required=True, help="scene codec checkpoint")
    p.add_argument("--codec-c", required=True, help="pathloss codec checkpoint")
    p.add_argument("--config", default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_train_mapper)

    p = sub.add_parser("train-baseline", help="train the direct-regression baseline")
    common(p)
    p.add_argument("--config", default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_train_baseline)

    p = sub.add_parser("finetune", help="few-shot adapt a mapper to a new condition")
    common(p)
    p.add_argument("--mapper", required=True)
    p.add_argument("--codec-s", required=True)
    p.add_argument("--codec-c", required=True)
    p.add_argument("--config", default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_finetune)

    p = sub.add_parser("eval", help="evaluate a pipeline or baseline, emit a report")
    common(p)
    p.add_argument("--codec-s")
    p.add_argument("--codec-c")
    p.add_argument("--mapper")
    p.add_argument("--baseline")
    p.add_argument("--conditions", help="JSON file with (scenario, altitude, frequency) rows")
    p.add_argument("--allow-unknown-band", action="store_true")
    p.add_argument("--out", required=True, help="report JSON path")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("ablate", help="run the config-switch ablation study")
    common(p)
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_ablate)

    p = sub.add_parser("report", help="convert a report between json and csv")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--fmt", choices=("csv", "json"), required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("run-plan", help="execute a full experiment plan")
    p.add_argument("--plan", required=True)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", required=True, help="work directory")
    p.set_defaults(func=cmd_run_plan)

    return parser


def main(argv=None) -> int:
    torch.set_num_threads(1)
    args = build_parser().parse_args(argv)
    if getattr(args, "seed", None) is not None:
        os.environ[SEED_ENV_VAR] = str(args.seed)
    try:
        return args.func(args)
    except ContractViolationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NumericAbortError as exc:
        print(f"numeric abort: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
