"""Training orchestration: configs, stages, plans, checkpoints."""

from .checkpoints import (
    CHECKPOINT_FORMAT,
    CHECKPOINT_VERSION,
    KINDS,
    load_checkpoint,
    load_model,
    save_checkpoint,
    state_id,
)
from .config import (
    FEWSHOT_FRACTIONS,
    PLAN_MODES,
    SEED_ENV_VAR,
    STAGES,
    ExperimentPlan,
    TrainConfig,
    resolve_seed,
)
from .data import (
    condition_tag,
    fewshot_subset,
    frequencies,
    load_maps_db,
    load_maps_px,
    load_rasters,
    snapshot_key,
    split_samples,
    split_tag,
    unique_rasters,
)
from .plans import run_plan
from .stages import run_baseline, run_fewshot, run_stage1, run_stage2

__all__ = [
    "CHECKPOINT_FORMAT",
    "CHECKPOINT_VERSION",
    "FEWSHOT_FRACTIONS",
    "KINDS",
    "PLAN_MODES",
    "SEED_ENV_VAR",
    "STAGES",
    "ExperimentPlan",
    "TrainConfig",
    "condition_tag",
    "fewshot_subset",
    "frequencies",
    "load_checkpoint",
    "load_maps_db",
    "load_maps_px",
    "load_model",
    "load_rasters",
    "resolve_seed",
    "run_baseline",
    "run_fewshot",
    "run_plan",
    "run_stage1",
    "run_stage2",
    "save_checkpoint",
    "snapshot_key",
    "split_samples",
    "split_tag",
    "state_id",
    "unique_rasters",
]
