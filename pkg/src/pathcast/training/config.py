"""Training/experiment configuration loaded from JSON documents."""

import json
import os
from dataclasses import dataclass, field, fields

from ..errors import ContractViolationError

STAGES = ("codec_sensory", "codec_channel", "mapper", "finetune", "baseline")
PLAN_MODES = ("full_sample", "unified", "zero_shot", "few_shot")
SEED_ENV_VAR = "PATHCAST_SEED"

# Few-shot fraction ladder used by generalization studies.
FEWSHOT_FRACTIONS = (0.011, 0.027, 0.109, 0.273)


def resolve_seed(seed: int) -> int:
    """Honour the PATHCAST_SEED environment override."""
    env = os.environ.get(SEED_ENV_VAR)
    if env is None:
        return int(seed)
    try:
        return int(env)
    except ValueError:
        raise ContractViolationError(
            f"{SEED_ENV_VAR} must be an integer, got {env!r}"
        ) from None


def _as_condition(row) -> tuple[str, float, float]:
    if len(row) != 3:
        raise ContractViolationError(
            f"a condition is (scenario, altitude_m, frequency_hz), got {row!r}"
        )
    return (str(row[0]), float(row[1]), float(row[2]))


@dataclass
class TrainConfig:
    """One training stage: what to train, on which slice, for how long."""

    stage: str
    epochs: int
    batch_size: int = 8
    seed: int = 0
    learning_rate: float | None = None
    filter: list | None = None
    fewshot_fraction: float = 1.0
    model: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.stage not in STAGES:
            raise ContractViolationError(f"stage must be one of {STAGES}, got {self.stage!r}")
        if self.epochs < 0:
            raise ContractViolationError(f"epochs must be >= 0, got {self.epochs}")
        if self.batch_size <= 0:
            raise ContractViolationError(f"batch_size must be positive, got {self.batch_size}")
        if self.learning_rate is not None and not self.learning_rate > 0:
            raise ContractViolationError(f"learning_rate must be > 0, got {self.learning_rate}")
        if not 0.0 < self.fewshot_fraction <= 1.0:
            raise ContractViolationError(
                f"fewshot_fraction must lie in (0, 1], got {self.fewshot_fraction}"
            )
        if self.filter is not None:
            self.filter = [_as_condition(r) for r in self.filter]
        self.seed = resolve_seed(self.seed)

    @classmethod
    def from_file(cls, path) -> "TrainConfig":
        with open(path) as fh:
            raw = json.load(fh)
        known = {f.name for f in fields(cls)}
        unknown = set(raw) - known
        if unknown:
            raise ContractViolationError(f"unknown config keys: {sorted(unknown)}")
        return cls(**raw)

    def estimator_overrides(self) -> dict:
        """Keyword overrides for the estimator this stage trains."""
        out = dict(self.model)
        out["n_epochs"] = self.epochs
        out["batch_size"] = self.batch_size
        out["seed"] = self.seed
        if self.learning_rate is not None:
            out["learning_rate"] = self.learning_rate
        return out


@dataclass
class ExperimentPlan:
    """A full train + evaluate recipe over dataset conditions."""

    mode: str
    dataset: str
    train_conditions: list
    test_conditions: list
    codec_conditions: list | None = None
    fewshot_fractions: list = field(default_factory=lambda: [0.027])
    seed: int = 0
    eval_fraction: float = 0.2
    stage1: dict = field(default_factory=dict)
    stage2: dict = field(default_factory=dict)
    fewshot: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.mode not in PLAN_MODES:
            raise ContractViolationError(f"mode must be one of {PLAN_MODES}, got {self.mode!r}")
        self.train_conditions = [_as_condition(r) for r in self.train_conditions]
        self.test_conditions = [_as_condition(r) for r in self.test_conditions]
        if self.codec_conditions is not None:
            self.codec_conditions = [_as_condition(r) for r in self.codec_conditions]
        if not self.train_conditions or not self.test_conditions:
            raise ContractViolationError("plans need non-empty train and test conditions")
        if not 0.0 < self.eval_fraction < 1.0:
            raise ContractViolationError(
                f"eval_fraction must lie in (0, 1), got {self.eval_fraction}"
            )
        for f in self.fewshot_fractions:
            if not 0.0 < f <= 1.0:
                raise ContractViolationError(f"few-shot fraction {f} outside (0, 1]")
        if self.mode in ("zero_shot", "few_shot"):
            self._check_disjoint()
        self.seed = resolve_seed(self.seed)

    def _check_disjoint(self):
        """Generalization plans must hold the varied axis out of training."""
        overlap = set(self.train_conditions) & set(self.test_conditions)
        if overlap:
            raise ContractViolationError(
                f"{self.mode} plans need disjoint train/test conditions; shared: {sorted(overlap)}"
            )
        seen = self.train_conditions + (self.codec_conditions or [])
        for axis, name in ((0, "scenario"), (1, "altitude"), (2, "frequency")):
            train_vals = {c[axis] for c in seen}
            test_vals = {c[axis] for c in self.test_conditions}
            if not train_vals & test_vals:
                return
        raise ContractViolationError(
            f"{self.mode} plans must hold at least one axis entirely out of training"
        )

    @property
    def held_out_axis(self) -> str | None:
        if self.mode not in ("zero_shot", "few_shot"):
            return None
        seen = self.train_conditions + (self.codec_conditions or [])
        for axis, name in ((2, "frequency"), (1, "altitude"), (0, "scenario")):
            if not ({c[axis] for c in seen} & {c[axis] for c in self.test_conditions}):
                return name
        return None

    @classmethod
    def from_file(cls, path) -> "ExperimentPlan":
        with open(path) as fh:
            raw = json.load(fh)
        if "fewshot_fraction" in raw and "fewshot_fractions" not in raw:
            raw["fewshot_fractions"] = [raw.pop("fewshot_fraction")]
        known = {f.name for f in fields(cls)}
        unknown = set(raw) - known
        if unknown:
            raise ContractViolationError(f"unknown plan keys: {sorted(unknown)}")
        return cls(**raw)
