"""Training configuration with per-subtask hyperparameter defaults."""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass, field, replace

DEFAULT_BASE_MODEL = "allenai/tk-instruct-base-def-pos"

# subtasks that train with the smaller batch
_SMALL_BATCH_SUBTASKS = {"AOOE", "SentiHoodATSC"}
# subtasks that train with the lower learning rate
_LOW_LR_SUBTASKS = {"ERSA"}


@dataclass(frozen=True)
class TrainConfig:
    base_model_id: str = DEFAULT_BASE_MODEL
    epochs: int = 4
    batch_size: int = 16
    learning_rate: float = 1e-4
    warmup_ratio: float = 0.1
    weight_decay: float = 0.01
    seed: int = 0
    max_seq_len: int = 512
    # "loss" selects the epoch with the lowest validation loss; "f1" expects
    # the caller to score validation generations and is reported as-is
    selection_metric: str = "loss"

    def __post_init__(self):
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")
        if not 0.0 <= self.warmup_ratio <= 1.0:
            raise ValueError("warmup_ratio must be in [0, 1]")
        if self.weight_decay < 0:
            raise ValueError("weight_decay must be non-negative")
        if self.max_seq_len < 1:
            raise ValueError("max_seq_len must be >= 1")
        if self.selection_metric not in ("loss", "f1"):
            raise ValueError("selection_metric must be 'loss' or 'f1'")

    @classmethod
    def for_subtask(cls, subtask: str, **overrides) -> "TrainConfig":
        """Defaults per subtask: batch 8 for AOOE/SentiHoodATSC, lr 5e-5 for ERSA."""
        kwargs = {}
        if subtask in _SMALL_BATCH_SUBTASKS:
            kwargs["batch_size"] = 8
        if subtask in _LOW_LR_SUBTASKS:
            kwargs["learning_rate"] = 5e-5
        kwargs.update(overrides)
        return cls(**kwargs)

    def config_hash(self) -> str:
        """Stable short digest over every field except the seed (named separately)."""
        fields = asdict(self)
        fields.pop("seed")
        blob = json.dumps(fields, sort_keys=True).encode()
        return hashlib.sha1(blob).hexdigest()[:10]


def load_train_config(path) -> TrainConfig:
    """Read a TrainConfig from a JSON file of field overrides."""
    with open(path, "r", encoding="utf-8") as fh:
        raw = json.load(fh)
    if not isinstance(raw, dict):
        raise ValueError("training config must be a JSON object")
    subtask = raw.pop("subtask", None)
    if subtask is not None:
        return TrainConfig.for_subtask(subtask, **raw)
    return TrainConfig(**raw)
