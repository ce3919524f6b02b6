"""Experiment configuration, loaded from a JSON file.

Documented keys::

    {
      "data_dir": "data",            # canonical records from `absakit ingest`
      "output_dir": "runs",
      "datasets": ["Rest14", ...],
      "subtasks": ["ATE", "ATSC", ...],
      "prefix_kinds": ["NoPrefix", "NER", "RE", "Noise"],
      "seeds": [0, 1, 2, 3, 4],
      "backend": {"endpoint": "mock:gold-replay", "timeout": 30,
                  "max_in_flight": 8, "max_retries": 2, "backoff": 0.5},
      "max_new_tokens": 64,
      "noise_mode": "per-run",       # or "per-instance"
      "train_domain": null,          # OOD runs only
      "test_domain": null,
      "ood_pooling": "concat"        # how Rest* training data is pooled
    }

The ``ABSAKIT_ENDPOINT`` environment variable overrides backend.endpoint.
HTTP endpoints may carry ``{train_dataset}``, ``{subtask}``, ``{prefix}`` and
``{seed}`` placeholders so out-of-domain runs can address per-cell checkpoints.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path

from ..backend import BackendDescriptor
from ..prefix import PrefixKind
from ..types import ConfigError, DATASET_SUBTASKS, Subtask

DEFAULT_SEEDS = (0, 1, 2, 3, 4)


@dataclass
class ExperimentConfig:
    data_dir: Path
    output_dir: Path
    datasets: list[str]
    subtasks: list[Subtask]
    prefix_kinds: list[PrefixKind]
    seeds: list[int] = field(default_factory=lambda: list(DEFAULT_SEEDS))
    backend: BackendDescriptor = field(
        default_factory=lambda: BackendDescriptor(endpoint="mock:constant")
    )
    max_new_tokens: int = 64
    noise_mode: str = "per-run"
    train_domain: str | None = None
    test_domain: str | None = None
    ood_pooling: str = "concat"

    def __post_init__(self):
        if not self.seeds:
            raise ConfigError("seeds must be non-empty")
        if len(set(self.seeds)) != len(self.seeds):
            raise ConfigError("seeds must be distinct")
        if self.noise_mode not in ("per-run", "per-instance"):
            raise ConfigError(f"unknown noise_mode {self.noise_mode!r}")
        for d in self.datasets:
            if d not in DATASET_SUBTASKS:
                raise ConfigError(f"unknown dataset {d!r}")
        if self.train_domain is not None and self.train_domain == self.test_domain:
            raise ConfigError("OOD mode requires train_domain != test_domain")


def load_config(path: Path) -> ExperimentConfig:
    try:
        raw = json.loads(Path(path).read_text("utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        backend_raw = dict(raw.get("backend", {"endpoint": "mock:constant"}))
        endpoint = os.environ.get("ABSAKIT_ENDPOINT") or backend_raw.get("endpoint")
        if not endpoint:
            raise ConfigError("backend.endpoint missing")
        backend = BackendDescriptor(
            endpoint=endpoint,
            timeout=backend_raw.get("timeout", 30.0),
            max_in_flight=backend_raw.get("max_in_flight", 8),
            max_retries=backend_raw.get("max_retries", 2),
            backoff=backend_raw.get("backoff", 0.5),
        )
        return ExperimentConfig(
            data_dir=Path(raw["data_dir"]),
            output_dir=Path(raw["output_dir"]),
            datasets=list(raw["datasets"]),
            subtasks=[Subtask(s) for s in raw["subtasks"]],
            prefix_kinds=[PrefixKind(p) for p in raw.get(
                "prefix_kinds", [k.value for k in PrefixKind])],
            seeds=list(raw.get("seeds", DEFAULT_SEEDS)),
            backend=backend,
            max_new_tokens=raw.get("max_new_tokens", 64),
            noise_mode=raw.get("noise_mode", "per-run"),
            train_domain=raw.get("train_domain"),
            test_domain=raw.get("test_domain"),
            ood_pooling=raw.get("ood_pooling", "concat"),
        )
    except (KeyError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"invalid config {path}: {exc}") from exc
