"""Train/validation/test split handling."""

from __future__ import annotations

import math
import random

from ..types import ConfigError, DatasetSplit


def holdout_validation(split: DatasetSplit, fraction: float, seed: int) -> DatasetSplit:
    """Carve a validation set out of the train split, deterministically.

    The holdout size is floor(fraction * |train|). The result partitions the
    original train set; the same seed always selects the same members.
    """
    if split.validation:
        raise ConfigError("validation split already present; refusing to overwrite")
    if not 0 < fraction < 1:
        raise ConfigError(f"holdout fraction must be in (0, 1), got {fraction}")
    n = math.floor(fraction * len(split.train))
    if n == 0:
        raise ConfigError(
            f"degenerate holdout: fraction {fraction} of {len(split.train)} train "
            "instances rounds to zero"
        )
    order = list(range(len(split.train)))
    random.Random(seed).shuffle(order)
    held = set(order[:n])
    validation = [split.train[i] for i in sorted(held)]
    train = [inst for i, inst in enumerate(split.train) if i not in held]
    provenance = dict(split.provenance)
    provenance.update({"holdout_fraction": fraction, "holdout_seed": seed})
    return DatasetSplit(train=train, validation=validation, test=split.test, provenance=provenance)
