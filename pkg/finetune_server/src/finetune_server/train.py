"""Seq2seq fine-tuning loop with per-epoch validation and checkpoint naming.

Checkpoint directories embed dataset, subtask, prefix kind and seed so a
downstream evaluation matrix can address the model trained for each cell.
"""

from __future__ import annotations

import json
import logging
import math
import random
from pathlib import Path

import torch
from torch.utils.data import DataLoader
from transformers import (
    AutoModelForSeq2SeqLM,
    AutoTokenizer,
    get_linear_schedule_with_warmup,
)

from .config import TrainConfig
from .data import PairDataset, load_pairs

log = logging.getLogger(__name__)


def checkpoint_name(config: TrainConfig, dataset: str, subtask: str, prefix: str) -> str:
    return f"{dataset}_{subtask}_{prefix}_seed{config.seed}_{config.config_hash()}"


def _epoch_loss(model, loader, device) -> float:
    model.eval()
    total, batches = 0.0, 0
    with torch.no_grad():
        for batch in loader:
            batch = {k: v.to(device) for k, v in batch.items()}
            total += model(**batch).loss.item()
            batches += 1
    return total / max(batches, 1)


def train(
    config: TrainConfig,
    train_file: str | Path,
    val_file: str | Path,
    output_dir: str | Path,
    dataset: str = "data",
    subtask: str = "task",
    prefix: str = "NoPrefix",
    device: str | None = None,
) -> Path:
    """Fine-tune and save the checkpoint selected on validation loss.

    Returns the checkpoint directory. metrics.json inside it records the
    per-epoch validation loss curve, the selected epoch, and how many input
    sequences exceeded max_seq_len and were truncated.
    """
    train_pairs = load_pairs(train_file)
    val_pairs = load_pairs(val_file)

    device = device or ("cuda" if torch.cuda.is_available() else "cpu")
    random.seed(config.seed)
    torch.manual_seed(config.seed)

    tokenizer = AutoTokenizer.from_pretrained(config.base_model_id)
    model = AutoModelForSeq2SeqLM.from_pretrained(config.base_model_id).to(device)

    train_set = PairDataset(train_pairs, tokenizer, config.max_seq_len)
    val_set = PairDataset(val_pairs, tokenizer, config.max_seq_len)
    truncated = train_set.truncated + val_set.truncated
    if truncated:
        log.warning("%d sequences exceeded max_seq_len=%d and were truncated",
                    truncated, config.max_seq_len)

    generator = torch.Generator().manual_seed(config.seed)
    train_loader = DataLoader(
        train_set, batch_size=config.batch_size, shuffle=True,
        generator=generator, collate_fn=train_set.collate,
    )
    val_loader = DataLoader(
        val_set, batch_size=config.batch_size, shuffle=False,
        collate_fn=val_set.collate,
    )

    steps_per_epoch = math.ceil(len(train_set) / config.batch_size)
    total_steps = steps_per_epoch * config.epochs
    optimizer = torch.optim.AdamW(
        model.parameters(), lr=config.learning_rate, weight_decay=config.weight_decay
    )
    scheduler = get_linear_schedule_with_warmup(
        optimizer, round(config.warmup_ratio * total_steps), total_steps
    )

    val_losses: list[float] = []
    best_loss, best_state = math.inf, None
    for epoch in range(config.epochs):
        model.train()
        for batch in train_loader:
            batch = {k: v.to(device) for k, v in batch.items()}
            loss = model(**batch).loss
            loss.backward()
            optimizer.step()
            scheduler.step()
            optimizer.zero_grad()
        val_loss = _epoch_loss(model, val_loader, device)
        val_losses.append(val_loss)
        log.info("epoch %d: validation loss %.4f", epoch, val_loss)
        if val_loss < best_loss:
            best_loss = val_loss
            best_state = {k: v.detach().cpu().clone() for k, v in model.state_dict().items()}

    model.load_state_dict(best_state)
    checkpoint = Path(output_dir) / checkpoint_name(config, dataset, subtask, prefix)
    checkpoint.mkdir(parents=True, exist_ok=True)
    model.save_pretrained(checkpoint)
    tokenizer.save_pretrained(checkpoint)
    metrics = {
        "config": {**config.__dict__},
        "dataset": dataset,
        "subtask": subtask,
        "prefix": prefix,
        "val_loss": val_losses,
        "best_epoch": val_losses.index(min(val_losses)),
        "truncation_warnings": truncated,
        "n_train": len(train_pairs),
        "n_val": len(val_pairs),
    }
    (checkpoint / "metrics.json").write_text(
        json.dumps(metrics, indent=2, sort_keys=True), "utf-8"
    )
    return checkpoint
