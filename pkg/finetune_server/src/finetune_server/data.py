"""Loading and encoding of exported (prompt, target) training pairs.

The upstream toolkit exports newline-delimited JSON rows of the form
{"id": ..., "prompt": ..., "target": ...}; this module never rebuilds
prompts itself, so template logic has a single source of truth.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import torch
from torch.utils.data import Dataset


@dataclass(frozen=True)
class PromptPair:
    pair_id: str
    prompt: str
    target: str


def load_pairs(path: str | Path) -> list[PromptPair]:
    """Parse an exported pair file; an empty file is an error, not a no-op."""
    pairs = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            row = json.loads(line)
            for key in ("id", "prompt", "target"):
                if key not in row:
                    raise ValueError(f"{path} line {lineno}: missing field {key!r}")
            pairs.append(PromptPair(str(row["id"]), row["prompt"], row["target"]))
    if not pairs:
        raise ValueError(f"{path}: no training pairs found")
    return pairs


class PairDataset(Dataset):
    """Tokenized pairs; sequences over max_seq_len are truncated and counted."""

    def __init__(self, pairs: list[PromptPair], tokenizer, max_seq_len: int):
        self.tokenizer = tokenizer
        self.max_seq_len = max_seq_len
        self.truncated = 0
        self.encoded = [self._encode(p) for p in pairs]

    def _encode(self, pair: PromptPair) -> dict:
        full = self.tokenizer(pair.prompt, truncation=False)["input_ids"]
        if len(full) > self.max_seq_len:
            self.truncated += 1
        enc = self.tokenizer(
            pair.prompt, truncation=True, max_length=self.max_seq_len
        )
        labels = self.tokenizer(
            pair.target, truncation=True, max_length=self.max_seq_len
        )["input_ids"]
        return {
            "input_ids": enc["input_ids"],
            "attention_mask": enc["attention_mask"],
            "labels": labels,
        }

    def __len__(self) -> int:
        return len(self.encoded)

    def __getitem__(self, idx: int) -> dict:
        return self.encoded[idx]

    def collate(self, batch: list[dict]) -> dict:
        pad = self.tokenizer.pad_token_id
        max_in = max(len(b["input_ids"]) for b in batch)
        max_out = max(len(b["labels"]) for b in batch)
        input_ids, masks, labels = [], [], []
        for b in batch:
            fill = max_in - len(b["input_ids"])
            input_ids.append(b["input_ids"] + [pad] * fill)
            masks.append(b["attention_mask"] + [0] * fill)
            # -100 tells the loss to skip padded label positions
            labels.append(b["labels"] + [-100] * (max_out - len(b["labels"])))
        return {
            "input_ids": torch.tensor(input_ids, dtype=torch.long),
            "attention_mask": torch.tensor(masks, dtype=torch.long),
            "labels": torch.tensor(labels, dtype=torch.long),
        }
