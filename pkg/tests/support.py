"""Shared helpers for the toolkit test suite."""

from pathlib import Path

GOLDEN_DIR = Path(__file__).parent / "goldens"


def read_golden(name: str) -> str:
    """Golden prompt text with newline normalization (trailing \\n stripped)."""
    text = (GOLDEN_DIR / name).read_text("utf-8")
    return text.replace("\r\n", "\n").rstrip("\n")
