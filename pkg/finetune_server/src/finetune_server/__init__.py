"""Fine-tuning and HTTP serving for the prompt-based evaluation toolkit."""

from .config import TrainConfig, load_train_config
from .data import PromptPair, load_pairs

__all__ = ["TrainConfig", "load_train_config", "PromptPair", "load_pairs"]
