"""Prompt assembly: prefix + task definition + in-context examples + input.

Templates are data, not code; see data/templates/. The canonical layout is
newline-normalized (`\\n`), one blank line between example blocks, and every
prompt ends with `output: ` awaiting the generated continuation.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .prefix import PrefixSpec
from .types import ConfigError, Subtask, TaskInstance

COMPLETION_MARKER = "Now complete the following example-"
DEFAULT_CONNECTOR = "Afterwards solve the following task"

_TEMPLATE_FILES = {
    Subtask.ATE: "ate.json",
    Subtask.ATSC: "atsc.json",
    Subtask.AOOE: "aooe.json",
    Subtask.ERSA: "ersa.json",
    Subtask.SENTIHOOD_ATSC: "sentihood.json",
}


@dataclass(frozen=True)
class TaskTemplate:
    template_id: str
    subtask: Subtask
    definition: str
    examples: tuple[tuple[str, str, str], ...]  # (heading, input, output)
    connector: str = DEFAULT_CONNECTOR

    def __post_init__(self):
        counts = {"Positive": 0, "Negative": 0, "Neutral": 0}
        for heading, _, _ in self.examples:
            kind = heading.split()[0]
            if kind not in counts or not heading.endswith("-"):
                raise ConfigError(f"template {self.template_id}: bad heading {heading!r}")
            counts[kind] += 1
        expected = (3, 3, 0) if self.subtask == Subtask.SENTIHOOD_ATSC else (2, 2, 2)
        actual = (counts["Positive"], counts["Negative"], counts["Neutral"])
        if actual != expected:
            raise ConfigError(
                f"template {self.template_id}: example mix {actual} != expected {expected}"
            )


@dataclass(frozen=True)
class PromptBundle:
    instance_id: str
    prefix_spec: PrefixSpec
    prompt_text: str
    word_length: int
    template_id: str


def _template_from_dict(data: dict) -> TaskTemplate:
    return TaskTemplate(
        template_id=data["template_id"],
        subtask=Subtask(data["subtask"]),
        definition=data["definition"],
        connector=data.get("connector", DEFAULT_CONNECTOR),
        examples=tuple((e["heading"], e["input"], e["output"]) for e in data["examples"]),
    )


def load_template(subtask: Subtask, path: Path | None = None) -> TaskTemplate:
    """Load the built-in template for a subtask, or a template file."""
    if path is not None:
        data = json.loads(Path(path).read_text("utf-8"))
    else:
        name = _TEMPLATE_FILES[subtask]
        data = json.loads(
            resources.files("absakit.data.templates").joinpath(name).read_text("utf-8")
        )
    template = _template_from_dict(data)
    if template.subtask != subtask:
        raise ConfigError(f"template {template.template_id} is for {template.subtask.value}")
    return template


def format_instance_input(instance: TaskInstance) -> str:
    """Render the sample-input line for an instance."""
    if instance.subtask == Subtask.ATE:
        return instance.text
    if not instance.target_aspects:
        raise ConfigError(f"instance {instance.instance_id}: missing target aspect")
    if instance.subtask in (Subtask.ATSC, Subtask.AOOE):
        return f"{instance.text} The aspect is {instance.target_aspects[0]}."
    if instance.subtask == Subtask.ERSA:
        a1, a2 = instance.target_aspects
        return f"{instance.text} The aspects are {a1} and {a2}."
    entity, category = instance.target_aspects
    return f"{instance.text} The entity is {entity}, the aspect is {category}."


def assemble(
    prefix_text: str | None,
    template: TaskTemplate,
    instance: TaskInstance,
    prefix_spec: PrefixSpec | None = None,
) -> PromptBundle:
    """Concatenate the four prompt components in canonical layout.

    When no prefix is given, both the prefix block and the connector line
    are omitted, so the no-prefix prompt is a suffix of the prefixed one.
    """
    if template.subtask != instance.subtask:
        raise ConfigError(
            f"template {template.template_id} ({template.subtask.value}) does not match "
            f"instance subtask {instance.subtask.value}"
        )
    lines: list[str] = []
    if prefix_text is not None:
        lines.append(prefix_text)
        lines.append(template.connector)
    lines.append(f"Definition: {template.definition}")
    for heading, example_input, example_output in template.examples:
        lines.append(heading)
        lines.append(f"input: {example_input}")
        lines.append(f"output: {example_output}")
        lines.append("")
    lines.append(COMPLETION_MARKER)
    lines.append(f"input: {format_instance_input(instance)}")
    lines.append("output: ")
    text = "\n".join(lines)
    return PromptBundle(
        instance_id=instance.instance_id,
        prefix_spec=prefix_spec,
        prompt_text=text,
        word_length=len(text.split()),
        template_id=template.template_id,
    )


@dataclass(frozen=True)
class BudgetReport:
    instance_id: str
    word_count: int
    max_tokens: int
    token_count: int | None
    over_budget: bool


def check_budget(bundle: PromptBundle, max_tokens: int, tokenizer_hint=None) -> BudgetReport:
    """Report prompt length against a token budget without mutating anything.

    `tokenizer_hint` is an optional callable str -> token count supplied by a
    backend; without it the whitespace word count serves as a proxy.
    """
    if max_tokens <= 0:
        raise ValueError("max_tokens must be positive")
    token_count = tokenizer_hint(bundle.prompt_text) if tokenizer_hint else None
    measured = token_count if token_count is not None else bundle.word_length
    return BudgetReport(
        instance_id=bundle.instance_id,
        word_count=bundle.word_length,
        max_tokens=max_tokens,
        token_count=token_count,
        over_budget=measured > max_tokens,
    )
