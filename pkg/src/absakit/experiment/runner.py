"""Experiment orchestration: cells, persistence, resumability.

A cell is one (dataset, subtask, prefix kind, seed) combination. Artifacts
live under ``{output_dir}/{dataset}/{subtask}/{prefix}/{seed}/`` as
prompts.ndjson, generations.ndjson, predictions.ndjson and report.json.
A cell with a non-partial report.json is skipped on rerun, so interrupted
runs resume where they stopped. All files are written deterministically:
with a deterministic backend two runs are byte-identical.
"""

from __future__ import annotations

import json
import logging
from pathlib import Path

from .. import evaluation
from ..backend import GenerationRequest, batch_generate
from ..corpus import records
from ..prefix import (
    PrefixKind,
    PrefixSpec,
    applicable_prefixes,
    build_prefix,
    load_noise_vocabulary,
    select_re_pair,
)
from ..prompting import assemble, load_template
from ..types import (
    ConfigError,
    DATASET_SUBTASKS,
    Subtask,
    TaskInstance,
)
from .config import ExperimentConfig

log = logging.getLogger(__name__)

#: multiplier deriving per-instance noise seeds from the cell seed
_NOISE_SEED_STRIDE = 1_000_003

#: the out-of-domain train/test configurations evaluated by run_ood_matrix;
#: Rest* pools the three restaurant train sets
OOD_PAIRS = (
    ("Lapt14", "Rest14"),
    ("Lapt14", "Rest15"),
    ("Lapt14", "Rest16"),
    ("Rest*", "Lapt14"),
)


class PartialRunError(RuntimeError):
    """Some cells completed with per-instance backend failures."""


def instances_path(data_dir: Path, dataset: str, subtask: Subtask, split: str) -> Path:
    return Path(data_dir) / dataset / subtask.value / f"{split}.ndjson"


def load_instances(config: ExperimentConfig, dataset: str, subtask: Subtask, split: str = "test"):
    path = instances_path(config.data_dir, dataset, subtask, split)
    if not path.exists():
        raise ConfigError(f"no ingested instances at {path}; run `absakit ingest` first")
    return records.read_instances(path)


def _prefix_spec_for(
    instance: TaskInstance, kind: PrefixKind, seed: int, index: int, noise_mode: str
) -> PrefixSpec:
    """Resolve the effective prefix spec for one instance in a cell.

    Instances for which RE is not applicable fall back to no prefix so the
    test split stays complete and scores remain comparable across kinds.
    """
    if kind == PrefixKind.RE:
        if PrefixKind.RE not in applicable_prefixes(instance):
            return PrefixSpec(kind=PrefixKind.NO_PREFIX)
        return PrefixSpec(kind=PrefixKind.RE, entity_pair=select_re_pair(instance))
    if kind == PrefixKind.NOISE:
        noise_seed = seed if noise_mode == "per-run" else seed * _NOISE_SEED_STRIDE + index
        return PrefixSpec(kind=PrefixKind.NOISE, noise_seed=noise_seed)
    return PrefixSpec(kind=kind)


def _write_ndjson(path: Path, rows) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        for row in rows:
            fh.write(json.dumps(row, sort_keys=True, ensure_ascii=False) + "\n")


def run_cell(
    config: ExperimentConfig,
    instances: list[TaskInstance],
    dataset: str,
    subtask: Subtask,
    kind: PrefixKind,
    seed: int,
    cell_dir: Path,
    endpoint_context: dict | None = None,
) -> evaluation.MetricFragment:
    """Assemble, generate, parse and score one cell; persist all artifacts."""
    report_path = cell_dir / "report.json"
    if report_path.exists():
        report = json.loads(report_path.read_text("utf-8"))
        if not report.get("partial"):
            log.info("skipping completed cell %s", cell_dir)
            return _fragment_from_report(report)

    template = load_template(subtask)
    vocab = load_noise_vocabulary()
    bundles = []
    for i, inst in enumerate(instances):
        spec = _prefix_spec_for(inst, kind, seed, i, config.noise_mode)
        prefix_text = build_prefix(spec, inst.text, vocab)
        bundles.append(assemble(prefix_text, template, inst, prefix_spec=spec))

    _write_ndjson(
        cell_dir / "prompts.ndjson",
        (
            {
                "id": b.instance_id,
                "prompt": b.prompt_text,
                "template_id": b.template_id,
                "prefix_kind": b.prefix_spec.kind.value,
                "word_length": b.word_length,
            }
            for b in bundles
        ),
    )

    backend = config.backend
    if endpoint_context and not backend.endpoint.startswith("mock:"):
        backend = type(backend)(
            endpoint=backend.endpoint.format(**endpoint_context),
            timeout=backend.timeout,
            max_in_flight=backend.max_in_flight,
            max_retries=backend.max_retries,
            backoff=backend.backoff,
        )
    reqs = [
        GenerationRequest(
            prompt=b.prompt_text, request_id=b.instance_id, max_new_tokens=config.max_new_tokens
        )
        for b in bundles
    ]
    items = batch_generate(backend, reqs)
    _write_ndjson(
        cell_dir / "generations.ndjson",
        (
            {"id": it.request_id, "text": it.response.text if it.ok else None, "error": it.error}
            for it in items
        ),
    )

    golds = {inst.instance_id: inst.gold for inst in instances}
    gold_kind = instances[0].gold.kind if instances else "TermSet"
    predictions = []
    failures = 0
    for it in items:
        if not it.ok:
            failures += 1
            continue
        predictions.append(evaluation.predict_from_raw(it.request_id, it.response.text, gold_kind))

    scored_golds = {p.instance_id: golds[p.instance_id] for p in predictions}
    per_class = None
    if gold_kind == "PolarityLabel":
        f1, per_class = evaluation.macro_f1(predictions, scored_golds)
        precision = recall = f1
    else:
        precision, recall, f1 = evaluation.term_set_f1(predictions, scored_golds)

    _write_ndjson(
        cell_dir / "predictions.ndjson",
        (
            {
                "id": p.instance_id,
                "raw": p.raw_text,
                "parsed": None if p.parse_status == "unparseable" else p.parsed.render(),
                "status": p.parse_status,
                "gold": golds[p.instance_id].render(),
                "correct": _is_correct(p, golds[p.instance_id]),
            }
            for p in predictions
        ),
    )

    report = {
        "dataset": dataset,
        "subtask": subtask.value,
        "prefix_kind": kind.value,
        "seed": seed,
        "n_instances": len(instances),
        "n_failures": failures,
        "partial": failures > 0,
        "precision": precision,
        "recall": recall,
        "f1": f1,
        "per_class": per_class,
    }
    report_path.parent.mkdir(parents=True, exist_ok=True)
    report_path.write_text(json.dumps(report, sort_keys=True, indent=2) + "\n", "utf-8")
    return _fragment_from_report(report)


def _is_correct(pred: evaluation.Prediction, gold) -> bool:
    if gold.kind == "PolarityLabel":
        return pred.parsed.label == gold.label
    return set(pred.parsed.terms) == set(gold.terms)


def _fragment_from_report(report: dict) -> evaluation.MetricFragment:
    return evaluation.MetricFragment(
        dataset=report["dataset"],
        subtask=report["subtask"],
        prefix_kind=report["prefix_kind"],
        seed=report["seed"],
        precision=report["precision"],
        recall=report["recall"],
        f1=report["f1"],
        per_class=report.get("per_class"),
    )


def _cell_grid(config: ExperimentConfig):
    for dataset in config.datasets:
        for subtask in config.subtasks:
            if subtask not in DATASET_SUBTASKS[dataset]:
                continue
            for kind in config.prefix_kinds:
                if kind == PrefixKind.RE and subtask in (Subtask.ATE, Subtask.SENTIHOOD_ATSC):
                    continue  # RE never applies to these subtasks
                yield dataset, subtask, kind


def run_experiment(config: ExperimentConfig) -> list[evaluation.MetricReport]:
    """Run every configured cell and aggregate per-seed scores."""
    # validate templates and data up front so no generation happens on a bad config
    grid = list(_cell_grid(config))
    if not grid:
        raise ConfigError("no compatible (dataset, subtask) cells in config")
    cache: dict[tuple, list[TaskInstance]] = {}
    for dataset, subtask, _ in grid:
        load_template(subtask)
        if (dataset, subtask) not in cache:
            cache[(dataset, subtask)] = load_instances(config, dataset, subtask)

    reports = []
    partial = False
    for dataset, subtask, kind in grid:
        fragments = []
        for seed in config.seeds:
            cell_dir = (
                Path(config.output_dir) / dataset / subtask.value / kind.value / str(seed)
            )
            frag = run_cell(
                config, cache[(dataset, subtask)], dataset, subtask, kind, seed, cell_dir
            )
            fragments.append(frag)
        reports.append(evaluation.aggregate_seeds(fragments))
        partial = partial or any(
            json.loads(
                (Path(config.output_dir) / dataset / subtask.value / kind.value / str(s) /
                 "report.json").read_text("utf-8")
            ).get("partial")
            for s in config.seeds
        )
    if partial:
        raise PartialRunError("one or more cells completed with per-instance failures")
    return reports


def run_ood_matrix(config: ExperimentConfig) -> list[evaluation.MetricReport]:
    """Train-on-one-domain, test-on-another evaluation grid.

    With train_domain/test_domain set, runs that single configuration;
    otherwise runs the full four-configuration matrix. The train domain
    only affects backend checkpoint addressing; instances always come from
    the test domain's test split.
    """
    if config.train_domain or config.test_domain:
        if not (config.train_domain and config.test_domain):
            raise ConfigError("OOD mode needs both train_domain and test_domain")
        pairs = [(config.train_domain, config.test_domain)]
    else:
        pairs = list(OOD_PAIRS)
    for train, test in pairs:
        if train == test:
            raise ConfigError(f"not an OOD configuration: {train} -> {test}")

    reports = []
    for train, test in pairs:
        train_label = "RestAll" if train == "Rest*" else train
        for subtask in config.subtasks:
            if subtask not in DATASET_SUBTASKS[test]:
                continue
            instances = load_instances(config, test, subtask)
            for kind in config.prefix_kinds:
                if kind == PrefixKind.RE and subtask in (Subtask.ATE, Subtask.SENTIHOOD_ATSC):
                    continue
                fragments = []
                for seed in config.seeds:
                    cell_dir = (
                        Path(config.output_dir) / "ood" / f"{train_label}__{test}"
                        / subtask.value / kind.value / str(seed)
                    )
                    frag = run_cell(
                        config, instances, f"{train}->{test}", subtask, kind, seed, cell_dir,
                        endpoint_context={
                            "train_dataset": train_label,
                            "subtask": subtask.value,
                            "prefix": kind.value,
                            "seed": seed,
                        },
                    )
                    fragments.append(frag)
                reports.append(evaluation.aggregate_seeds(fragments))
    return reports
