"""Command-line entry points.

Exit codes: 0 success, 2 configuration error, 3 run completed partially
(per-instance backend failures).
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .. import evaluation
from ..corpus import (
    derive_instances,
    filter_conflict,
    filter_top_aspect_categories,
    holdout_validation,
    parse_ersa,
    parse_semeval_xml,
    parse_sentihood,
    records,
)
from ..prefix import PrefixKind, build_prefix, load_noise_vocabulary
from ..prompting import assemble, load_template
from ..types import ConfigError, DATASET_SUBTASKS, DatasetSplit, SEMEVAL_DATASETS, Subtask
from .analysis import diff_error_analysis
from .config import load_config
from .runner import PartialRunError, _prefix_spec_for, run_experiment, run_ood_matrix
from .tables import emit_tables

log = logging.getLogger("absakit")

EXIT_CONFIG_ERROR = 2
EXIT_PARTIAL_RUN = 3


def _parse_source(dataset: str, path: Path):
    data = Path(path).read_bytes()
    if dataset in SEMEVAL_DATASETS:
        return parse_semeval_xml(data, dataset)
    if dataset == "ERSA":
        return parse_ersa(data)
    if dataset == "SentiHood":
        return parse_sentihood(data)
    raise ConfigError(f"unknown dataset {dataset!r}")


def cmd_ingest(args) -> int:
    dataset = args.dataset
    data_dir = Path(args.data_dir)
    splits = {}
    for split in ("train", "validation", "test"):
        path = getattr(args, split)
        if path:
            splits[split] = _parse_source(dataset, path)
    if not splits:
        raise ConfigError("no input files given")

    if dataset == "SentiHood":
        reference = splits.get("train")
        for split in splits:
            splits[split] = filter_top_aspect_categories(
                splits[split], args.top_k, reference=reference
            )
            splits[split] = [s for s in splits[split] if s.aspects]

    for split, sentences in splits.items():
        records.write_sentences(data_dir / dataset / "raw" / f"{split}.ndjson", sentences)

    for subtask in DATASET_SUBTASKS[dataset]:
        per_split = {}
        for split, sentences in splits.items():
            if subtask == Subtask.ATSC:
                sentences = filter_conflict(sentences)
            instances = derive_instances(sentences, subtask)
            per_split[split] = instances
        if subtask == Subtask.AOOE and not any(per_split.values()):
            log.info("%s: no opinion annotations, skipping AOOE", dataset)
            continue
        if args.holdout and "validation" not in per_split and "train" in per_split:
            split = holdout_validation(
                DatasetSplit(train=per_split["train"], validation=[],
                             test=per_split.get("test", [])),
                args.holdout, args.holdout_seed,
            )
            per_split["train"], per_split["validation"] = split.train, split.validation
        for split, instances in per_split.items():
            out = data_dir / dataset / subtask.value / f"{split}.ndjson"
            records.write_instances(out, instances)
            print(f"{dataset} {subtask.value} {split}: {len(instances)} instances -> {out}")
    return 0


def cmd_build_prompts(args) -> int:
    config = load_config(args.config)
    subtask = Subtask(args.subtask)
    kind = PrefixKind(args.prefix)
    path = Path(config.data_dir) / args.dataset / subtask.value / f"{args.split}.ndjson"
    if not path.exists():
        raise ConfigError(f"no ingested instances at {path}")
    instances = records.read_instances(path)
    template = load_template(subtask)
    vocab = load_noise_vocabulary()
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    with open(out, "w", encoding="utf-8") as fh:
        for i, inst in enumerate(instances):
            spec = _prefix_spec_for(inst, kind, args.seed, i, config.noise_mode)
            bundle = assemble(build_prefix(spec, inst.text, vocab), template, inst, spec)
            fh.write(json.dumps(
                {"id": inst.instance_id, "prompt": bundle.prompt_text,
                 "target": inst.gold.render()},
                sort_keys=True, ensure_ascii=False) + "\n")
    print(f"wrote {len(instances)} (prompt, target) pairs -> {out}")
    return 0


def _print_reports(reports) -> None:
    for name, table in emit_tables(reports).items():
        print(table)


def cmd_run(args) -> int:
    config = load_config(args.config)
    try:
        reports = run_experiment(config)
    except PartialRunError as exc:
        log.error("%s", exc)
        return EXIT_PARTIAL_RUN
    _print_reports(reports)
    return 0


def cmd_run_ood(args) -> int:
    config = load_config(args.config)
    try:
        reports = run_ood_matrix(config)
    except PartialRunError as exc:
        log.error("%s", exc)
        return EXIT_PARTIAL_RUN
    _print_reports(reports)
    return 0


def cmd_diff_errors(args) -> int:
    report = diff_error_analysis(Path(args.baseline), Path(args.treatment))
    text = report.render_rows()
    if args.out:
        Path(args.out).write_text(text, "utf-8")
    print(text)
    return 0


def cmd_report(args) -> int:
    config = load_config(args.config)
    root = Path(config.output_dir)
    if args.layout == "ood_matrix":
        root = root / "ood"
    fragments: dict[tuple, list] = {}
    for path in sorted(root.glob("*/*/*/*/report.json")):
        rec = json.loads(path.read_text("utf-8"))
        key = (rec["dataset"], rec["subtask"], rec["prefix_kind"])
        fragments.setdefault(key, []).append(rec)
    if not fragments:
        raise ConfigError(f"no cell reports under {root}")
    reports = []
    for key, recs in sorted(fragments.items()):
        frags = [
            evaluation.MetricFragment(
                dataset=r["dataset"], subtask=r["subtask"], prefix_kind=r["prefix_kind"],
                seed=r["seed"], precision=r["precision"], recall=r["recall"], f1=r["f1"],
            )
            for r in recs
        ]
        reports.append(evaluation.aggregate_seeds(frags))
    tables_dir = Path(config.output_dir) / "tables"
    tables_dir.mkdir(parents=True, exist_ok=True)
    for name, table in emit_tables(reports, layout=args.layout).items():
        out = tables_dir / f"{name}.txt"
        out.write_text(table, "utf-8")
        print(table)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="absakit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="parse source datasets into canonical records")
    p.add_argument("--dataset", required=True, choices=sorted(DATASET_SUBTASKS))
    p.add_argument("--train")
    p.add_argument("--validation")
    p.add_argument("--test")
    p.add_argument("--data-dir", required=True)
    p.add_argument("--holdout", type=float, default=None,
                   help="derive a validation split from this fraction of train")
    p.add_argument("--holdout-seed", type=int, default=0)
    p.add_argument("--top-k", type=int, default=4,
                   help="keep the k most frequent aspect categories (SentiHood)")
    p.set_defaults(fn=cmd_ingest)

    p = sub.add_parser("build-prompts", help="export (prompt, target) pairs for one split")
    p.add_argument("--config", required=True)
    p.add_argument("--dataset", required=True)
    p.add_argument("--subtask", required=True)
    p.add_argument("--split", default="train")
    p.add_argument("--prefix", default="NoPrefix")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_build_prompts)

    p = sub.add_parser("run", help="run the in-domain experiment grid")
    p.add_argument("--config", required=True)
    p.set_defaults(fn=cmd_run)

    p = sub.add_parser("run-ood", help="run the out-of-domain matrix")
    p.add_argument("--config", required=True)
    p.set_defaults(fn=cmd_run_ood)

    p = sub.add_parser("diff-errors", help="error-analysis diff between two cells")
    p.add_argument("--baseline", required=True)
    p.add_argument("--treatment", required=True)
    p.add_argument("--out")
    p.set_defaults(fn=cmd_diff_errors)

    p = sub.add_parser("report", help="aggregate cell reports into result tables")
    p.add_argument("--config", required=True)
    p.add_argument("--layout", default="per_subtask", choices=["per_subtask", "ood_matrix"])
    p.set_defaults(fn=cmd_report)
    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except ConfigError as exc:
        log.error("configuration error: %s", exc)
        return EXIT_CONFIG_ERROR


if __name__ == "__main__":
    sys.exit(main())
