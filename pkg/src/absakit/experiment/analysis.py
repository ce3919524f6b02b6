"""Error-analysis diffs between a baseline run and a treatment run."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path


@dataclass
class DiffRow:
    instance_id: str
    sample: str
    gold: str
    baseline_output: str
    treatment_output: str


@dataclass
class ErrorAnalysisReport:
    baseline_run: str
    treatment_run: str
    fixed_by_treatment: list[DiffRow] = field(default_factory=list)
    broken_by_treatment: list[DiffRow] = field(default_factory=list)
    still_wrong: list[DiffRow] = field(default_factory=list)
    fixed_fraction: float = 0.0

    def render_rows(self) -> str:
        """Side-by-side case-study table: sample, gold, baseline, treatment."""
        lines = [
            f"baseline: {self.baseline_run}",
            f"treatment: {self.treatment_run}",
            f"baseline errors: {len(self.fixed_by_treatment) + len(self.still_wrong)}"
            f", fixed by treatment: {len(self.fixed_by_treatment)}"
            f" ({self.fixed_fraction:.0%})",
            "",
            f"{'sample':<60} | {'gold':<25} | {'baseline':<25} | treatment",
            "-" * 140,
        ]
        for row in self.fixed_by_treatment:
            sample = row.sample if len(row.sample) <= 58 else row.sample[:55] + "..."
            lines.append(
                f"{sample:<60} | {row.gold:<25} | {row.baseline_output:<25} | {row.treatment_output}"
            )
        return "\n".join(lines) + "\n"


def _load_predictions(cell_dir: Path) -> dict[str, dict]:
    path = Path(cell_dir) / "predictions.ndjson"
    if not path.exists():
        raise FileNotFoundError(f"no predictions at {path}")
    out = {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                rec = json.loads(line)
                out[rec["id"]] = rec
    return out


def _load_prompts(cell_dir: Path) -> dict[str, str]:
    path = Path(cell_dir) / "prompts.ndjson"
    samples = {}
    if path.exists():
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                if line.strip():
                    rec = json.loads(line)
                    # last input line of the prompt is the sample
                    for ln in reversed(rec["prompt"].splitlines()):
                        if ln.startswith("input: "):
                            samples[rec["id"]] = ln[len("input: "):]
                            break
    return samples


def diff_error_analysis(baseline_dir: Path, treatment_dir: Path) -> ErrorAnalysisReport:
    """Partition baseline errors into fixed / still-wrong under the treatment.

    Both cells must cover the same instance ids (same dataset/subtask/split).
    """
    baseline = _load_predictions(baseline_dir)
    treatment = _load_predictions(treatment_dir)
    if set(baseline) != set(treatment):
        raise ValueError(
            "runs cover different instance sets: "
            f"{len(baseline)} baseline vs {len(treatment)} treatment ids"
        )
    samples = _load_prompts(baseline_dir)

    report = ErrorAnalysisReport(baseline_run=str(baseline_dir), treatment_run=str(treatment_dir))
    baseline_errors = 0
    for iid, base in sorted(baseline.items()):
        treat = treatment[iid]
        row = DiffRow(
            instance_id=iid,
            sample=samples.get(iid, ""),
            gold=base["gold"],
            baseline_output=base["parsed"],
            treatment_output=treat["parsed"],
        )
        if not base["correct"]:
            baseline_errors += 1
            if treat["correct"]:
                report.fixed_by_treatment.append(row)
            else:
                report.still_wrong.append(row)
        elif not treat["correct"]:
            report.broken_by_treatment.append(row)
    report.fixed_fraction = (
        len(report.fixed_by_treatment) / baseline_errors if baseline_errors else 0.0
    )
    return report
