"""Aligned-column result tables: rows are prefix variants, columns datasets."""

from __future__ import annotations

import statistics

from ..evaluation import MetricReport


def emit_table(reports: list[MetricReport], subtask: str) -> str:
    """Render one subtask's reports as `mean±std` cells plus an Avg column.

    The (prefix variant × dataset) grid must be rectangular; missing cells
    are an error naming each one.
    """
    rows = sorted({r.prefix_kind for r in reports})
    cols = sorted({r.dataset for r in reports})
    cells = {(r.prefix_kind, r.dataset): r for r in reports}
    missing = [(v, d) for v in rows for d in cols if (v, d) not in cells]
    if missing:
        raise ValueError(f"ragged grid for {subtask}; missing cells: {missing}")

    header = ["Model"] + cols + ["Avg"]
    table_rows = [header]
    for variant in rows:
        line = [variant]
        means = []
        for dataset in cols:
            report = cells[(variant, dataset)]
            line.append(report.formatted())
            means.append(report.mean_f1)
        avg = statistics.fmean(means)
        line.append(f"{avg * 100:.2f}")
        table_rows.append(line)

    widths = [max(len(row[i]) for row in table_rows) for i in range(len(header))]
    lines = [f"{subtask}"]
    for i, row in enumerate(table_rows):
        lines.append("  ".join(cell.ljust(widths[j]) for j, cell in enumerate(row)).rstrip())
        if i == 0:
            lines.append("-" * (sum(widths) + 2 * (len(widths) - 1)))
    return "\n".join(lines) + "\n"


def emit_tables(reports: list[MetricReport], layout: str = "per_subtask") -> dict[str, str]:
    """One formatted table per subtask (or per OOD matrix slice)."""
    if layout not in ("per_subtask", "ood_matrix"):
        raise ValueError(f"unknown layout {layout!r}")
    by_subtask: dict[str, list[MetricReport]] = {}
    for r in reports:
        by_subtask.setdefault(r.subtask, []).append(r)
    return {subtask: emit_table(rs, subtask) for subtask, rs in sorted(by_subtask.items())}
