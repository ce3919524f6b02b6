import json
from pathlib import Path

import pytest

from absakit.backend import gold_replay_mock, constant_mock
from absakit.corpus import records
from absakit.evaluation import MetricFragment, aggregate_seeds
from absakit.experiment.analysis import diff_error_analysis
from absakit.experiment.cli import main as cli_main
from absakit.experiment.config import load_config
from absakit.experiment.runner import run_experiment, run_ood_matrix
from absakit.experiment.tables import emit_table, emit_tables
from absakit.types import ConfigError, Subtask


def gold_answers(data_dir: Path, datasets_subtasks) -> dict[str, str]:
    answers = {}
    for dataset, subtask in datasets_subtasks:
        path = data_dir / dataset / subtask / "test.ndjson"
        if path.exists():
            for inst in records.read_instances(path):
                answers[inst.instance_id] = inst.gold.render()
    return answers


def write_config(path: Path, data_dir: Path, output_dir: Path, endpoint: str, **overrides):
    cfg = {
        "data_dir": str(data_dir),
        "output_dir": str(output_dir),
        "datasets": ["Rest14"],
        "subtasks": ["ATE", "ATSC"],
        "prefix_kinds": ["NoPrefix", "NER"],
        "seeds": [0, 1],
        "backend": {"endpoint": endpoint},
    }
    cfg.update(overrides)
    path.write_text(json.dumps(cfg), "utf-8")
    return path


@pytest.fixture()
def gold_endpoint(small_corpus):
    data_dir = small_corpus["data_dir"]
    answers = gold_answers(
        data_dir,
        [(d, s) for d in ("Lapt14", "Rest14", "Rest15", "ERSA", "SentiHood")
         for s in ("ATE", "ATSC", "AOOE", "ERSA", "SentiHoodATSC")],
    )
    return gold_replay_mock(answers, name="gold-small")


class TestRunExperiment:
    def test_gold_replay_scores_perfectly(self, small_corpus, gold_endpoint, tmp_path):
        cfg = load_config(write_config(
            tmp_path / "cfg.json", small_corpus["data_dir"], tmp_path / "out", gold_endpoint
        ))
        reports = run_experiment(cfg)
        assert reports
        for r in reports:
            assert r.formatted() == "100.00±0.00"

    def test_cell_layout_and_count(self, small_corpus, gold_endpoint, tmp_path):
        out = tmp_path / "out"
        cfg = load_config(write_config(
            tmp_path / "cfg.json", small_corpus["data_dir"], out, gold_endpoint,
            subtasks=["ATSC"], prefix_kinds=["NoPrefix", "Noise"], seeds=[0, 1],
        ))
        run_experiment(cfg)
        cells = sorted(p.parent for p in out.glob("**/report.json"))
        assert len(cells) == 4  # 1 dataset x 1 subtask x 2 prefixes x 2 seeds
        for cell in cells:
            assert (cell / "prompts.ndjson").exists()
            assert (cell / "predictions.ndjson").exists()

    def test_constant_empty_backend_scores_zero(self, small_corpus, tmp_path):
        endpoint = constant_mock("", name="empty-small")
        cfg = load_config(write_config(
            tmp_path / "cfg.json", small_corpus["data_dir"], tmp_path / "out", endpoint,
            subtasks=["ATSC"], prefix_kinds=["NoPrefix"], seeds=[0],
        ))
        (report,) = run_experiment(cfg)
        assert report.mean_f1 == 0.0

    def test_re_pruned_for_ate(self, small_corpus, gold_endpoint, tmp_path):
        out = tmp_path / "out"
        cfg = load_config(write_config(
            tmp_path / "cfg.json", small_corpus["data_dir"], out, gold_endpoint,
            subtasks=["ATE"], prefix_kinds=["NoPrefix", "RE"], seeds=[0],
        ))
        run_experiment(cfg)
        assert not list(out.glob("**/RE/**/report.json"))

    def test_determinism_byte_identical(self, small_corpus, gold_endpoint, tmp_path):
        for name in ("a", "b"):
            cfg = load_config(write_config(
                tmp_path / f"{name}.json", small_corpus["data_dir"], tmp_path / name,
                gold_endpoint, subtasks=["ATSC"], prefix_kinds=["Noise"], seeds=[0],
            ))
            run_experiment(cfg)
        files_a = sorted((tmp_path / "a").glob("**/*.ndjson")) + sorted((tmp_path / "a").glob("**/*.json"))
        assert files_a
        for fa in files_a:
            fb = tmp_path / "b" / fa.relative_to(tmp_path / "a")
            assert fa.read_bytes() == fb.read_bytes(), fa.name

    def test_resumability(self, small_corpus, gold_endpoint, tmp_path):
        # interrupted: only seed 0 runs, then the full config reruns on top
        partial_cfg = load_config(write_config(
            tmp_path / "p.json", small_corpus["data_dir"], tmp_path / "resumed",
            gold_endpoint, subtasks=["ATSC"], prefix_kinds=["NoPrefix"], seeds=[0],
        ))
        run_experiment(partial_cfg)
        full_cfg = load_config(write_config(
            tmp_path / "f.json", small_corpus["data_dir"], tmp_path / "resumed",
            gold_endpoint, subtasks=["ATSC"], prefix_kinds=["NoPrefix"], seeds=[0, 1],
        ))
        run_experiment(full_cfg)
        fresh_cfg = load_config(write_config(
            tmp_path / "g.json", small_corpus["data_dir"], tmp_path / "fresh",
            gold_endpoint, subtasks=["ATSC"], prefix_kinds=["NoPrefix"], seeds=[0, 1],
        ))
        run_experiment(fresh_cfg)
        for fa in sorted((tmp_path / "resumed").glob("**/*.json")):
            fb = tmp_path / "fresh" / fa.relative_to(tmp_path / "resumed")
            assert fa.read_bytes() == fb.read_bytes()

    def test_missing_data_is_config_error(self, gold_endpoint, tmp_path):
        cfg = load_config(write_config(
            tmp_path / "cfg.json", tmp_path / "nodata", tmp_path / "out", gold_endpoint,
        ))
        with pytest.raises(ConfigError, match="ingest"):
            run_experiment(cfg)


class TestOodMatrix:
    def test_single_pair(self, small_corpus, gold_endpoint, tmp_path):
        cfg = load_config(write_config(
            tmp_path / "cfg.json", small_corpus["data_dir"], tmp_path / "out", gold_endpoint,
            subtasks=["ATE"], prefix_kinds=["NoPrefix", "NER", "Noise"], seeds=[0],
            train_domain="Lapt14", test_domain="Rest14",
        ))
        reports = run_ood_matrix(cfg)
        assert len(reports) == 3  # 3 prefix kinds, RE pruned for ATE anyway
        assert all(r.dataset == "Lapt14->Rest14" for r in reports)

    def test_same_domain_rejected(self, small_corpus, tmp_path):
        with pytest.raises(ConfigError):
            load_config(write_config(
                tmp_path / "cfg.json", small_corpus["data_dir"], tmp_path / "out",
                "mock:x", train_domain="Rest14", test_domain="Rest14",
            ))


class TestDiffErrors:
    def _write_cell(self, cell: Path, rows):
        cell.mkdir(parents=True, exist_ok=True)
        with open(cell / "predictions.ndjson", "w") as fh:
            for r in rows:
                fh.write(json.dumps(r) + "\n")

    def _rows(self, outcomes):
        return [
            {"id": f"i{k}", "raw": out, "parsed": out, "status": "ok",
             "gold": gold, "correct": out == gold}
            for k, (out, gold) in enumerate(outcomes)
        ]

    def test_authored_fixture_three_of_ten_fixed(self, tmp_path):
        golds = [f"g{k}" for k in range(12)]
        baseline = [("g0", "g0"), ("g1", "g1")] + [("wrong", g) for g in golds[2:]]
        treatment = [("g0", "g0"), ("g1", "g1")]
        treatment += [(g, g) for g in golds[2:5]]          # fixes 3
        treatment += [("still-wrong", g) for g in golds[5:]]
        self._write_cell(tmp_path / "base", self._rows(baseline))
        self._write_cell(tmp_path / "treat", self._rows(treatment))
        report = diff_error_analysis(tmp_path / "base", tmp_path / "treat")
        assert len(report.fixed_by_treatment) == 3
        assert len(report.still_wrong) == 7
        assert report.fixed_fraction == pytest.approx(0.30)
        rendered = report.render_rows()
        assert "baseline" in rendered and "treatment" in rendered

    def test_self_diff_fixes_nothing(self, tmp_path):
        rows = self._rows([("a", "a"), ("b", "x"), ("c", "y")])
        self._write_cell(tmp_path / "one", rows)
        self._write_cell(tmp_path / "two", rows)
        report = diff_error_analysis(tmp_path / "one", tmp_path / "two")
        assert report.fixed_fraction == 0.0
        assert not report.fixed_by_treatment

    def test_case_study_row_shape(self, tmp_path):
        base = self._rows([("place", "indain food")])
        treat = self._rows([("indain food", "indain food")])
        self._write_cell(tmp_path / "b", base)
        self._write_cell(tmp_path / "t", treat)
        report = diff_error_analysis(tmp_path / "b", tmp_path / "t")
        (row,) = report.fixed_by_treatment
        assert (row.baseline_output, row.treatment_output, row.gold) == (
            "place", "indain food", "indain food"
        )

    def test_mismatched_splits_rejected(self, tmp_path):
        self._write_cell(tmp_path / "b", self._rows([("a", "a")]))
        self._write_cell(tmp_path / "t", self._rows([("a", "a"), ("b", "b")]))
        with pytest.raises(ValueError, match="different instance sets"):
            diff_error_analysis(tmp_path / "b", tmp_path / "t")

    def test_partition_of_baseline_errors(self, tmp_path):
        rows_b = self._rows([("w", f"g{k}") for k in range(6)])
        rows_t = self._rows([(f"g{k}" if k % 2 else "w", f"g{k}") for k in range(6)])
        self._write_cell(tmp_path / "b", rows_b)
        self._write_cell(tmp_path / "t", rows_t)
        report = diff_error_analysis(tmp_path / "b", tmp_path / "t")
        fixed = {r.instance_id for r in report.fixed_by_treatment}
        still = {r.instance_id for r in report.still_wrong}
        assert not fixed & still
        assert fixed | still == {f"i{k}" for k in range(6)}


def _report(dataset, prefix, mean, subtask="ATE"):
    frag = MetricFragment(dataset, subtask, prefix, seed=0, precision=mean, recall=mean, f1=mean)
    return aggregate_seeds([frag])


class TestTables:
    def test_grid_with_avg_column(self):
        reports = [
            _report("Lapt14", "NER", 0.9265), _report("Rest14", "NER", 0.9538),
            _report("Lapt14", "Noise", 0.9290), _report("Rest14", "Noise", 0.9492),
        ]
        table = emit_table(reports, "ATE")
        assert "Avg" in table
        assert "94.02" in table  # (92.65 + 95.38) / 2
        assert "92.65±0.00" in table

    def test_single_cell_grid(self):
        table = emit_table([_report("Rest14", "NoPrefix", 0.8)], "ATE")
        assert "80.00" in table

    def test_ragged_grid_lists_missing(self):
        reports = [
            _report("Lapt14", "NER", 0.9), _report("Rest14", "NER", 0.9),
            _report("Lapt14", "Noise", 0.9),
        ]
        with pytest.raises(ValueError, match="Rest14"):
            emit_table(reports, "ATE")

    def test_emit_tables_groups_by_subtask(self):
        reports = [_report("Rest14", "NER", 0.9, "ATE"), _report("Rest14", "NER", 0.8, "ATSC")]
        tables = emit_tables(reports)
        assert set(tables) == {"ATE", "ATSC"}


class TestCli:
    def test_run_and_report(self, small_corpus, gold_endpoint, tmp_path, capsys):
        cfg_path = write_config(
            tmp_path / "cfg.json", small_corpus["data_dir"], tmp_path / "out", gold_endpoint,
            subtasks=["ATE"], prefix_kinds=["NoPrefix"], seeds=[0],
        )
        assert cli_main(["run", "--config", str(cfg_path)]) == 0
        assert cli_main(["report", "--config", str(cfg_path)]) == 0
        out = capsys.readouterr().out
        assert "100.00±0.00" in out
        assert (tmp_path / "out" / "tables" / "ATE.txt").exists()

    def test_config_error_exit_code(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        assert cli_main(["run", "--config", str(bad)]) == 2

    def test_partial_run_exit_code(self, small_corpus, tmp_path):
        # gold map missing every id -> every request fails -> partial cells
        endpoint = gold_replay_mock({}, name="empty-map")
        cfg_path = write_config(
            tmp_path / "cfg.json", small_corpus["data_dir"], tmp_path / "out", endpoint,
            subtasks=["ATE"], prefix_kinds=["NoPrefix"], seeds=[0],
        )
        assert cli_main(["run", "--config", str(cfg_path)]) == 3

    def test_build_prompts_export(self, small_corpus, gold_endpoint, tmp_path):
        cfg_path = write_config(
            tmp_path / "cfg.json", small_corpus["data_dir"], tmp_path / "out", gold_endpoint,
        )
        out = tmp_path / "pairs.ndjson"
        rc = cli_main([
            "build-prompts", "--config", str(cfg_path), "--dataset", "Rest14",
            "--subtask", "ATSC", "--split", "test", "--prefix", "NER",
            "--out", str(out),
        ])
        assert rc == 0
        rows = [json.loads(l) for l in out.read_text().splitlines()]
        assert rows
        assert all(row["prompt"].endswith("output: ") for row in rows)
        assert all("target" in row for row in rows)

    def test_diff_errors_cli(self, small_corpus, gold_endpoint, tmp_path, capsys):
        data_dir = small_corpus["data_dir"]
        base_cfg = write_config(
            tmp_path / "b.json", data_dir, tmp_path / "base",
            constant_mock("", name="const-diff"),
            subtasks=["ATE"], prefix_kinds=["NoPrefix"], seeds=[0],
        )
        treat_cfg = write_config(
            tmp_path / "t.json", data_dir, tmp_path / "treat", gold_endpoint,
            subtasks=["ATE"], prefix_kinds=["NoPrefix"], seeds=[0],
        )
        cli_main(["run", "--config", str(base_cfg)])
        cli_main(["run", "--config", str(treat_cfg)])
        rc = cli_main([
            "diff-errors",
            "--baseline", str(tmp_path / "base" / "Rest14" / "ATE" / "NoPrefix" / "0"),
            "--treatment", str(tmp_path / "treat" / "Rest14" / "ATE" / "NoPrefix" / "0"),
        ])
        assert rc == 0
        assert "fixed by treatment" in capsys.readouterr().out
