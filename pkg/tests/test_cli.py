import csv
import json
from pathlib import Path

import pytest
from click.testing import CliRunner

from lettot.cli import main
from lettot.corpus import QueryRecord
from lettot.framework import load_framework

THEMES = ["cultural", "nature", "urban", "island", "wellness"]
TYPES = ["Planning", "Consulting", "Guiding"]

GEN_MODELS_TOML = """
[[models]]
model_id = "mock-A"
endpoint_url = "mock://coverage?base=6&opt=12&filler=100"

[[models]]
model_id = "mock-B"
endpoint_url = "mock://coverage?base=4&opt=8&filler=200"
"""

MODELS_TOML = GEN_MODELS_TOML + """
[[models]]
model_id = "judge"
endpoint_url = "mock://judge?center=5&spread=1"
"""

QUERY_TEXTS = [
    "Plan a three day walking route through the old quarter for me",
    "Which museums are worth the entry fee on a rainy afternoon?",
    "I am standing at the harbour right now, what should I see next?",
    "Help me budget a week of family meals near the coastal villages",
    "Is late autumn a reasonable season for the mountain hot springs?",
    "Guide me from the station to the lantern festival without a car",
    "Draft an itinerary mixing vineyards and medieval castles over two days",
    "What local etiquette should I know before visiting the tea houses?",
    "My flight lands at midnight, how do I reach the island ferry?",
    "Compare the two river cruises for a group of retired photographers",
]


def make_corpus(path: Path, n=6, dupes=0):
    with open(path, "w", encoding="utf-8") as f:
        for i in range(n):
            rec = QueryRecord(
                id=f"q{i}",
                text=QUERY_TEXTS[i % len(QUERY_TEXTS)],
                query_type=TYPES[i % 3],
                theme=THEMES[i % len(THEMES)],
                source="llm_generated" if i % 5 < 3 else "web",
                stratum="llm" if i % 5 < 3 else "web",
            )
            f.write(rec.to_json() + "\n")
        for j in range(dupes):
            rec = QueryRecord(
                id=f"dup{j}",
                text=QUERY_TEXTS[j] + "!",
                query_type="Planning", theme="cultural", source="web", stratum="web",
            )
            f.write(rec.to_json() + "\n")


@pytest.fixture()
def runner():
    return CliRunner()


def run_ok(runner, args):
    result = runner.invoke(main, args, catch_exceptions=False)
    assert result.exit_code == 0, result.output
    return result


class TestIngest:
    def test_dedup_and_manifest(self, runner, tmp_path):
        src = tmp_path / "raw.jsonl"
        make_corpus(src, n=6, dupes=2)
        out = tmp_path / "corpus"
        run_ok(runner, ["ingest", "--in", str(src), "--out", str(out),
                        "--threshold", "0.95", "--seed", "1"])
        manifest = json.loads((out / "corpus_manifest.json").read_text())
        assert manifest["record_count"] == 6
        assert manifest["dedup_pairs_removed"] == 2
        assert manifest["dedup_threshold"] == 0.95
        run_manifest = json.loads((out / "manifest.json").read_text())
        assert run_manifest["stages"]["ingest"] is True
        rows = list(csv.DictReader(open(out / "removed_pairs.csv")))
        assert len(rows) == 2
        assert all(len(r["similarity"].split(".")[1]) == 4 for r in rows)

    def test_empty_record_rejected_not_dropped_silently(self, runner, tmp_path):
        src = tmp_path / "raw.jsonl"
        with open(src, "w") as f:
            f.write(QueryRecord(id="ok", text="A real question about trips",
                                query_type="Planning", theme="urban").to_json() + "\n")
            f.write(QueryRecord(id="empty", text="<p> </p>", query_type="Planning",
                                theme="urban").to_json() + "\n")
        out = tmp_path / "corpus"
        result = run_ok(runner, ["ingest", "--in", str(src), "--out", str(out)])
        assert "rejected" in result.output
        manifest = json.loads((out / "corpus_manifest.json").read_text())
        assert manifest["rejected"] == 1


class TestSample:
    def test_stratified(self, runner, tmp_path):
        src = tmp_path / "corpus.jsonl"
        make_corpus(src, n=10)
        out = tmp_path / "sample.jsonl"
        run_ok(runner, ["sample", "--in", str(src), "--out", str(out),
                        "--n", "5", "--seed", "7"])
        lines = [json.loads(l) for l in open(out) if l.strip()]
        assert len(lines) == 5


@pytest.fixture()
def pipeline(runner, tmp_path):
    """Full mock run: generate + score for both variants."""
    corpus = tmp_path / "corpus.jsonl"
    make_corpus(corpus, n=6)
    models = tmp_path / "models.toml"
    models.write_text(MODELS_TOML)
    gen_models = tmp_path / "gen_models.toml"
    gen_models.write_text(GEN_MODELS_TOML)
    run = tmp_path / "run"
    run_ok(runner, ["generate", "--corpus", str(corpus), "--models", str(gen_models),
                    "--out", str(run), "--variant", "both"])
    run_ok(runner, ["score", "--responses", str(run / "responses.jsonl"),
                    "--corpus", str(corpus), "--out", str(run)])
    return tmp_path, corpus, models, run


class TestGenerate:
    def test_counts_and_no_network(self, pipeline):
        _, _, _, run = pipeline
        lines = [l for l in open(run / "responses.jsonl") if l.strip()]
        # 6 queries x 2 models x 2 variants
        assert len(lines) == 24

    def test_warm_cache_reproduces_bytes(self, runner, pipeline):
        tmp_path, corpus, models, run = pipeline
        before = (run / "responses.jsonl").read_bytes()
        run_ok(runner, ["generate", "--corpus", str(corpus), "--models",
                        str(tmp_path / "gen_models.toml"), "--out", str(run),
                        "--variant", "both"])
        assert (run / "responses.jsonl").read_bytes() == before


class TestScore:
    def test_score_table_shape(self, pipeline):
        _, _, _, run = pipeline
        rows = list(csv.DictReader(open(run / "scores.csv")))
        assert len(rows) == 24
        assert list(rows[0].keys()) == ["query_id", "model_id", "variant", "C_P", "C_C",
                                        "C_G", "S_specific", "N", "L", "F_eff",
                                        "S_total_raw", "S_total"]
        for r in rows:
            assert int(r["L"]) > 0
            assert 0.5 <= float(r["F_eff"]) < 1.0

    def test_rerun_byte_identical(self, runner, pipeline):
        _, corpus, _, run = pipeline
        before = (run / "scores.csv").read_bytes()
        run_ok(runner, ["score", "--responses", str(run / "responses.jsonl"),
                        "--corpus", str(corpus), "--out", str(run)])
        assert (run / "scores.csv").read_bytes() == before

    def test_framework_checksum_mismatch(self, runner, pipeline):
        tmp_path, corpus, _, run = pipeline
        bad = tmp_path / "bad_responses.jsonl"
        lines = []
        for line in open(run / "responses.jsonl"):
            d = json.loads(line)
            d["framework_checksum"] = "deadbeef"
            lines.append(json.dumps(d))
        bad.write_text("\n".join(lines) + "\n")
        result = runner.invoke(main, ["score", "--responses", str(bad), "--corpus",
                                      str(corpus), "--out", str(tmp_path / "x")])
        assert result.exit_code != 0
        assert "framework" in result.output

    def test_explain_reports(self, runner, pipeline):
        tmp_path, corpus, _, run = pipeline
        out = tmp_path / "explained"
        run_ok(runner, ["score", "--responses", str(run / "responses.jsonl"),
                        "--corpus", str(corpus), "--out", str(out), "--explain"])
        reports = list((out / "coverage_reports").glob("*.txt"))
        assert len(reports) == 24
        assert "N =" in reports[0].read_text()


class TestJudgeCompareAnalyzeReport:
    def test_full_flow(self, runner, pipeline):
        tmp_path, corpus, models, run = pipeline
        run_ok(runner, ["judge", "--responses", str(run / "responses.jsonl"),
                        "--models", str(models), "--judge-model", "judge",
                        "--out", str(run / "verdicts.jsonl")])
        verdicts = [json.loads(l) for l in open(run / "verdicts.jsonl") if l.strip()]
        assert len(verdicts) == 24
        assert all(len(v["passes"]) == 3 for v in verdicts)

        # split scores by variant for the comparison stage
        rows = list(csv.DictReader(open(run / "scores.csv")))
        for variant in ("baseline", "optimized"):
            sel = [r for r in rows if r["variant"] == variant]
            with open(run / f"scores_{variant}.csv", "w", newline="") as f:
                w = csv.DictWriter(f, fieldnames=list(rows[0].keys()))
                w.writeheader()
                w.writerows(sel)

        run_ok(runner, ["compare",
                        "--baseline-scores", str(run / "scores_baseline.csv"),
                        "--optimized-scores", str(run / "scores_optimized.csv"),
                        "--verdicts", str(run / "verdicts.jsonl"),
                        "--out", str(run / "compare")])
        gains = list(csv.DictReader(open(run / "compare" / "model_gains.csv")))
        assert {g["model_id"] for g in gains} == {"mock-A", "mock-B"}
        radar = list(csv.DictReader(open(run / "compare" / "radar.csv")))
        assert [r["dimension"] for r in radar] == ["Rel", "Cxt", "Log", "Cr", "Acc",
                                                   "Comp", "Prac"]
        ranks = list(csv.DictReader(open(run / "compare" / "ranks.csv")))
        assert len(ranks) == 2 and "Overall_S" in ranks[0]

        run_ok(runner, ["analyze", "--scores", str(run / "scores.csv"),
                        "--out", str(run / "analyze")])
        pvals = list(csv.DictReader(open(run / "analyze" / "pvalues.csv")))
        assert len(pvals) == 2

        run_ok(runner, ["report", "--run-dir", str(run)])
        report = (run / "report" / "report.md").read_text()
        for section in ("## Summary", "## Gains", "## Rankings", "## Significance",
                        "## Provenance"):
            assert section in report
        data = run / "report" / "report_data"
        for name in ("radar.csv", "violin.csv", "density.csv", "heatmap.csv", "bar.csv"):
            assert (data / name).exists()

    def test_report_numbers_trace_to_csv(self, runner, pipeline):
        tmp_path, corpus, models, run = pipeline
        run_ok(runner, ["analyze", "--scores", str(run / "scores.csv"),
                        "--out", str(run / "analyze")])
        run_ok(runner, ["report", "--run-dir", str(run)])
        report = (run / "report" / "report.md").read_text()
        summary = list(csv.DictReader(open(run / "analyze" / "summary.csv")))
        for row in summary:
            assert row["mean"] in report
            assert row["std"] in report

    def test_report_missing_stage_named(self, runner, tmp_path):
        run = tmp_path / "empty_run"
        run.mkdir()
        (run / "scores.csv").write_text("query_id\n")
        result = runner.invoke(main, ["report", "--run-dir", str(run)])
        assert result.exit_code != 0
        assert "analyze" in result.output


class TestConfigDefaults:
    def test_config_supplies_defaults(self, runner, tmp_path):
        src = tmp_path / "raw.jsonl"
        make_corpus(src, n=4)
        cfg = tmp_path / "cfg.toml"
        out = tmp_path / "out"
        cfg.write_text(f'[ingest]\nin_path = "{src}"\nout_dir = "{out}"\n')
        run_ok(runner, ["--config", str(cfg), "ingest"])
        assert (out / "dedup.jsonl").exists()
