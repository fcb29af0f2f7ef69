"""Pipeline CLI: ingest -> sample -> generate -> score -> judge -> compare -> analyze -> report.

Each stage reads and writes plain files (JSONL/CSV/TOML) so runs are
restartable and auditable. All emitted numbers are formatted with fixed
precision, which makes reruns on identical inputs byte-identical.
"""
from __future__ import annotations

import csv
import hashlib
import json
import math
import sys
import time
from dataclasses import dataclass, field, asdict
from pathlib import Path

import click
import numpy as np

from lettot import corpus as corpus_mod
from lettot import gateway, judge as judge_mod, matcher, scoring, stats as stats_mod
from lettot.framework import RUBRIC_DIMENSION_IDS, QueryType, load_framework

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib


# ---------------------------------------------------------------------------
# run manifest

@dataclass
class RunManifest:
    run_id: str
    framework_checksum: str = ""
    models: list[str] = field(default_factory=list)
    corpus_manifest: str = ""
    weights: dict = field(default_factory=dict)
    seeds: dict = field(default_factory=dict)
    timestamps: dict = field(default_factory=dict)
    stages: dict = field(default_factory=dict)

    @classmethod
    def load_or_create(cls, out_dir: Path) -> "RunManifest":
        p = out_dir / "manifest.json"
        if p.exists():
            return cls(**json.loads(p.read_text("utf-8")))
        return cls(run_id=hashlib.sha256(str(out_dir).encode()).hexdigest()[:12])

    def mark(self, stage: str, out_dir: Path, **extra) -> None:
        self.stages[stage] = True
        self.timestamps[stage] = time.strftime("%Y-%m-%dT%H:%M:%S", time.gmtime())
        for k, v in extra.items():
            setattr(self, k, v)
        out_dir.mkdir(parents=True, exist_ok=True)
        (out_dir / "manifest.json").write_text(
            json.dumps(asdict(self), ensure_ascii=False, sort_keys=True, indent=2) + "\n",
            "utf-8",
        )


def _fail(stage: str, message: str) -> None:
    raise click.ClickException(f"[{stage}] {message}")


# ---------------------------------------------------------------------------
# CLI group

@click.group()
@click.option("--config", "config_path", type=click.Path(exists=True), default=None,
              help="TOML file with per-subcommand option defaults.")
@click.pass_context
def main(ctx: click.Context, config_path: str | None) -> None:
    """Label-free LLM evaluation pipeline."""
    if config_path:
        with open(config_path, "rb") as f:
            ctx.default_map = tomllib.load(f)


# ---------------------------------------------------------------------------
# ingest / sample

@main.command()
@click.option("--in", "in_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_dir", required=True, type=click.Path())
@click.option("--threshold", default=0.95, show_default=True)
@click.option("--seed", default=0, show_default=True)
def ingest(in_path: str, out_dir: str, threshold: float, seed: int) -> None:
    """Clean texts, drop near-duplicates, emit the deduplicated corpus + manifest."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    records = corpus_mod.read_jsonl(in_path)

    cleaned: list[corpus_mod.QueryRecord] = []
    rejected = 0
    for rec in records:
        try:
            rec.text = corpus_mod.clean_text(rec.text)
            cleaned.append(rec)
        except corpus_mod.EmptyTextError:
            rejected += 1
            click.echo(f"rejected empty-after-cleaning record: {rec.id}", err=True)

    kept, removed = corpus_mod.dedup(cleaned, threshold=threshold)
    corpus_mod.write_jsonl(kept, out / "dedup.jsonl")
    with open(out / "removed_pairs.csv", "w", newline="", encoding="utf-8") as f:
        w = csv.writer(f)
        w.writerow(["kept_id", "removed_id", "similarity"])
        for kept_id, removed_id, sim in removed:
            w.writerow([kept_id, removed_id, f"{sim:.4f}"])
    manifest = corpus_mod.build_manifest(kept, removed, threshold, rejected)
    (out / "corpus_manifest.json").write_text(manifest.to_json() + "\n", "utf-8")

    rm = RunManifest.load_or_create(out)
    rm.seeds["ingest"] = seed
    rm.mark("ingest", out, corpus_manifest=str(out / "corpus_manifest.json"))
    click.echo(f"kept {len(kept)} records, removed {len(removed)}, rejected {rejected}")


@main.command()
@click.option("--in", "in_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--n", "n", required=True, type=int)
@click.option("--seed", default=0, show_default=True)
@click.option("--strata", "strata_path", type=click.Path(exists=True), default=None,
              help="Optional TOML mapping stratum label to weight.")
def sample(in_path: str, out_path: str, n: int, seed: int, strata_path: str | None) -> None:
    """Draw a stratified sample preserving per-stratum proportions."""
    records = corpus_mod.read_jsonl(in_path)
    spec = None
    if strata_path:
        with open(strata_path, "rb") as f:
            spec = {k: float(v) for k, v in tomllib.load(f).get("strata", {}).items()}
    try:
        chosen = corpus_mod.stratified_sample(records, spec, n, seed)
    except corpus_mod.CorpusError as exc:
        _fail("sample", str(exc))
    corpus_mod.write_jsonl(chosen, out_path)
    click.echo(f"sampled {len(chosen)} of {len(records)} records")


# ---------------------------------------------------------------------------
# generate

@main.command()
@click.option("--corpus", "corpus_path", required=True, type=click.Path(exists=True))
@click.option("--models", "models_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_dir", required=True, type=click.Path())
@click.option("--variant", type=click.Choice(["baseline", "optimized", "both"]),
              default="both", show_default=True)
@click.option("--repeats", default=1, show_default=True)
@click.option("--framework", "framework_path", type=click.Path(exists=True), default=None)
@click.option("--cache", "cache_dir", type=click.Path(), default=None,
              help="Response cache directory [default: <out>/cache].")
def generate(corpus_path: str, models_path: str, out_dir: str, variant: str,
             repeats: int, framework_path: str | None, cache_dir: str | None) -> None:
    """Collect model completions for every (query, model, variant, repeat)."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    fw = load_framework(framework_path)
    models = gateway.load_models(models_path)
    records = corpus_mod.read_jsonl(corpus_path)
    cache = gateway.ResponseCache(cache_dir or out / "cache")
    variants = gateway.VARIANTS if variant == "both" else (variant,)

    transport = gateway.HttpTransport()
    n = 0
    with open(out / "responses.jsonl", "w", encoding="utf-8") as f:
        for query in records:
            for model in models:
                for var in variants:
                    for rep in range(repeats):
                        rec = gateway.generate(
                            query, model, var, framework=fw, cache=cache,
                            transport=transport, repeat=rep,
                        )
                        f.write(rec.to_json() + "\n")
                        n += 1

    rm = RunManifest.load_or_create(out)
    rm.mark("generate", out, framework_checksum=fw.checksum,
            models=[m.model_id for m in models])
    click.echo(f"wrote {n} responses ({transport.calls} network calls)")


# ---------------------------------------------------------------------------
# score

SCORE_COLUMNS = ["query_id", "model_id", "variant", "C_P", "C_C", "C_G", "S_specific",
                 "N", "L", "F_eff", "S_total_raw", "S_total"]


def _read_responses(path: str | Path) -> list[gateway.ResponseRecord]:
    out = []
    with open(path, encoding="utf-8") as f:
        for line in f:
            if line.strip():
                out.append(gateway.ResponseRecord.from_json(line))
    return out


@main.command()
@click.option("--responses", "responses_path", required=True, type=click.Path(exists=True))
@click.option("--corpus", "corpus_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_dir", required=True, type=click.Path())
@click.option("--framework", "framework_path", type=click.Path(exists=True), default=None)
@click.option("--alpha", default=1.0, show_default=True)
@click.option("--beta", default=1.0, show_default=True)
@click.option("--kappa", default=1.0, show_default=True)
@click.option("--explain", is_flag=True, help="Write per-response coverage reports.")
def score(responses_path: str, corpus_path: str, out_dir: str, framework_path: str | None,
          alpha: float, beta: float, kappa: float, explain: bool) -> None:
    """Score each response by element coverage and information efficiency."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    fw = load_framework(framework_path)
    weights = scoring.ScoreWeights(alpha=alpha, beta=beta, kappa=kappa)
    queries = {r.id: r for r in corpus_mod.read_jsonl(corpus_path)}
    responses = _read_responses(responses_path)

    for rec in responses:
        if rec.framework_checksum and rec.framework_checksum != fw.checksum:
            _fail("score", f"response {rec.query_id}/{rec.model_id} was generated against "
                           f"framework {rec.framework_checksum[:12]}, current is "
                           f"{fw.checksum[:12]}")

    explain_dir = out / "coverage_reports"
    if explain:
        explain_dir.mkdir(exist_ok=True)

    rows = []
    with open(out / "coverage.jsonl", "w", encoding="utf-8") as covf:
        for rec in responses:
            query = queries.get(rec.query_id)
            if query is None:
                _fail("score", f"response references unknown query {rec.query_id}")
            cov = matcher.match_elements(rec.response_text, fw, query.theme)
            br = scoring.total_score(cov, rec.char_length, weights)
            rows.append({
                "query_id": rec.query_id,
                "model_id": rec.model_id,
                "variant": rec.variant,
                "C_P": cov.c_scores[QueryType.PLANNING.value],
                "C_C": cov.c_scores[QueryType.CONSULTING.value],
                "C_G": cov.c_scores[QueryType.GUIDING.value],
                "S_specific": br.s_specific,
                "N": br.n,
                "L": br.length,
                "F_eff": f"{br.f_eff:.6f}",
                "S_total_raw": f"{br.s_total_raw:.6f}",
                "S_total": f"{br.s_total:.2f}",
            })
            covf.write(json.dumps({
                "query_id": rec.query_id, "model_id": rec.model_id,
                "variant": rec.variant, "c_scores": cov.c_scores,
                "s_scores": cov.s_scores, "n": cov.n,
                "spans": cov.matched_spans,
            }, ensure_ascii=False, sort_keys=True) + "\n")
            if explain:
                name = f"{rec.query_id}_{rec.model_id}_{rec.variant}_{rec.repeat}.txt"
                (explain_dir / name).write_text(
                    matcher.explain_coverage(cov, fw) + "\n", "utf-8")

    rows.sort(key=lambda r: (r["query_id"], r["model_id"], r["variant"]))
    with open(out / "scores.csv", "w", newline="", encoding="utf-8") as f:
        w = csv.DictWriter(f, fieldnames=SCORE_COLUMNS)
        w.writeheader()
        w.writerows(rows)

    _write_summary(rows, out / "summary.csv")
    rm = RunManifest.load_or_create(out)
    rm.mark("score", out, framework_checksum=fw.checksum,
            weights={"alpha": alpha, "beta": beta, "kappa": kappa})
    click.echo(f"scored {len(rows)} responses")


def _group_scores(rows: list[dict]) -> dict[str, list[float]]:
    groups: dict[str, list[float]] = {}
    for r in rows:
        groups.setdefault(r["model_id"], []).append(float(r["S_total_raw"]))
    return groups


def _write_summary(rows: list[dict], path: Path) -> None:
    groups = _group_scores(rows)
    with open(path, "w", newline="", encoding="utf-8") as f:
        w = csv.writer(f)
        w.writerow(["model_id", "n", "mean", "std", "min", "max", "iqr", "ci95_lo", "ci95_hi"])
        for model in sorted(groups):
            s = stats_mod.summarize(groups[model], model)
            w.writerow([model, s.n, f"{s.mean:.6f}", f"{s.std:.6f}", f"{s.minimum:.6f}",
                        f"{s.maximum:.6f}", f"{s.iqr:.6f}", f"{s.ci95[0]:.6f}",
                        f"{s.ci95[1]:.6f}"])


# ---------------------------------------------------------------------------
# judge

@main.command(name="judge")
@click.option("--responses", "responses_path", required=True, type=click.Path(exists=True))
@click.option("--models", "models_path", type=click.Path(exists=True), default=None)
@click.option("--judge-model", "judge_model_id", default=None,
              help="model_id from the presets file to use as judge.")
@click.option("--import", "import_path", type=click.Path(exists=True), default=None,
              help="Import pre-scored verdicts (e.g. human annotators) instead of judging.")
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--framework", "framework_path", type=click.Path(exists=True), default=None)
@click.option("--cache", "cache_dir", type=click.Path(), default=None)
def judge_cmd(responses_path: str, models_path: str | None, judge_model_id: str | None,
              import_path: str | None, out_path: str, framework_path: str | None,
              cache_dir: str | None) -> None:
    """Score responses on the 7-dimension rubric with three judge passes each."""
    fw = load_framework(framework_path)
    responses = _read_responses(responses_path)

    if import_path:
        verdicts = _load_verdicts(import_path)
        _write_verdicts(verdicts, out_path)
        click.echo(f"imported {len(verdicts)} verdicts")
        return

    if not (models_path and judge_model_id):
        _fail("judge", "either --import or both --models and --judge-model are required")
    models = {m.model_id: m for m in gateway.load_models(models_path)}
    if judge_model_id not in models:
        _fail("judge", f"judge model {judge_model_id!r} not in presets")
    jm = models[judge_model_id]
    cache = gateway.ResponseCache(cache_dir) if cache_dir else None
    transport = gateway.HttpTransport()

    failures = 0
    with open(out_path, "w", encoding="utf-8") as f:
        for rec in responses:
            prompt = gateway.build_judge_prompt(rec.prompt_text, rec.response_text, fw)
            passes = []
            for rep in range(judge_mod.ANNOTATOR_PASSES):
                scores = _judge_pass(jm, prompt, rep, cache, transport)
                if scores is None:
                    break
                passes.append(scores)
            ref = f"{rec.query_id}:{rec.model_id}:{rec.variant}:{rec.repeat}"
            if len(passes) == judge_mod.ANNOTATOR_PASSES:
                verdict = judge_mod.aggregate_direct(ref, passes)
                f.write(json.dumps({
                    "response_ref": ref, "query_id": rec.query_id,
                    "model_id": rec.model_id, "variant": rec.variant,
                    "passes": verdict.passes, "aggregated": verdict.aggregated,
                    "ranges": verdict.ranges,
                }, ensure_ascii=False, sort_keys=True) + "\n")
            else:
                failures += 1
                f.write(json.dumps({"response_ref": ref, "error": "judge output unparsable"},
                                   sort_keys=True) + "\n")
    click.echo(f"judged {len(responses)} responses, {failures} failures")


def _judge_pass(jm, prompt: str, rep: int, cache, transport) -> dict[str, int] | None:
    """One annotator pass; malformed output is retried twice with a repair instruction."""
    attempt_prompt = prompt
    for _ in range(3):
        query = corpus_mod.QueryRecord(id=f"judge-{rep}", text=attempt_prompt,
                                       query_type="", theme="")
        rec = gateway.generate(query, jm, "baseline", cache=cache,
                               transport=transport, repeat=rep)
        try:
            return gateway.parse_judge_scores(rec.response_text)
        except gateway.JudgeParseError:
            attempt_prompt = f"{prompt}\n\n{gateway.REPAIR_INSTRUCTIONS}"
    return None


@dataclass
class VerdictRow:
    response_ref: str
    query_id: str
    model_id: str
    variant: str
    verdict: judge_mod.JudgeVerdict


def _load_verdicts(path: str | Path) -> list[VerdictRow]:
    out = []
    with open(path, encoding="utf-8") as f:
        for line in f:
            if not line.strip():
                continue
            d = json.loads(line)
            if "error" in d:
                continue
            passes = [{k: int(v) for k, v in p.items()} for p in d["passes"]]
            verdict = judge_mod.aggregate_direct(d["response_ref"], passes)
            out.append(VerdictRow(d["response_ref"], d["query_id"], d["model_id"],
                                  d["variant"], verdict))
    return out


def _write_verdicts(rows: list[VerdictRow], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        for r in rows:
            f.write(json.dumps({
                "response_ref": r.response_ref, "query_id": r.query_id,
                "model_id": r.model_id, "variant": r.variant,
                "passes": r.verdict.passes, "aggregated": r.verdict.aggregated,
                "ranges": r.verdict.ranges,
            }, ensure_ascii=False, sort_keys=True) + "\n")


# ---------------------------------------------------------------------------
# compare

def _read_score_rows(path: str | Path) -> list[dict]:
    with open(path, newline="", encoding="utf-8") as f:
        return list(csv.DictReader(f))


def _load_weight_matrix(path: str | None) -> judge_mod.AhpResult:
    dims = RUBRIC_DIMENSION_IDS
    if path is None:
        mat = judge_mod.AhpMatrix(np.ones((7, 7)), dims)  # uniform priorities
    else:
        with open(path, "rb") as f:
            doc = tomllib.load(f)
        mat = judge_mod.AhpMatrix(np.array(doc["weights"]["matrix"], dtype=float), dims)
    return judge_mod.priority_vector(mat)


@main.command()
@click.option("--baseline-scores", "base_path", required=True, type=click.Path(exists=True))
@click.option("--optimized-scores", "opt_path", required=True, type=click.Path(exists=True))
@click.option("--verdicts", "verdicts_path", type=click.Path(exists=True), default=None)
@click.option("--weights", "weights_path", type=click.Path(exists=True), default=None,
              help="TOML with a 7x7 pairwise comparison matrix under [weights].matrix.")
@click.option("--override-cr", is_flag=True,
              help="Proceed even if the weight matrix fails the consistency gate.")
@click.option("--out", "out_dir", required=True, type=click.Path())
def compare(base_path: str, opt_path: str, verdicts_path: str | None,
            weights_path: str | None, override_cr: bool, out_dir: str) -> None:
    """Baseline-vs-optimized gains per model and per dimension, plus S/O rankings."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    base_rows = _read_score_rows(base_path)
    opt_rows = _read_score_rows(opt_path)

    base_pairs = {(r["query_id"], r["model_id"]) for r in base_rows}
    opt_pairs = {(r["query_id"], r["model_id"]) for r in opt_rows}
    unmatched = sorted(base_pairs ^ opt_pairs)
    if unmatched:
        click.echo(f"warning: {len(unmatched)} unmatched (query, model) pairs excluded",
                   err=True)
    matched = base_pairs & opt_pairs
    base_rows = [r for r in base_rows if (r["query_id"], r["model_id"]) in matched]
    opt_rows = [r for r in opt_rows if (r["query_id"], r["model_id"]) in matched]

    # per-model composite-score gains (paired-bars data)
    base_groups = _group_scores(base_rows)
    opt_groups = _group_scores(opt_rows)
    with open(out / "model_gains.csv", "w", newline="", encoding="utf-8") as f:
        w = csv.writer(f)
        w.writerow(["model_id", "baseline_mean", "optimized_mean", "gain_pct"])
        for model in sorted(base_groups):
            bm = sum(base_groups[model]) / len(base_groups[model])
            om = sum(opt_groups[model]) / len(opt_groups[model])
            w.writerow([model, f"{bm:.6f}", f"{om:.6f}",
                        f"{judge_mod.relative_gain(bm, om):.2f}"])

    if verdicts_path:
        verdicts = _load_verdicts(verdicts_path)
        base_v: dict[str, list] = {}
        opt_v: dict[str, list] = {}
        for r in verdicts:
            target = base_v if r.variant == "baseline" else opt_v
            target.setdefault(r.model_id, []).append(r.verdict)

        # per-dimension gains pooled over all models (radar data)
        with open(out / "radar.csv", "w", newline="", encoding="utf-8") as f:
            w = csv.writer(f)
            w.writerow(["dimension", "baseline_mean", "optimized_mean", "gain_pct"])
            for dim in RUBRIC_DIMENSION_IDS:
                bvals = [v.aggregated[dim] for vs in base_v.values() for v in vs]
                ovals = [v.aggregated[dim] for vs in opt_v.values() for v in vs]
                bm = sum(bvals) / len(bvals)
                om = sum(ovals) / len(ovals)
                w.writerow([dim, f"{bm:.6f}", f"{om:.6f}",
                            f"{judge_mod.relative_gain(bm, om):.2f}"])

        weights = _load_weight_matrix(weights_path)
        try:
            cmp_result = judge_mod.ahp_compare(base_v, opt_v, weights, override=override_cr)
        except judge_mod.JudgeError as exc:
            _fail("compare", str(exc))
        with open(out / "ranks.csv", "w", newline="", encoding="utf-8") as f:
            w = csv.writer(f)
            header = ["model_id"]
            for dim in RUBRIC_DIMENSION_IDS:
                header += [f"{dim}_S", f"{dim}_O"]
            header += ["Overall_S", "Overall_O"]
            w.writerow(header)
            for model in cmp_result.models:
                row = [model]
                for dim in RUBRIC_DIMENSION_IDS:
                    s, o = cmp_result.dimension_ranks[model][dim]
                    row += [s, o]
                row += list(cmp_result.overall_rank[model])
                w.writerow(row)
        with open(out / "dimension_means.csv", "w", newline="", encoding="utf-8") as f:
            w = csv.writer(f)
            w.writerow(["model_id", "variant"] + list(RUBRIC_DIMENSION_IDS))
            for model in cmp_result.models:
                for idx, variant in enumerate(("baseline", "optimized")):
                    w.writerow([model, variant] + [
                        f"{cmp_result.dimension_means[model][d][idx]:.6f}"
                        for d in RUBRIC_DIMENSION_IDS
                    ])
    click.echo("comparison written")


# ---------------------------------------------------------------------------
# analyze

@main.command()
@click.option("--scores", "scores_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_dir", required=True, type=click.Path())
@click.option("--pooled", is_flag=True, help="Pooled-variance t-test instead of Welch.")
def analyze(scores_path: str, out_dir: str, pooled: bool) -> None:
    """Descriptive statistics, pairwise significance matrix, and KDE curves."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rows = _read_score_rows(scores_path)
    if not rows:
        _fail("analyze", "score table is empty")
    groups = _group_scores(rows)

    _write_summary(rows, out / "summary.csv")

    pv = stats_mod.pvalue_matrix(groups, pooled=pooled)
    with open(out / "pvalues.csv", "w", newline="", encoding="utf-8") as f:
        w = csv.writer(f)
        w.writerow(["model_id"] + pv.models)
        for i, model in enumerate(pv.models):
            w.writerow([model] + [
                "" if math.isnan(v) else f"{v:.4f}" for v in pv.values[i]
            ])

    with open(out / "kde.csv", "w", newline="", encoding="utf-8") as f:
        w = csv.writer(f)
        w.writerow(["model_id", "x", "density"])
        for model in sorted(groups):
            s = stats_mod.summarize(groups[model], model)
            for x, d in s.kde:
                w.writerow([model, f"{x:.6f}", f"{d:.6f}"])
    click.echo(f"analyzed {len(groups)} models")


# ---------------------------------------------------------------------------
# report

REPORT_SECTIONS = ("Summary", "Gains", "Rankings", "Significance", "Provenance")


@main.command()
@click.option("--run-dir", "run_dir", required=True, type=click.Path(exists=True))
@click.option("--out", "out_dir", type=click.Path(), default=None,
              help="Report destination [default: <run-dir>/report].")
def report(run_dir: str, out_dir: str | None) -> None:
    """Render the markdown report and the plot-data CSV bundle."""
    run = Path(run_dir)
    out = Path(out_dir) if out_dir else run / "report"
    data_dir = out / "report_data"
    data_dir.mkdir(parents=True, exist_ok=True)

    required = {
        "score": run / "scores.csv",
        "analyze": run / "analyze" / "summary.csv",
    }
    for stage, path in required.items():
        if not path.exists():
            _fail("report", f"stage {stage!r} incomplete: missing {path}")

    summary_rows = _read_score_rows(run / "analyze" / "summary.csv")
    if not summary_rows:
        _fail("report", "empty model set in analyze summary")
    score_rows = _read_score_rows(run / "scores.csv")
    pvalue_rows = _read_score_rows(run / "analyze" / "pvalues.csv")
    gains_path = run / "compare" / "model_gains.csv"
    gain_rows = _read_score_rows(gains_path) if gains_path.exists() else []
    radar_path = run / "compare" / "radar.csv"
    radar_rows = _read_score_rows(radar_path) if radar_path.exists() else []
    ranks_path = run / "compare" / "ranks.csv"

    # plot-data bundle
    _copy_csv(run / "analyze" / "pvalues.csv", data_dir / "heatmap.csv")
    _copy_csv(run / "analyze" / "kde.csv", data_dir / "density.csv")
    if radar_rows:
        _copy_csv(radar_path, data_dir / "radar.csv")
    with open(data_dir / "violin.csv", "w", newline="", encoding="utf-8") as f:
        w = csv.writer(f)
        w.writerow(["model_id", "score"])
        for r in sorted(score_rows, key=lambda r: (r["model_id"], r["query_id"], r["variant"])):
            w.writerow([r["model_id"], r["S_total_raw"]])
    with open(data_dir / "bar.csv", "w", newline="", encoding="utf-8") as f:
        w = csv.writer(f)
        w.writerow(["model_id", "mean"])
        for r in sorted(summary_rows, key=lambda r: (-float(r["mean"]), float(r["std"]),
                                                     r["model_id"])):
            w.writerow([r["model_id"], r["mean"]])

    manifest_path = run / "manifest.json"
    manifest = json.loads(manifest_path.read_text("utf-8")) if manifest_path.exists() else {}

    summaries = [
        stats_mod.StatsSummary(
            model_id=r["model_id"], n=int(r["n"]), mean=float(r["mean"]),
            std=float(r["std"]), minimum=float(r["min"]), maximum=float(r["max"]),
            iqr=float(r["iqr"]), ci95=(float(r["ci95_lo"]), float(r["ci95_hi"])),
        )
        for r in summary_rows
    ]
    ranking = stats_mod.rank_models(summaries)

    lines = ["# Evaluation Report", ""]
    lines += ["## Summary", "",
              "| model | n | mean | std | IQR | 95% CI |",
              "|---|---|---|---|---|---|"]
    for r in summary_rows:
        lines.append(f"| {r['model_id']} | {r['n']} | {r['mean']} | {r['std']} "
                     f"| {r['iqr']} | [{r['ci95_lo']}, {r['ci95_hi']}] |")
    lines.append("")

    lines += ["## Gains", ""]
    if gain_rows:
        lines += ["| model | baseline | optimized | gain % |", "|---|---|---|---|"]
        for r in gain_rows:
            lines.append(f"| {r['model_id']} | {r['baseline_mean']} | {r['optimized_mean']} "
                         f"| {r['gain_pct']} |")
    if radar_rows:
        lines += ["", "| dimension | baseline | optimized | gain % |", "|---|---|---|---|"]
        for r in radar_rows:
            lines.append(f"| {r['dimension']} | {r['baseline_mean']} | {r['optimized_mean']} "
                         f"| {r['gain_pct']} |")
    if not gain_rows and not radar_rows:
        lines.append("No baseline/optimized comparison in this run.")
    lines.append("")

    lines += ["## Rankings", "", "| rank | model | mean |", "|---|---|---|"]
    for rank, s in ranking:
        lines.append(f"| {rank} | {s.model_id} | {s.mean:.6f} |")
    if ranks_path.exists():
        rank_rows = _read_score_rows(ranks_path)
        cols = list(rank_rows[0].keys())
        lines += ["", "| " + " | ".join(cols) + " |",
                  "|" + "---|" * len(cols)]
        for r in rank_rows:
            lines.append("| " + " | ".join(str(r[c]) for c in cols) + " |")
    lines.append("")

    lines += ["## Significance", ""]
    if pvalue_rows:
        cols = list(pvalue_rows[0].keys())
        lines += ["| " + " | ".join(cols) + " |", "|" + "---|" * len(cols)]
        for r in pvalue_rows:
            lines.append("| " + " | ".join(r[c] for c in cols) + " |")
    lines.append("")

    lines += ["## Provenance", ""]
    lines.append(f"- run id: {manifest.get('run_id', 'unknown')}")
    lines.append(f"- framework checksum: {manifest.get('framework_checksum', 'unknown')}")
    lines.append(f"- models: {', '.join(manifest.get('models', [])) or 'unknown'}")
    weights = manifest.get("weights", {})
    if weights:
        lines.append(f"- score weights: alpha={weights.get('alpha')}, "
                     f"beta={weights.get('beta')}, kappa={weights.get('kappa')}")
    lines.append("")

    (out / "report.md").write_text("\n".join(lines), "utf-8")
    click.echo(f"report written to {out / 'report.md'}")


def _copy_csv(src: Path, dst: Path) -> None:
    dst.write_bytes(src.read_bytes())


if __name__ == "__main__":
    main()
