"""Corpus preparation: text cleaning, near-duplicate removal, stratified sampling.

Records arrive as JSONL; all steps are deterministic so a rerun on the
same inputs reproduces the same corpus byte for byte.
"""
from __future__ import annotations

import json
import random
import re
import unicodedata
from dataclasses import dataclass, field, asdict
from pathlib import Path
from typing import Iterable

from lettot.editdist import levenshtein, similarity

SOURCES = ("llm_generated", "web")

_TAG_RE = re.compile(r"<[^>\n]*>")
_WS_RE = re.compile(r"\s+")


class CorpusError(Exception):
    pass


class EmptyTextError(CorpusError):
    """Text became empty after cleaning; the record must be rejected, not dropped silently."""


@dataclass
class QueryRecord:
    id: str
    text: str
    query_type: str
    theme: str
    source: str = "web"
    stratum: str = ""

    @classmethod
    def from_json(cls, line: str) -> "QueryRecord":
        d = json.loads(line)
        rec = cls(
            id=str(d["id"]),
            text=str(d["text"]),
            query_type=str(d.get("query_type", "")),
            theme=str(d.get("theme", "")),
            source=str(d.get("source", "web")),
            stratum=str(d.get("stratum", "")),
        )
        if rec.source not in SOURCES:
            raise CorpusError(f"record {rec.id}: unknown source {rec.source!r}")
        return rec

    def to_json(self) -> str:
        return json.dumps(asdict(self), ensure_ascii=False, sort_keys=True)


@dataclass
class CorpusManifest:
    record_count: int
    per_source: dict[str, int]
    per_stratum: dict[str, int]
    dedup_threshold: float
    dedup_pairs_removed: int
    dedup_field: str = "text"
    rejected: int = 0

    def to_json(self) -> str:
        return json.dumps(asdict(self), ensure_ascii=False, sort_keys=True, indent=2)


def clean_text(raw: str, lowercase: bool = False) -> str:
    """Normalize to NFC, strip markup and control characters, collapse whitespace.

    Case is preserved unless `lowercase` is set. Raises EmptyTextError if
    nothing survives cleaning.
    """
    text = unicodedata.normalize("NFC", raw)
    text = _TAG_RE.sub(" ", text)
    text = "".join(c for c in text if unicodedata.category(c) != "Cc" or c in "\n\t ")
    text = _WS_RE.sub(" ", text).strip()
    if lowercase:
        text = text.lower()
    if not text:
        raise EmptyTextError("text is empty after cleaning")
    return text


def dedup(
    records: list[QueryRecord],
    threshold: float = 0.95,
    blocking: bool = True,
) -> tuple[list[QueryRecord], list[tuple[str, str, float]]]:
    """Drop records whose text is more than `threshold`-similar to an earlier one.

    The first record in input order wins. Returns (kept, removed_pairs)
    where each removed pair is (kept_id, removed_id, similarity).

    With `blocking`, candidates whose lengths differ by at least
    (1 - threshold) * max_len are skipped: such a pair cannot exceed the
    threshold because the distance is bounded below by the length gap, so
    blocking is exact, not approximate.
    """
    if not 0.0 < threshold <= 1.0:
        raise CorpusError(f"threshold must be in (0, 1], got {threshold}")
    kept: list[QueryRecord] = []
    removed: list[tuple[str, str, float]] = []
    for rec in records:
        lr = len(rec.text)
        match = None
        for prev in kept:
            lp = len(prev.text)
            m = max(lr, lp)
            if blocking and m > 0 and abs(lr - lp) >= (1.0 - threshold) * m:
                continue
            sim = similarity(rec.text, prev.text)
            if sim > threshold:
                match = (prev.id, rec.id, sim)
                break
        if match is None:
            kept.append(rec)
        else:
            removed.append(match)
    return kept, removed


def stratified_sample(
    records: list[QueryRecord],
    strata_spec: dict[str, float] | None,
    n: int,
    seed: int,
) -> list[QueryRecord]:
    """Proportional per-stratum sample with largest-remainder rounding.

    `strata_spec` maps stratum label to a nonnegative weight; None means
    proportions are inferred from the record counts. Deterministic for a
    given seed; output preserves input order.
    """
    if n > len(records):
        raise CorpusError(f"cannot sample {n} from {len(records)} records")
    by_stratum: dict[str, list[QueryRecord]] = {}
    for rec in records:
        by_stratum.setdefault(rec.stratum, []).append(rec)

    if strata_spec is None:
        weights = {s: float(len(rs)) for s, rs in by_stratum.items()}
    else:
        weights = {s: float(w) for s, w in strata_spec.items()}
        for s, w in sorted(weights.items()):
            if w > 0 and not by_stratum.get(s):
                raise CorpusError(f"stratum {s!r} has no records but nonzero allocation")

    total_w = sum(weights.values())
    if total_w <= 0:
        raise CorpusError("strata weights sum to zero")

    # largest-remainder apportionment, capped by stratum size
    exact = {s: n * w / total_w for s, w in weights.items()}
    alloc = {s: int(exact[s]) for s in weights}
    remainders = sorted(
        weights, key=lambda s: (-(exact[s] - alloc[s]), s)
    )
    short = n - sum(alloc.values())
    for s in remainders[:short]:
        alloc[s] += 1
    for s in sorted(alloc):
        if alloc[s] > len(by_stratum.get(s, [])):
            raise CorpusError(f"stratum {s!r} has {len(by_stratum.get(s, []))} records, "
                              f"allocation {alloc[s]}")

    rng = random.Random(seed)
    chosen_ids: set[str] = set()
    for s in sorted(alloc):
        pool = by_stratum.get(s, [])
        for rec in rng.sample(pool, alloc[s]):
            chosen_ids.add(rec.id)
    return [r for r in records if r.id in chosen_ids]


def read_jsonl(path: str | Path) -> list[QueryRecord]:
    out = []
    with open(path, encoding="utf-8") as f:
        for line in f:
            line = line.strip()
            if line:
                out.append(QueryRecord.from_json(line))
    ids = [r.id for r in out]
    if len(set(ids)) != len(ids):
        dupes = sorted({i for i in ids if ids.count(i) > 1})
        raise CorpusError(f"duplicate record ids: {dupes}")
    return out


def write_jsonl(records: Iterable[QueryRecord], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        for rec in records:
            f.write(rec.to_json() + "\n")


def build_manifest(
    kept: list[QueryRecord],
    removed: list[tuple[str, str, float]],
    threshold: float,
    rejected: int = 0,
) -> CorpusManifest:
    per_source: dict[str, int] = {}
    per_stratum: dict[str, int] = {}
    for rec in kept:
        per_source[rec.source] = per_source.get(rec.source, 0) + 1
        per_stratum[rec.stratum] = per_stratum.get(rec.stratum, 0) + 1
    return CorpusManifest(
        record_count=len(kept),
        per_source=per_source,
        per_stratum=per_stratum,
        dedup_threshold=threshold,
        dedup_pairs_removed=len(removed),
        rejected=rejected,
    )
