"""Deterministic canned responders for mock:// endpoints.

These stand in for live model servers in tests and synthetic runs. Each
responder is a pure function of (endpoint config, prompt, variant,
repeat), so cached and fresh runs agree byte for byte and no network is
ever touched.

Endpoints:
  mock://coverage?base=K&opt=K2&quant=1&filler=N
      Emits the first K (baseline) or K2 (optimized) general-element
      lexicon phrases, one sentence each, optionally with a numeric
      detail in the same sentence, followed by N characters of filler.
  mock://judge?center=C&spread=D
      Emits a JSON Likert score object; scores are a stable hash of the
      prompt plus the repeat index, clamped to [1, 7] around C.
"""
from __future__ import annotations

import hashlib
import json
from urllib.parse import parse_qs, urlparse

from lettot.framework import RUBRIC_DIMENSION_IDS, load_framework
from lettot.gateway import GatewayError, ModelConfig

_FRAMEWORK = None


def _framework():
    global _FRAMEWORK
    if _FRAMEWORK is None:
        _FRAMEWORK = load_framework()
    return _FRAMEWORK


def _params(url: str) -> tuple[str, dict[str, str]]:
    parsed = urlparse(url)
    q = {k: v[0] for k, v in parse_qs(parsed.query).items()}
    return parsed.netloc, q


def _digest(*parts: object) -> int:
    h = hashlib.sha256("|".join(str(p) for p in parts).encode("utf-8")).hexdigest()
    return int(h, 16)


def _coverage_response(q: dict[str, str], prompt: str, variant: str) -> str:
    k = int(q.get("opt" if variant == "optimized" else "base", "4"))
    quant = q.get("quant", "1") == "1"
    filler = int(q.get("filler", "0"))

    fw = _framework()
    phrases = [e.lexicon[0] for e in fw.general_elements][:k]
    ref = hashlib.sha1(prompt.encode("utf-8")).hexdigest()[:12]
    sentences = [f"ref {ref}."]
    for i, phrase in enumerate(phrases):
        if quant:
            sentences.append(f"Consider {phrase} with about {100 + i} options.")
        else:
            sentences.append(f"Consider {phrase} here.")
    body = " ".join(sentences)
    if filler:
        pad = ("lorem ipsum " * (filler // 12 + 1))[:filler]
        body = f"{body} {pad}"
    return body


def _judge_response(q: dict[str, str], prompt: str, repeat: int) -> str:
    center = int(q.get("center", "4"))
    spread = int(q.get("spread", "2"))
    scores = {}
    for dim in RUBRIC_DIMENSION_IDS:
        delta = _digest(prompt, dim, repeat) % (2 * spread + 1) - spread
        scores[dim] = max(1, min(7, center + delta))
    return json.dumps(scores)


def respond(model: ModelConfig, prompt: str, variant: str, repeat: int = 0) -> str:
    kind, q = _params(model.endpoint_url)
    if kind == "coverage":
        return _coverage_response(q, prompt, variant)
    if kind == "judge":
        return _judge_response(q, prompt, repeat)
    raise GatewayError(f"unknown mock endpoint: {model.endpoint_url}")
