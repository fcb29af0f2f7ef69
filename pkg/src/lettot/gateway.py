"""Model access layer: prompt construction, chat-completions HTTP calls,
deterministic response caching, and judge-output parsing.

Every completion is cached under a key derived from the full request
(model, variant, prompt, sampling params, template hash, repeat index),
so a finished run replays from disk without touching the network.
Endpoints with a mock:// URL are served by deterministic canned
responders (see lettot.mock), which is how tests and synthetic runs
avoid live model dependencies.
"""
from __future__ import annotations

import hashlib
import json
import os
import re
import sys
import time
from dataclasses import dataclass, field, asdict
from importlib import resources
from pathlib import Path

import requests

from lettot.corpus import QueryRecord
from lettot.framework import ElementFramework, RUBRIC_DIMENSION_IDS

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

VARIANTS = ("baseline", "optimized")

DEFAULT_RETRIES = 3
BACKOFF_BASE_S = 0.5


class GatewayError(Exception):
    pass


class JudgeParseError(GatewayError):
    """Judge completion did not yield a valid 7-dimension score map."""

    def __init__(self, message: str, key: str | None = None):
        super().__init__(message)
        self.key = key


@dataclass(frozen=True)
class ModelConfig:
    model_id: str
    endpoint_url: str
    api_key_env: str = ""
    temperature: float = 0.0
    max_tokens: int = 2048
    reasoning_flag: bool = False
    notes: str = ""

    def __post_init__(self) -> None:
        if not (self.temperature >= 0 and self.temperature == self.temperature):
            raise GatewayError(f"temperature must be finite and >= 0, got {self.temperature}")


@dataclass
class ResponseRecord:
    query_id: str
    model_id: str
    variant: str
    prompt_text: str
    response_text: str
    char_length: int
    created_at: str
    cache_key: str
    repeat: int = 0
    framework_checksum: str = ""

    def to_json(self) -> str:
        return json.dumps(asdict(self), ensure_ascii=False, sort_keys=True)

    @classmethod
    def from_json(cls, line: str) -> "ResponseRecord":
        return cls(**json.loads(line))


def load_models(path: str | Path) -> list[ModelConfig]:
    """Read model presets from a TOML file with one [[models]] table per model."""
    with open(path, "rb") as f:
        doc = tomllib.load(f)
    models = [ModelConfig(**entry) for entry in doc.get("models", [])]
    ids = [m.model_id for m in models]
    if len(set(ids)) != len(ids):
        raise GatewayError("duplicate model_id in model presets")
    if not models:
        raise GatewayError(f"no models defined in {path}")
    return models


def default_template() -> str:
    return resources.files("lettot").joinpath("data/prompt_template.txt").read_text("utf-8")


def template_hash(template: str) -> str:
    return hashlib.sha256(template.encode("utf-8")).hexdigest()[:16]


def build_optimized_prompt(
    query: QueryRecord, framework: ElementFramework, template: str | None = None
) -> str:
    """Render the query plus its category's general elements and its theme's hierarchy."""
    from lettot.framework import QueryType

    try:
        qt = QueryType(query.query_type)
    except ValueError:
        raise GatewayError(f"unknown query type: {query.query_type!r}") from None
    theme = next((t for t in framework.themes if t.id == query.theme), None)
    if theme is None:
        raise GatewayError(f"unknown theme: {query.theme!r}")

    general = "\n".join(f"- {e.name}" for e in framework.general_for(qt))
    specific_lines = []
    for elem in framework.specific_for(query.theme):
        specific_lines.append(f"- {elem.name}:")
        specific_lines.extend(f"  - {sub.name}" for sub in elem.sub_elements)
    tpl = template if template is not None else default_template()
    return tpl.format(
        query_type=qt.value,
        theme_name=theme.display_name,
        query_text=query.text,
        general_elements=general,
        specific_elements="\n".join(specific_lines),
    )


def build_prompt(
    query: QueryRecord,
    variant: str,
    framework: ElementFramework | None = None,
    template: str | None = None,
) -> str:
    if variant == "baseline":
        return query.text  # raw input, no expert scaffolding
    if variant == "optimized":
        if framework is None:
            raise GatewayError("optimized variant requires a framework")
        return build_optimized_prompt(query, framework, template)
    raise GatewayError(f"unknown prompt variant: {variant!r}")


def cache_key(
    model: ModelConfig, variant: str, prompt: str, tpl_hash: str, repeat: int = 0
) -> str:
    payload = json.dumps(
        [model.model_id, variant, prompt, model.temperature, model.max_tokens,
         tpl_hash, repeat],
        ensure_ascii=False, sort_keys=True,
    )
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


class ResponseCache:
    """Content-addressed on-disk cache of ResponseRecords."""

    def __init__(self, root: str | Path):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)

    def _path(self, key: str) -> Path:
        return self.root / key[:2] / f"{key}.json"

    def get(self, key: str) -> ResponseRecord | None:
        p = self._path(key)
        if not p.exists():
            return None
        return ResponseRecord.from_json(p.read_text("utf-8"))

    def put(self, record: ResponseRecord) -> None:
        p = self._path(record.cache_key)
        p.parent.mkdir(parents=True, exist_ok=True)
        tmp = p.with_suffix(".tmp")
        tmp.write_text(record.to_json(), "utf-8")
        tmp.replace(p)


class HttpTransport:
    """Chat-completions-style HTTP client with bounded retries and exponential backoff."""

    def __init__(self, retries: int = DEFAULT_RETRIES, timeout_s: float = 120.0):
        self.retries = retries
        self.timeout_s = timeout_s
        self.calls = 0

    def complete(self, model: ModelConfig, prompt: str, variant: str, query_id: str) -> str:
        headers = {"Content-Type": "application/json"}
        if model.api_key_env:
            key = os.environ.get(model.api_key_env, "")
            if key:
                headers["Authorization"] = f"Bearer {key}"
        payload = {
            "model": model.model_id,
            "messages": [{"role": "user", "content": prompt}],
            "temperature": model.temperature,
            "max_tokens": model.max_tokens,
        }
        last_err: Exception | None = None
        for attempt in range(self.retries):
            if attempt:
                time.sleep(BACKOFF_BASE_S * 2 ** (attempt - 1))
            self.calls += 1
            try:
                resp = requests.post(
                    model.endpoint_url, json=payload, headers=headers, timeout=self.timeout_s
                )
                resp.raise_for_status()
                body = resp.json()
                return body["choices"][0]["message"]["content"]
            except (requests.RequestException, KeyError, IndexError, ValueError) as exc:
                last_err = exc
        raise GatewayError(
            f"request to {model.model_id} failed after {self.retries} attempts: {last_err}"
        )


def _now_iso() -> str:
    return time.strftime("%Y-%m-%dT%H:%M:%S", time.gmtime())


def generate(
    query: QueryRecord,
    model: ModelConfig,
    variant: str,
    framework: ElementFramework | None = None,
    cache: ResponseCache | None = None,
    transport: HttpTransport | None = None,
    template: str | None = None,
    repeat: int = 0,
) -> ResponseRecord:
    """Return the model's completion for (query, variant), served from cache when possible."""
    prompt = build_prompt(query, variant, framework, template)
    tpl = template if template is not None else default_template()
    key = cache_key(model, variant, prompt, template_hash(tpl), repeat)

    if cache is not None:
        hit = cache.get(key)
        if hit is not None:
            return hit

    if model.endpoint_url.startswith("mock://"):
        from lettot import mock

        text = mock.respond(model, prompt, variant, repeat)
    else:
        transport = transport or HttpTransport()
        text = transport.complete(model, prompt, variant, query.id)
    if not text:
        raise GatewayError(f"empty completion from {model.model_id} for query {query.id}")

    record = ResponseRecord(
        query_id=query.id,
        model_id=model.model_id,
        variant=variant,
        prompt_text=prompt,
        response_text=text,
        char_length=len(text),
        created_at=_now_iso(),
        cache_key=key,
        repeat=repeat,
        framework_checksum=framework.checksum if framework is not None else "",
    )
    if cache is not None:
        cache.put(record)
    return record


JUDGE_INSTRUCTIONS = (
    "Score the answer on each dimension from 1 (worst) to 7 (best). "
    'Reply with ONLY a JSON object like {"Rel": 5, "Cxt": 5, "Log": 5, '
    '"Cr": 5, "Acc": 5, "Comp": 5, "Prac": 5}.'
)

REPAIR_INSTRUCTIONS = (
    "Your previous reply was not a valid score object. "
    "Reply with ONLY the JSON object of integer scores 1-7 for all seven dimensions."
)

_JSON_RE = re.compile(r"\{[^{}]*\}", re.DOTALL)


def build_judge_prompt(query_text: str, response_text: str, framework: ElementFramework) -> str:
    dims = "\n".join(
        f"- {d.id} ({d.name}): {d.description} 1 = {d.low_anchor} 7 = {d.high_anchor}"
        for d in framework.rubric
    )
    return (
        f"Evaluate the following answer to a travel question.\n\n"
        f"Question:\n{query_text}\n\nAnswer:\n{response_text}\n\n"
        f"Dimensions:\n{dims}\n\n{JUDGE_INSTRUCTIONS}"
    )


def parse_judge_scores(raw: str) -> dict[str, int]:
    """Extract and validate the 7-dimension integer score map from a judge completion."""
    m = _JSON_RE.search(raw)
    if m is None:
        raise JudgeParseError("no JSON object found in judge output")
    try:
        data = json.loads(m.group(0))
    except json.JSONDecodeError as exc:
        raise JudgeParseError(f"unparsable judge payload: {exc}") from exc
    if not isinstance(data, dict):
        raise JudgeParseError("judge payload is not an object")
    scores: dict[str, int] = {}
    for dim in RUBRIC_DIMENSION_IDS:
        if dim not in data:
            raise JudgeParseError(f"missing dimension: {dim}", key=dim)
        v = data[dim]
        if isinstance(v, float) and v.is_integer():
            v = int(v)
        if not isinstance(v, int) or isinstance(v, bool):
            raise JudgeParseError(f"dimension {dim} value {data[dim]!r} is not an integer",
                                  key=dim)
        if not 1 <= v <= 7:
            raise JudgeParseError(f"dimension {dim} score {v} outside 1-7", key=dim)
        scores[dim] = v
    return scores
