"""Provider-agnostic LLM bridge: prompt templates, completion with
record/replay transcripts, and strict parsing of responses into insights
and framework analyses.

LLM output is treated as untrusted input: everything is parsed, validated
against the same schema invariants as the rule path, and truncated. With
``mode="replay"`` and a shipped transcript no network access happens at
all.
"""

from __future__ import annotations

import datetime as dt
import hashlib
import json
import os
import re
import string
from dataclasses import dataclass, field

from .frameworks import (
    FrameworkSchema,
    OrganizedAnalysis,
    validate_analysis,
)
from .insights import Insight

DEFAULT_API_KEY_ENV = "STRATAGEM_LLM_API_KEY"
LLM_FIT = 0.7  # fixed fit for LLM-proposed slot assignments
LLM_MAGNITUDE = 0.5  # LLMs provide no calibrated strength

PROMPT_TEMPLATES = {
    "trend_training_data": (
        "Based on your training data knowledge, describe the recent trend "
        "in the income statement from {company}."
    ),
    "trend_timeseries": "Describe the trend in this timeseries data.\n{data_block}",
    "insights_tabular": (
        "Given the data below, what insights can you derive about {company}?\n"
        "{data_block}"
    ),
    "framework_analysis": "Do a {framework} analysis of {company}",
    "one_shot_diagram": (
        "Do a {framework} for on the company {company} and create the standard "
        "2x2 grid as HTML DIV or HTML SVG, include no more than {max_per_slot} "
        "factors per cell and at least 5-10 words per each factor in each cell. "
        "Your factors can include metrics available to you as of your last update."
    ),
}


class LlmError(Exception):
    pass


class MissingBinding(LlmError):
    def __init__(self, template_id: str, name: str):
        self.name = name
        super().__init__(f"template {template_id!r} missing binding {name!r}")


class AuthMissing(LlmError):
    pass


class Timeout(LlmError):
    pass


class HttpStatus(LlmError):
    def __init__(self, code: int, body: str = ""):
        self.code = code
        super().__init__(f"HTTP status {code}")


class ReplayMiss(LlmError):
    def __init__(self, request_hash: str):
        self.request_hash = request_hash
        super().__init__(
            f"no transcript entry for request {request_hash} (fixture drift?)"
        )


class NoItemsFound(LlmError):
    pass


class NoSlotHeadings(LlmError):
    def __init__(self, message: str, refusal: bool = False):
        self.refusal = refusal
        super().__init__(message)


def render_prompt(template_id: str, bindings: dict[str, str]) -> str:
    """Exact template substitution, byte-deterministic."""
    template = PROMPT_TEMPLATES[template_id]
    fields = {
        name for _, name, _, _ in string.Formatter().parse(template) if name
    }
    for name in fields:
        if name not in bindings:
            raise MissingBinding(template_id, name)
    return template.format(**{k: str(v) for k, v in bindings.items()})


def request_hash(template_id: str, bindings: dict[str, str]) -> str:
    """Canonical request key: template id plus sorted bindings, so cosmetic
    whitespace in transports cannot invalidate fixtures."""
    canon = json.dumps(
        {"template": template_id, "bindings": {k: str(bindings[k]) for k in sorted(bindings)}},
        sort_keys=True,
        separators=(",", ":"),
    )
    return hashlib.sha256(canon.encode("utf-8")).hexdigest()


def prompt_hash(prompt: str) -> str:
    canon = " ".join(prompt.split())
    return hashlib.sha256(("prompt:" + canon).encode("utf-8")).hexdigest()


@dataclass(frozen=True)
class ProviderConfig:
    model: str
    endpoint: str = "https://api.openai.com/v1/chat/completions"
    api_key_env: str = DEFAULT_API_KEY_ENV
    timeout: float = 60.0
    mode: str = "live"  # live | record | replay
    transcript_path: str | None = None
    adapter: str = "openai-compatible"

    def __post_init__(self):
        if self.mode not in ("live", "record", "replay"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.mode in ("record", "replay") and not self.transcript_path:
            raise ValueError(f"{self.mode} mode requires a transcript path")


@dataclass
class LlmTranscript:
    records: list[dict] = field(default_factory=list)

    @classmethod
    def load(cls, path: str) -> "LlmTranscript":
        records = []
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if line:
                    records.append(json.loads(line))
        hashes = [r["request_hash"] for r in records]
        if len(set(hashes)) != len(hashes):
            raise ValueError(f"duplicate request hashes in transcript {path}")
        return cls(records=records)

    def lookup(self, request_hash_: str) -> str | None:
        for r in self.records:
            if r["request_hash"] == request_hash_:
                return r["response"]
        return None

    @staticmethod
    def append_record(path: str, request_hash_: str, request: str, response: str) -> None:
        record = {
            "request_hash": request_hash_,
            "request": request,
            "response": response,
            "timestamp": dt.datetime.now(dt.timezone.utc).isoformat(),
        }
        with open(path, "a", encoding="utf-8") as fh:
            fh.write(json.dumps(record, ensure_ascii=False) + "\n")


def _http_complete(config: ProviderConfig, prompt: str) -> str:
    import requests

    api_key = os.environ.get(config.api_key_env)
    if not api_key:
        raise AuthMissing(f"environment variable {config.api_key_env} is not set")
    body = {
        "model": config.model,
        "messages": [{"role": "user", "content": prompt}],
    }
    try:
        resp = requests.post(
            config.endpoint,
            json=body,
            headers={"Authorization": f"Bearer {api_key}"},
            timeout=config.timeout,
        )
    except requests.Timeout as exc:
        raise Timeout(str(exc)) from exc
    if resp.status_code != 200:
        raise HttpStatus(resp.status_code, resp.text)
    data = resp.json()
    return data["choices"][0]["message"]["content"]


def complete(
    config: ProviderConfig,
    prompt: str,
    request_key: str | None = None,
) -> str:
    """One chat-completion round trip, transcript append, or replay lookup."""
    key = request_key or prompt_hash(prompt)
    if config.mode == "replay":
        transcript = LlmTranscript.load(config.transcript_path)
        response = transcript.lookup(key)
        if response is None:
            raise ReplayMiss(key)
        return response
    response = _http_complete(config, prompt)
    if config.mode == "record":
        LlmTranscript.append_record(config.transcript_path, key, prompt, response)
    return response


def ask(config: ProviderConfig, template_id: str, bindings: dict[str, str]) -> str:
    """Render a template and complete it, keyed by the canonical request hash."""
    prompt = render_prompt(template_id, bindings)
    return complete(config, prompt, request_key=request_hash(template_id, bindings))


# ---------------------------------------------------------------------------
# response parsing

_BULLET_RE = re.compile(r"^\s*(?:[-*•●]|\d+[.)])\s+(.*)$")
_BOLD_LABEL_RE = re.compile(r"^\*{1,2}(?P<label>[^*]+?):?\*{1,2}:?\s*(?P<rest>.*)$")
_PLAIN_LABEL_RE = re.compile(r"^(?P<label>[A-Z][^:]{2,60}):\s+(?P<rest>\S.*)$")

_POSITIVE_WORDS = (
    "grow", "strong", "high", "highest", "efficient", "effective", "positive",
    "robust", "steady", "success", "improve", "well-managed", "diverse", "wide",
    "leading", "expansion", "increase",
)
_NEGATIVE_WORDS = (
    "weak", "decline", "negative", "risk", "low", "poor", "dependence",
    "challenge", "threat", "concern", "loss", "decrease", "intense competition",
    "not optimized", "downturn", "underdeveloped",
)

_THEME_TEXT_KEYWORDS = (
    (("online", "e-commerce", "ecommerce", "digital"), "online-channel"),
    (("brand", "awareness", "marketing", "media spend", "advertis"), "brand-marketing"),
    (("supply chain", "shipment", "logistics", "delay", "inventory"), "supply-chain"),
    (("profit", "margin", "income", "earnings", "tax"), "profitability"),
    (("product", "categor", "portfolio", "range of products"), "product-diversity"),
    (("sentiment", "perception", "reputation", "publicity"), "public-sentiment"),
    (("competition", "competitor", "rival", "amazon", "market share"), "competition"),
    (("revenue growth", "growth", "expansion", "emerging markets"), "growth"),
    (("store", "presence", "countries", "global", "physical", "network"), "market-presence"),
    (("cost", "spend", "price fluctuation", "commodity"), "cost"),
)


def _direction_of(text: str) -> str:
    low = text.lower()
    pos = sum(1 for w in _POSITIVE_WORDS if w in low)
    neg = sum(1 for w in _NEGATIVE_WORDS if w in low)
    if pos > neg:
        return "positive"
    if neg > pos:
        return "negative"
    return "neutral"


def _themes_of(text: str) -> frozenset[str]:
    low = text.lower()
    found = {
        theme
        for keywords, theme in _THEME_TEXT_KEYWORDS
        if any(kw in low for kw in keywords)
    }
    return frozenset(found)


def _clip_words(text: str, low: int, high: int, context: str = "") -> str:
    words = text.split()
    if len(words) > high:
        words = words[:high]
    if len(words) < low and context:
        words = (context + " " + " ".join(words)).split()[:high]
    if len(words) < low:
        words = (words + ["(from", "the", "model", "response", "text)"])[:high]
    return " ".join(words)


def _extract_items(response: str) -> list[tuple[str, str]]:
    """Top-level list items as (label, text); nested lines fold into their parent."""
    items: list[list[str]] = []
    current: list[str] | None = None
    for raw in response.splitlines():
        line = raw.rstrip()
        if not line.strip():
            continue
        m = _BULLET_RE.match(line)
        indent = len(line) - len(line.lstrip())
        if m and indent <= 3:
            current = [m.group(1).strip()]
            items.append(current)
        elif current is not None:
            current.append(line.strip())
    out = []
    for parts in items:
        text = " ".join(parts)
        label = ""
        m = _BOLD_LABEL_RE.match(text)
        if m:
            label = m.group("label").strip().rstrip(":")
            text = m.group("rest").strip()
        else:
            m = _PLAIN_LABEL_RE.match(text)
            if m and len(m.group("label").split()) <= 6:
                label = m.group("label").strip()
                text = m.group("rest").strip()
        out.append((label, text))
    return out


def parse_insight_list(response: str, model_label: str = "llm") -> list[Insight]:
    """Bullet, numbered, or bold-heading items -> Insights with llm provenance."""
    items = _extract_items(response)
    if not items:
        raise NoItemsFound("response has no recognizable list structure")
    insights = []
    for i, (label, text) in enumerate(items):
        full = f"{label}: {text}" if label else text
        statement = _clip_words(text or label, 5, 40, context=label)
        insights.append(
            Insight(
                id=f"llm:{i:02d}",
                statement=statement,
                direction=_direction_of(full),
                magnitude=LLM_MAGNITUDE,
                themes=_themes_of(full),
                evidence=(),
                provenance=f"llm:{model_label}",
            )
        )
    return insights


_SLOT_SYNONYMS = {
    "strengths": ("strengths", "strength"),
    "weaknesses": ("weaknesses", "weakness"),
    "opportunities": ("opportunities", "opportunity"),
    "threats": ("threats", "threat"),
    "rivalry": ("competitive rivalry", "rivalry", "industry rivalry"),
    "supplier_power": ("supplier power", "bargaining power of suppliers"),
    "buyer_power": ("buyer power", "bargaining power of buyers"),
    "new_entrants": ("threat of new entrants", "new entrants"),
    "substitutes": ("threat of substitutes", "substitutes"),
    "operational_excellence": ("operational excellence", "operational efficiency"),
    "product_leadership": ("product leadership", "product innovation"),
    "customer_intimacy": ("customer intimacy", "customer relationships"),
}

_REFUSAL_MARKERS = (
    "lacks specific data",
    "cannot determine",
    "unable to",
    "not enough information",
    "cannot provide",
    "i cannot",
)

_HEADING_RE = re.compile(r"^\s*(?:#+\s*)?\*{0,2}(?P<head>[A-Za-z][A-Za-z' ]{2,50}?)\*{0,2}:?\s*$")


@dataclass(frozen=True)
class ParseDiagnostic:
    kind: str  # unmatched-heading | overflow | empty-slot
    detail: str


def parse_framework_assignment(
    response: str,
    schema: FrameworkSchema,
    model_label: str = "llm",
) -> tuple[OrganizedAnalysis, list[ParseDiagnostic]]:
    """Match slot headings and collect their items into a validated analysis."""
    synonyms: dict[str, str] = {}
    for slot in schema.slots:
        synonyms[slot.title.lower()] = slot.id
        synonyms[slot.id.replace("_", " ")] = slot.id
        for syn in _SLOT_SYNONYMS.get(slot.id, ()):
            synonyms[syn] = slot.id
    sections: dict[str, list[str]] = {slot.id: [] for slot in schema.slots}
    diagnostics: list[ParseDiagnostic] = []
    current: str | None = None
    saw_heading = False
    for raw in response.splitlines():
        line = raw.strip()
        if not line:
            continue
        m = _HEADING_RE.match(line)
        if m:
            head = m.group("head").strip().lower()
            slot_id = synonyms.get(head)
            if slot_id:
                current = slot_id
                saw_heading = True
            else:
                current = None
                diagnostics.append(ParseDiagnostic("unmatched-heading", m.group("head").strip()))
            continue
        bullet = _BULLET_RE.match(raw)
        if bullet and current:
            sections[current].append(bullet.group(1).strip())
        elif current and sections[current]:
            sections[current][-1] += " " + line
    if not saw_heading:
        low = response.lower()
        refusal = any(marker in low for marker in _REFUSAL_MARKERS)
        message = (
            "model declined to produce the analysis"
            if refusal
            else "no slot headings recognized in response"
        )
        raise NoSlotHeadings(message, refusal=refusal)
    counter = 0
    placed: list[tuple[str, Insight]] = []
    for slot in schema.slots:
        texts = sections[slot.id]
        if not texts:
            diagnostics.append(ParseDiagnostic("empty-slot", slot.id))
        if len(texts) > schema.max_per_slot:
            diagnostics.append(
                ParseDiagnostic(
                    "overflow",
                    f"{slot.id}: {len(texts)} items, keeping {schema.max_per_slot}",
                )
            )
        for text in texts:
            label = ""
            m = _BOLD_LABEL_RE.match(text)
            if m:
                label = m.group("label").strip().rstrip(":")
                text = m.group("rest").strip() or label
            statement = _clip_words(text, 5, 40, context=label)
            placed.append(
                (
                    slot.id,
                    Insight(
                        id=f"llm:{counter:02d}",
                        statement=statement,
                        direction=_direction_of((label + " " + text).strip()),
                        magnitude=LLM_MAGNITUDE,
                        themes=_themes_of((label + " " + text).strip()),
                        evidence=(),
                        provenance=f"llm:{model_label}",
                    ),
                )
            )
            counter += 1
    analysis = _assemble(placed, schema)
    violations = validate_analysis(analysis)
    if violations:
        # validation firewall: model output can never inject an
        # invariant-violating analysis downstream
        raise LlmError(
            "parsed analysis violates invariants: "
            + "; ".join(v.message for v in violations)
        )
    return analysis, diagnostics


def _assemble(placed: list[tuple[str, Insight]], schema: FrameworkSchema) -> OrganizedAnalysis:
    """Build an analysis that honors truncation and attribute invariants by
    reusing the frameworks machinery with forced slot assignment."""
    from .frameworks import assign_risk, score_axis

    assignments: dict[str, list[tuple[Insight, float]]] = {s.id: [] for s in schema.slots}
    overflow: dict[str, list[tuple[Insight, float]]] = {}
    for slot_id, ins in placed:
        assignments[slot_id].append((ins, LLM_FIT))
    for slot_id, items in assignments.items():
        items.sort(key=lambda p: (-(p[1] * p[0].magnitude), p[0].id))
        if len(items) > schema.max_per_slot:
            overflow[slot_id] = items[schema.max_per_slot:]
            assignments[slot_id] = items[: schema.max_per_slot]
    attributes: dict[str, object] = {}
    for slot in schema.slots:
        if schema.kind == "porter5":
            attributes[slot.id] = assign_risk(assignments[slot.id])
        elif schema.kind == "value_discipline":
            attributes[slot.id] = score_axis(assignments[slot.id])
        else:
            attributes[slot.id] = None
    return OrganizedAnalysis(
        schema=schema,
        subject="",
        assignments=assignments,
        slot_attributes=attributes,
        overflow=overflow,
        unplaced=[],
    )
