"""Shared fixtures and generators for the test suite."""

from __future__ import annotations

import random
import socket
from pathlib import Path

import pytest

from stratagem import frameworks, ingest
from stratagem.insights import Evidence, Insight, THEME_TAGS

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture(scope="session")
def foobar_text() -> str:
    return (FIXTURES / "foobar.tsv").read_text(encoding="utf-8")


@pytest.fixture(scope="session")
def foobar_dataset(foobar_text) -> ingest.Dataset:
    return ingest.parse_table(foobar_text)


@pytest.fixture(scope="session")
def prices_text() -> str:
    return (FIXTURES / "prices.tsv").read_text(encoding="utf-8")


@pytest.fixture(scope="session")
def prices_series(prices_text) -> ingest.TimeSeries:
    return ingest.parse_timeseries(prices_text)


@pytest.fixture(scope="session")
def walmart_transcript() -> Path:
    return FIXTURES / "walmart.jsonl"


@pytest.fixture
def no_network(monkeypatch):
    """Any attempt to open a socket fails loudly for the duration of a test."""

    def _blocked(*args, **kwargs):
        raise AssertionError("network access attempted during an offline test")

    monkeypatch.setattr(socket.socket, "connect", _blocked)
    monkeypatch.setattr(socket, "create_connection", _blocked)


# ---------------------------------------------------------------------------
# random generators (plain `random` so tests control their own seeds)

_WORDS = (
    "revenue margin stores online brand supply growth market customer product "
    "channel spend sentiment media profit delay category presence awareness "
    "network strong weak rising falling share quarterly performance peers "
    "expansion pricing logistics inventory retail segment volume trend"
).split()


def random_statement(rng: random.Random, low: int = 5, high: int = 16) -> str:
    n = rng.randint(low, high)
    return " ".join(rng.choice(_WORDS) for _ in range(n)).capitalize() + "."


def random_insight(rng: random.Random, index: int) -> Insight:
    direction = rng.choice(("positive", "negative", "neutral"))
    themes = frozenset(rng.sample(THEME_TAGS, rng.randint(1, 2)))
    return Insight(
        id=f"gen:{index:03d}",
        statement=random_statement(rng),
        direction=direction,
        magnitude=round(rng.uniform(0.05, 1.0), 3),
        themes=themes,
        evidence=(
            Evidence(kind="metric-value", refs=(f"metric-{index}",), value=rng.uniform(0, 100)),
        ),
        provenance="rule:generated",
    )


def random_insights(rng: random.Random, n: int) -> list[Insight]:
    return [random_insight(rng, i) for i in range(n)]


def random_analysis(rng: random.Random, kind: str) -> frameworks.OrganizedAnalysis:
    schema = frameworks.schema_for(kind)
    insights = random_insights(rng, rng.randint(0, 14))
    subject = rng.choice(("Foobar Corp", "Acme LLP", "Roy G Biv", ""))
    return frameworks.organize(insights, schema, subject=subject)
