"""Parsing and normalization of tabular entity-metric data and timeseries data.

Input is UTF-8 delimited text with a header row. Missing or unparseable
cells become absent values (``None``), never zeros. Timeseries are always
re-sorted ascending by date so downstream rules see one canonical order.
"""

from __future__ import annotations

import csv
import datetime as dt
import io
import re
from dataclasses import dataclass


class IngestError(Exception):
    pass


class EmptyInput(IngestError):
    pass


class RaggedRows(IngestError):
    def __init__(self, row_index: int, expected: int, got: int):
        self.row_index = row_index
        super().__init__(
            f"row {row_index} has {got} cells, expected {expected}"
        )


class NoNumericData(IngestError):
    pass


class UnparseableDate(IngestError):
    def __init__(self, line: int, text: str):
        self.line = line
        super().__init__(f"line {line}: cannot parse date {text!r}")


class NonPositivePrice(IngestError):
    def __init__(self, line: int, value: float):
        self.line = line
        super().__init__(f"line {line}: non-positive price {value}")


class DuplicateDate(IngestError):
    def __init__(self, date: dt.date):
        self.date = date
        super().__init__(f"duplicate date {date.isoformat()}")


UNITS = ("count", "currency-millions", "percent", "days", "raw")
POLARITIES = ("higher-is-better", "lower-is-better", "neutral")

# Keyword tables for metric-semantics inference. Matching is on lowercased
# substrings; first hit wins within each table.
_UNIT_KEYWORDS = (
    ("($m)", "currency-millions"),
    ("(\\$m)", "currency-millions"),
    ("$m", "currency-millions"),
    ("revenue", "currency-millions"),
    ("spend", "currency-millions"),
    ("income", "currency-millions"),
    ("margin", "percent"),
    ("survey", "percent"),
    ("%", "percent"),
    ("growth", "percent"),
    ("delay", "days"),
    ("days", "days"),
    ("number", "count"),
    ("count", "count"),
    ("sentiment", "count"),
    ("stores", "count"),
)
_LOWER_KEYWORDS = ("delay", "negative", "cost", "churn", "complaint", "defect")
_HIGHER_KEYWORDS = (
    "revenue",
    "positive",
    "awareness",
    "spend",
    "margin",
    "profit",
    "income",
    "growth",
    "stores",
    "countries",
    "categories",
)


@dataclass(frozen=True)
class MetricDescriptor:
    name: str
    unit: str = "raw"
    polarity: str = "neutral"

    def __post_init__(self):
        if not self.name:
            raise ValueError("metric name must be non-empty")
        if self.unit not in UNITS:
            raise ValueError(f"unknown unit {self.unit!r}")
        if self.polarity not in POLARITIES:
            raise ValueError(f"unknown polarity {self.polarity!r}")


def infer_metric_semantics(name: str) -> MetricDescriptor:
    """Build a MetricDescriptor from a metric name.

    Honors sidecar annotations ``!lower`` / ``!higher`` appended to the
    name (they are stripped from the stored name). Falls back to
    raw/neutral when no keyword matches.
    """
    if not name or not name.strip():
        raise ValueError("metric name must be non-empty")
    name = name.strip()
    forced = None
    m = re.search(r"\s*!(lower|higher)\s*$", name)
    if m:
        forced = "lower-is-better" if m.group(1) == "lower" else "higher-is-better"
        name = name[: m.start()].strip()
    low = name.lower()
    unit = "raw"
    for kw, u in _UNIT_KEYWORDS:
        if kw in low:
            unit = u
            break
    polarity = "neutral"
    if any(kw in low for kw in _LOWER_KEYWORDS):
        polarity = "lower-is-better"
    elif any(kw in low for kw in _HIGHER_KEYWORDS):
        polarity = "higher-is-better"
    if forced:
        polarity = forced
    return MetricDescriptor(name=name, unit=unit, polarity=polarity)


@dataclass(frozen=True)
class Dataset:
    """Entity-by-metric value matrix; entities[0] is the analysis subject."""

    entities: tuple[str, ...]
    metrics: tuple[MetricDescriptor, ...]
    values: tuple[tuple[float | None, ...], ...]  # entity-major

    def __post_init__(self):
        if not self.entities:
            raise ValueError("dataset needs at least one entity")
        if any(not e for e in self.entities):
            raise ValueError("entity names must be non-empty")
        if len(set(self.entities)) != len(self.entities):
            raise ValueError("entity names must be unique")
        names = [m.name for m in self.metrics]
        if len(set(names)) != len(names):
            raise ValueError("metric names must be unique")
        if len(self.values) != len(self.entities):
            raise ValueError("value matrix row count != entity count")
        for row in self.values:
            if len(row) != len(self.metrics):
                raise ValueError("value matrix column count != metric count")

    @property
    def subject(self) -> str:
        return self.entities[0]

    def metric(self, name: str) -> MetricDescriptor:
        for m in self.metrics:
            if m.name == name:
                return m
        raise KeyError(name)

    def value(self, entity: str, metric_name: str) -> float | None:
        i = self.entities.index(entity)
        j = [m.name for m in self.metrics].index(metric_name)
        return self.values[i][j]


@dataclass(frozen=True, order=True)
class Observation:
    date: dt.date
    close: float
    volume: float


@dataclass(frozen=True)
class TimeSeries:
    observations: tuple[Observation, ...]

    def __post_init__(self):
        dates = [o.date for o in self.observations]
        if dates != sorted(dates):
            raise ValueError("observations must be date-ascending")
        if len(set(dates)) != len(dates):
            raise ValueError("duplicate observation dates")
        if any(o.close <= 0 for o in self.observations):
            raise ValueError("prices must be strictly positive")

    @property
    def closes(self) -> tuple[float, ...]:
        return tuple(o.close for o in self.observations)

    @property
    def dates(self) -> tuple[dt.date, ...]:
        return tuple(o.date for o in self.observations)


_NUM_RE = re.compile(r"^-?\d+(\.\d+)?([eE][+-]?\d+)?$")


def _parse_number(cell: str) -> float | None:
    s = cell.strip().replace(",", "").lstrip("$").rstrip("%").strip()
    if not s:
        return None
    if _NUM_RE.match(s):
        return float(s)
    return None


def _read_rows(text: str, dialect: str) -> list[list[str]]:
    delim = {"tab": "\t", "comma": ","}.get(dialect)
    if delim is None:
        raise ValueError(f"unknown dialect {dialect!r}")
    rows = [
        row
        for row in csv.reader(io.StringIO(text), delimiter=delim)
        if any(c.strip() for c in row)
    ]
    return rows


def parse_table(text: str, dialect: str = "tab") -> Dataset:
    """Parse a delimited entity-metric table into a Dataset.

    The first row is a header. Label orientation (metrics as rows vs
    entities as rows) is auto-detected: a header keyword wins, otherwise
    the longer axis is taken as the metric axis.
    """
    rows = _read_rows(text, dialect)
    if not rows:
        raise EmptyInput("no rows in input")
    header = [c.strip() for c in rows[0]]
    width = len(header)
    for i, row in enumerate(rows[1:], start=1):
        if len(row) != width:
            raise RaggedRows(i, width, len(row))
    body = [[c.strip() for c in row] for row in rows[1:]]
    if not body or width < 2:
        raise NoNumericData("table has no data cells")

    corner = header[0].lower()
    if "metric" in corner:
        metrics_as_rows = True
    elif "entity" in corner or "company" in corner:
        metrics_as_rows = False
    else:
        metrics_as_rows = len(body) >= width - 1

    if metrics_as_rows:
        entity_names = header[1:]
        metric_labels = [row[0] for row in body]
        # cells[metric][entity] -> transpose to entity-major
        grid = [[_parse_number(c) for c in row[1:]] for row in body]
        values = tuple(
            tuple(grid[j][i] for j in range(len(metric_labels)))
            for i in range(len(entity_names))
        )
    else:
        entity_names = [row[0] for row in body]
        metric_labels = header[1:]
        values = tuple(tuple(_parse_number(c) for c in row[1:]) for row in body)

    if not any(v is not None for row in values for v in row):
        raise NoNumericData("no numeric cells in table body")
    metrics = tuple(infer_metric_semantics(n) for n in metric_labels)
    return Dataset(entities=tuple(entity_names), metrics=metrics, values=values)


_DATE_FORMATS = ("%Y-%m-%d", "%m/%d/%Y")


def _parse_date(cell: str, line: int) -> dt.date:
    s = cell.strip()
    for fmt in _DATE_FORMATS:
        try:
            return dt.datetime.strptime(s, fmt).date()
        except ValueError:
            continue
    raise UnparseableDate(line, cell)


def parse_timeseries(text: str, dialect: str = "tab") -> TimeSeries:
    """Parse date/close/volume rows; output is always date-ascending."""
    rows = _read_rows(text, dialect)
    if not rows:
        raise EmptyInput("no rows in input")
    start = 1 if rows and not _looks_like_data_row(rows[0]) else 0
    obs = []
    for i, row in enumerate(rows[start:], start=start + 1):
        cells = [c.strip() for c in row]
        if len(cells) < 3:
            raise RaggedRows(i, 3, len(cells))
        date = _parse_date(cells[0], i)
        close = _parse_number(cells[1])
        volume = _parse_number(cells[2])
        if close is None or volume is None:
            raise RaggedRows(i, 3, len(cells))
        if close <= 0:
            raise NonPositivePrice(i, close)
        obs.append(Observation(date=date, close=close, volume=volume))
    if not obs:
        raise NoNumericData("no observations in input")
    seen: set[dt.date] = set()
    for o in obs:
        if o.date in seen:
            raise DuplicateDate(o.date)
        seen.add(o.date)
    return normalize_order_raw(obs)


def _looks_like_data_row(row: list[str]) -> bool:
    try:
        _parse_date(row[0], 0)
        return True
    except UnparseableDate:
        return False


def normalize_order_raw(obs: list[Observation]) -> TimeSeries:
    return TimeSeries(observations=tuple(sorted(obs, key=lambda o: o.date)))


def normalize_order(series: TimeSeries) -> TimeSeries:
    """Idempotent: re-sort observations ascending by date."""
    return normalize_order_raw(list(series.observations))


def _format_value(v: float | None) -> str:
    if v is None:
        return "NA"
    if v == int(v) and abs(v) < 1e15:
        return str(int(v))
    return repr(v)


def serialize_dataset(dataset: Dataset) -> str:
    """Canonical on-disk form: tab-delimited, metrics as rows, NA for absent.

    Metric labels carry a ``!lower``/``!higher`` sidecar annotation when
    the stored polarity differs from what name inference would produce,
    so parse(serialize(d)) == d.
    """
    lines = ["Metric\t" + "\t".join(dataset.entities)]
    for j, m in enumerate(dataset.metrics):
        label = m.name
        if infer_metric_semantics(m.name).polarity != m.polarity:
            if m.polarity == "lower-is-better":
                label += " !lower"
            elif m.polarity == "higher-is-better":
                label += " !higher"
        cells = [_format_value(dataset.values[i][j]) for i in range(len(dataset.entities))]
        lines.append(label + "\t" + "\t".join(cells))
    return "\n".join(lines) + "\n"


def serialize_timeseries(series: TimeSeries) -> str:
    lines = ["date\tclose\tvolume"]
    for o in series.observations:
        lines.append(
            f"{o.date.isoformat()}\t{_format_value(o.close)}\t{_format_value(o.volume)}"
        )
    return "\n".join(lines) + "\n"
