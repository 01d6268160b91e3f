"""Command-line pipeline: ingestion -> insights -> organization -> SVG.

Every stage writes its JSON artifact so each step can be inspected and
replayed independently; ``pipeline`` is byte-identical to chaining the
three subcommands on the emitted intermediates.

Exit codes: 0 success, 2 input/validation error, 3 LLM/network error,
4 layout overflow.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import diagram, frameworks, ingest, insights as insights_mod, llm

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_LLM = 3
EXIT_LAYOUT = 4

_FRAMEWORK_NAMES = {
    "swot": "swot",
    "porter5": "porter5",
    "cycle": "virtuous_cycle",
    "value-discipline": "value_discipline",
}


def _write_json(path: str, obj: dict) -> None:
    text = json.dumps(obj, indent=2, ensure_ascii=False) + "\n"
    Path(path).write_text(text, encoding="utf-8")


def _parse_llm_flag(value: str) -> llm.ProviderConfig | None:
    if value == "off":
        return None
    kind, _, rest = value.partition(":")
    if kind == "live" and rest:
        return llm.ProviderConfig(model=rest, mode="live")
    if kind == "record" and rest:
        return llm.ProviderConfig(model="default", mode="record", transcript_path=rest)
    if kind == "replay" and rest:
        return llm.ProviderConfig(model="replay", mode="replay", transcript_path=rest)
    raise ValueError(f"bad --llm value {value!r}")


def _llm_insights(config, subject: str, dataset) -> list:
    if dataset is not None:
        response = llm.ask(
            config,
            "insights_tabular",
            {"company": subject, "data_block": ingest.serialize_dataset(dataset)},
        )
    else:
        response = llm.ask(config, "trend_training_data", {"company": subject})
    return llm.parse_insight_list(response, model_label=config.model)


def cmd_insights(args) -> int:
    if not args.table and not args.timeseries and not args.llm_config:
        print("error: need --table, --timeseries, or --llm", file=sys.stderr)
        return EXIT_INPUT
    dataset = None
    series = None
    try:
        if args.table:
            text = Path(args.table).read_text(encoding="utf-8")
            dialect = "comma" if args.table.endswith(".csv") else "tab"
            dataset = ingest.parse_table(text, dialect=dialect)
        if args.timeseries:
            text = Path(args.timeseries).read_text(encoding="utf-8")
            dialect = "comma" if args.timeseries.endswith(".csv") else "tab"
            series = ingest.parse_timeseries(text, dialect=dialect)
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ingest.IngestError as exc:
        name = args.table if isinstance(exc, (ingest.RaggedRows,)) or args.table else args.timeseries
        print(f"error in {name}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    subject = args.subject or (dataset.subject if dataset else "")
    if dataset is not None and subject not in dataset.entities:
        print(f"error: subject {subject!r} not found in table", file=sys.stderr)
        return EXIT_INPUT
    if dataset is None and series is None and not subject:
        print("error: --subject required for training-data mode", file=sys.stderr)
        return EXIT_INPUT
    found = []
    if dataset is not None or series is not None:
        found = insights_mod.run_all_rules(dataset, series, subject or None)
    if args.llm_config:
        try:
            llm_found = _llm_insights(args.llm_config, subject, dataset)
        except llm.LlmError as exc:
            print(f"LLM error: {exc}", file=sys.stderr)
            return EXIT_LLM
        # conservative merge: drop exact statement duplicates only
        known = {ins.statement for ins in found}
        found = found + [ins for ins in llm_found if ins.statement not in known]
    out = {
        "subject": subject,
        "insights": [insights_mod.insight_to_dict(i) for i in found],
    }
    _write_json(args.output, out)
    print(f"wrote {len(found)} insights to {args.output}")
    return EXIT_OK


def _load_insights_file(path: str) -> tuple[str, list]:
    raw = json.loads(Path(path).read_text(encoding="utf-8"))
    problems = []
    if not isinstance(raw, dict) or "insights" not in raw:
        raise ValueError('top level must be an object with an "insights" array')
    parsed = []
    for i, item in enumerate(raw["insights"]):
        try:
            parsed.append(insights_mod.insight_from_dict(item))
        except (KeyError, TypeError, ValueError) as exc:
            problems.append(f"insight #{i}: {exc}")
    if problems:
        raise ValueError("\n".join(problems))
    return raw.get("subject", ""), parsed


def cmd_organize(args) -> int:
    if args.max_per_slot < 1:
        print("error: --max-per-slot must be at least 1", file=sys.stderr)
        return EXIT_INPUT
    kind = _FRAMEWORK_NAMES[args.framework]
    try:
        subject, parsed = _load_insights_file(args.insights)
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (ValueError, json.JSONDecodeError) as exc:
        print(f"error: invalid insights file {args.insights}:\n{exc}", file=sys.stderr)
        return EXIT_INPUT
    schema = frameworks.schema_for(kind, max_per_slot=args.max_per_slot)
    analysis = frameworks.organize(parsed, schema, subject=subject)
    violations = frameworks.validate_analysis(analysis)
    if violations:
        for v in violations:
            print(f"violation [{v.code}] {v.slot_id}: {v.message}", file=sys.stderr)
        return EXIT_INPUT
    _write_json(args.output, frameworks.analysis_to_dict(analysis))
    print(f"{'slot':<24} {'factors':>7}  attribute")
    for slot in schema.slots:
        attr = analysis.slot_attributes[slot.id]
        if isinstance(attr, frameworks.AxisScore):
            label = f"axis {attr.value:.2f}"
        elif attr is None:
            label = "-"
        else:
            label = f"risk {attr}"
        print(f"{slot.title:<24} {len(analysis.assignments[slot.id]):>7}  {label}")
    print(f"wrote analysis to {args.output}")
    return EXIT_OK


def cmd_render(args) -> int:
    try:
        raw = json.loads(Path(args.analysis).read_text(encoding="utf-8"))
        analysis = frameworks.analysis_from_dict(raw)
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (KeyError, ValueError, json.JSONDecodeError) as exc:
        print(f"error: invalid analysis file {args.analysis}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    style = diagram.load_style(args.style)
    try:
        svg = diagram.render_analysis(analysis, style)
    except diagram.LayoutOverflow as exc:
        print(f"layout overflow: {exc.factor!r}", file=sys.stderr)
        return EXIT_LAYOUT
    Path(args.output).write_text(svg, encoding="utf-8")
    width = svg.split('width="', 1)[1].split('"', 1)[0]
    height = svg.split('height="', 1)[1].split('"', 1)[0]
    print(f"wrote {args.output} ({width} x {height} px)")
    return EXIT_OK


def cmd_pipeline(args) -> int:
    out = Path(args.output)
    insights_path = str(out.with_suffix("")) + ".insights.json"
    analysis_path = str(out.with_suffix("")) + ".analysis.json"
    args_i = argparse.Namespace(
        table=args.table, timeseries=args.timeseries, subject=args.subject,
        llm_config=args.llm_config, output=insights_path,
    )
    code = cmd_insights(args_i)
    if code != EXIT_OK:
        return code
    args_o = argparse.Namespace(
        insights=insights_path, framework=args.framework,
        max_per_slot=args.max_per_slot, output=analysis_path,
    )
    code = cmd_organize(args_o)
    if code != EXIT_OK:
        return code
    args_r = argparse.Namespace(
        analysis=analysis_path, style=args.style, output=str(out),
    )
    return cmd_render(args_r)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="stratagem",
        description="Business data to strategy-management diagrams.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_inputs(p):
        p.add_argument("--table", help="tab- or comma-delimited entity-metric table")
        p.add_argument("--timeseries", help="date/close/volume delimited file")
        p.add_argument("--subject", default="", help="analysis subject entity")
        p.add_argument(
            "--llm", default="off",
            help="off | live:MODEL | record:TRANSCRIPT | replay:TRANSCRIPT",
        )

    p = sub.add_parser("insights", help="extract insights from data")
    add_inputs(p)
    p.add_argument("-o", "--output", default="insights.json")

    p = sub.add_parser("organize", help="organize an insights file into a framework")
    p.add_argument("insights", help="insights JSON file")
    p.add_argument("--framework", choices=sorted(_FRAMEWORK_NAMES), required=True)
    p.add_argument("--max-per-slot", type=int, default=frameworks.DEFAULT_MAX_PER_SLOT)
    p.add_argument("-o", "--output", default="analysis.json")

    p = sub.add_parser("render", help="render an analysis file as SVG")
    p.add_argument("analysis", help="analysis JSON file")
    p.add_argument("--style", default=None, help="style JSON file")
    p.add_argument("-o", "--output", default="diagram.svg")

    p = sub.add_parser("pipeline", help="insights + organize + render in one go")
    add_inputs(p)
    p.add_argument("--framework", choices=sorted(_FRAMEWORK_NAMES), required=True)
    p.add_argument("--max-per-slot", type=int, default=frameworks.DEFAULT_MAX_PER_SLOT)
    p.add_argument("--style", default=None, help="style JSON file")
    p.add_argument("-o", "--output", default="diagram.svg")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if hasattr(args, "llm"):
        try:
            args.llm_config = _parse_llm_flag(args.llm)
        except ValueError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_INPUT
    handler = {
        "insights": cmd_insights,
        "organize": cmd_organize,
        "render": cmd_render,
        "pipeline": cmd_pipeline,
    }[args.command]
    return handler(args)


if __name__ == "__main__":
    sys.exit(main())
