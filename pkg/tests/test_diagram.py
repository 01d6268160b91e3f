"""Layouts, spec validation, and SVG emission."""

from __future__ import annotations

import math
import random
import xml.etree.ElementTree as ET

import pytest

from conftest import random_analysis, random_insights
from stratagem import diagram
from stratagem.diagram import (
    RISK_PALETTE,
    DiagramSpec,
    InvariantViolation,
    Style,
    emit_svg,
    layout_cycle,
    layout_grid,
    layout_hub_spoke,
    layout_radar,
    load_style,
    render_analysis,
    risk_color,
    validate_spec,
)
from stratagem.frameworks import RISK_LEVELS, load_schema, organize, schema_for
from stratagem.insights import Evidence, Insight
from stratagem.textfit import MAX_FONT, MIN_FONT


def make_insight(i, direction, magnitude, themes, statement=None):
    return Insight(
        id=f"t:{i:02d}",
        statement=statement or f"Test insight number {i} about the business position.",
        direction=direction,
        magnitude=magnitude,
        themes=frozenset(themes),
        evidence=(Evidence("metric-value", ("m",), 1.0),),
        provenance="rule:test",
    )


def swot_analysis():
    insights = [
        make_insight(0, "positive", 0.9, ["market-presence"]),
        make_insight(1, "positive", 0.7, ["brand-marketing"]),
        make_insight(2, "negative", 0.8, ["online-channel"]),
        make_insight(3, "negative", 0.4, ["supply-chain"]),
        make_insight(4, "positive", 0.6, ["growth"]),
        make_insight(5, "negative", 0.5, ["competition"]),
    ]
    return organize(insights, schema_for("swot"), subject="Foobar Corp")


def porter_analysis():
    insights = [
        make_insight(0, "negative", 0.9, ["competition"]),
        make_insight(1, "negative", 0.8, ["competition"]),
        make_insight(2, "negative", 0.3, ["supply-chain"]),
        make_insight(3, "positive", 0.6, ["public-sentiment"]),
        make_insight(4, "neutral", 0.5, ["growth"]),
        make_insight(5, "positive", 0.7, ["product-diversity"]),
    ]
    return organize(insights, schema_for("porter5"), subject="Foobar Corp")


def cycle_analysis():
    insights = [
        make_insight(0, "positive", 0.8, ["brand-marketing"]),
        make_insight(1, "positive", 0.7, ["product-diversity"]),
        make_insight(2, "positive", 0.6, ["public-sentiment"]),
        make_insight(3, "positive", 0.9, ["growth"]),
    ]
    return organize(insights, schema_for("virtuous_cycle"), subject="Foobar Corp")


def radar_analysis():
    insights = [
        make_insight(0, "positive", 0.9, ["supply-chain"]),
        make_insight(1, "negative", 0.4, ["product-diversity"]),
        make_insight(2, "positive", 0.6, ["public-sentiment"]),
    ]
    return organize(insights, schema_for("value_discipline"), subject="Foobar Corp")


# ---------------------------------------------------------------------------
# risk palette

def _luminance(hex_color: str) -> float:
    def channel(v):
        v = v / 255.0
        return v / 12.92 if v <= 0.04045 else ((v + 0.055) / 1.055) ** 2.4

    r, g, b = (int(hex_color[i:i + 2], 16) for i in (1, 3, 5))
    return 0.2126 * channel(r) + 0.7152 * channel(g) + 0.0722 * channel(b)


class TestRiskColor:
    def test_pinned_palette(self):
        assert risk_color("low") == "#D9EAD3"
        assert risk_color("moderate") == "#FFF2CC"
        assert risk_color("high") == "#F9CB9C"
        assert risk_color("intense") == "#EA9999"

    def test_unknown_level(self):
        with pytest.raises(KeyError):
            risk_color("catastrophic")

    def test_injective(self):
        assert len(set(RISK_PALETTE.values())) == len(RISK_PALETTE)

    def test_saturation_rises_from_moderate_up(self):
        # the two mid/high tones darken monotonically toward intense; the
        # pastel low/moderate pair is distinguished by hue, not luminance
        lums = {level: _luminance(RISK_PALETTE[level]) for level in RISK_LEVELS}
        assert lums["moderate"] > lums["high"] > lums["intense"]
        assert lums["low"] > lums["high"]


# ---------------------------------------------------------------------------
# style

class TestStyle:
    def test_default_style(self):
        s = load_style(None)
        assert (s.canvas_w, s.canvas_h) == (900.0, 640.0)
        assert s.risk_fill("intense") == "#EA9999"

    def test_style_json_overrides(self, tmp_path):
        path = tmp_path / "style.json"
        path.write_text(
            '{"canvas": [1200, 800], "padding": 10, "palette": {"intense": "#FF0000"}}',
            encoding="utf-8",
        )
        s = load_style(str(path))
        assert (s.canvas_w, s.canvas_h) == (1200.0, 800.0)
        assert s.padding == 10
        assert s.risk_fill("intense") == "#FF0000"
        assert s.risk_fill("low") == "#D9EAD3"  # unmentioned levels keep defaults


# ---------------------------------------------------------------------------
# grid (SWOT)

class TestLayoutGrid:
    def test_quadrant_positions(self):
        spec = layout_grid(swot_analysis())
        assert validate_spec(spec) == []
        by_id = {b.id: b for b in spec.boxes}
        s, w = by_id["strengths"], by_id["weaknesses"]
        o, t = by_id["opportunities"], by_id["threats"]
        assert s.x < w.x and s.y == w.y  # S left of W on the top row
        assert o.y > s.y and t.y > w.y  # O and T on the bottom row
        assert o.x == s.x and t.x == w.x
        # shared edges: the grid tiles the canvas under the title strip
        assert s.x + s.w == w.x
        assert s.y + s.h == o.y

    def test_empty_slots_render(self):
        spec = layout_grid(organize([], schema_for("swot")))
        assert validate_spec(spec) == []
        assert len(spec.boxes) == 4

    def test_wrong_kind_rejected(self):
        with pytest.raises(ValueError):
            layout_grid(porter_analysis())


# ---------------------------------------------------------------------------
# hub and spoke (Porter)

class TestLayoutHubSpoke:
    def test_structure(self):
        analysis = porter_analysis()
        spec = layout_hub_spoke(analysis)
        assert validate_spec(spec) == []
        assert len(spec.boxes) == 5
        assert len(spec.arrows) == 4
        by_id = {b.id: b for b in spec.boxes}
        center = by_id["rivalry"]
        for arrow in spec.arrows:
            assert arrow.to_id == "rivalry"
            end = arrow.points[-1]
            assert (
                math.isclose(end[0], center.x) or math.isclose(end[0], center.x + center.w)
                or math.isclose(end[1], center.y) or math.isclose(end[1], center.y + center.h)
            )

    def test_fills_follow_risk_levels(self):
        analysis = porter_analysis()
        spec = layout_hub_spoke(analysis)
        for box in spec.boxes:
            level = analysis.slot_attributes[box.id]
            assert box.fill == RISK_PALETTE[level]
            assert f"(risk: {level})" in " ".join(box.title.lines)

    def test_risk_title_always_present(self):
        spec = layout_hub_spoke(organize([], schema_for("porter5")))
        assert validate_spec(spec) == []
        for box in spec.boxes:
            assert "risk: low" in " ".join(box.title.lines)


# ---------------------------------------------------------------------------
# cycle

class TestLayoutCycle:
    def test_four_stage_ring(self):
        spec = layout_cycle(cycle_analysis())
        assert validate_spec(spec) == []
        assert len(spec.boxes) == 4
        assert len(spec.arrows) == 4
        # the arrow chain visits every box exactly once and closes the loop
        succ = {a.from_id: a.to_id for a in spec.arrows}
        node = spec.boxes[0].id
        seen = []
        for _ in range(4):
            seen.append(node)
            node = succ[node]
        assert node == spec.boxes[0].id and len(set(seen)) == 4

    def test_boxes_keep_separation_margin(self):
        spec = layout_cycle(cycle_analysis())
        for i, a in enumerate(spec.boxes):
            for b in spec.boxes[i + 1:]:
                dx = max(0.0, max(a.x, b.x) - min(a.x + a.w, b.x + b.w))
                dy = max(0.0, max(a.y, b.y) - min(a.y + a.h, b.y + b.h))
                assert max(dx, dy) >= 8.0 - 1e-6

    def test_eight_stage_custom_schema(self):
        schema = load_schema({
            "kind": "virtuous_cycle",
            "slots": [
                {"id": f"s{i}", "title": f"Stage {i}",
                 "affinity": [{"theme": "growth", "weight": 0.9}]}
                for i in range(8)
            ],
        })
        spec = layout_cycle(organize([], schema))
        assert validate_spec(spec) == []
        assert len(spec.boxes) == 8
        assert len(spec.arrows) == 8


# ---------------------------------------------------------------------------
# radar

class TestLayoutRadar:
    def test_vertices_match_scores(self):
        analysis = radar_analysis()
        spec = layout_radar(analysis)
        assert validate_spec(spec) == []
        radar = spec.radar
        cx, cy = radar.center
        for axis, vertex in zip(radar.axes, radar.vertices):
            score = analysis.slot_attributes[axis.slot_id].value
            assert axis.score == score
            assert math.dist(vertex, (cx, cy)) == pytest.approx(
                radar.radius * score / 10.0, abs=1e-6
            )

    def test_empty_analysis_is_equilateral_at_half_radius(self):
        spec = layout_radar(organize([], schema_for("value_discipline")))
        radar = spec.radar
        sides = [
            math.dist(radar.vertices[i], radar.vertices[(i + 1) % 3]) for i in range(3)
        ]
        assert sides[0] == pytest.approx(sides[1]) == pytest.approx(sides[2])
        assert math.dist(radar.vertices[0], radar.center) == pytest.approx(radar.radius / 2)

    def test_labels_clear_the_outer_ring(self):
        spec = layout_radar(radar_analysis())
        for axis in spec.radar.axes:
            lx, ly = axis.label.origin
            assert not diagram._rect_circle_overlap(
                (lx, ly, axis.label.width, axis.label.height),
                spec.radar.center, spec.radar.radius,
            )

    def test_legend_box_per_axis(self):
        spec = layout_radar(radar_analysis())
        assert {b.id for b in spec.boxes} == {
            "legend_operational_excellence", "legend_product_leadership",
            "legend_customer_intimacy",
        }


# ---------------------------------------------------------------------------
# SVG emission

class TestEmitSvg:
    def test_byte_determinism(self):
        a = emit_svg(layout_grid(swot_analysis()))
        b = emit_svg(layout_grid(swot_analysis()))
        assert a == b

    @pytest.mark.parametrize(
        "layout,builder",
        [
            (layout_grid, swot_analysis),
            (layout_hub_spoke, porter_analysis),
            (layout_cycle, cycle_analysis),
            (layout_radar, radar_analysis),
        ],
    )
    def test_well_formed_xml(self, layout, builder):
        svg = emit_svg(layout(builder()))
        root = ET.fromstring(svg)
        assert root.tag == "{http://www.w3.org/2000/svg}svg"
        assert root.get("version") == "1.1"
        w, h = root.get("width"), root.get("height")
        assert root.get("viewBox") == f"0 0 {w} {h}"

    def test_xml_escaping(self):
        ins = make_insight(
            0, "positive", 0.8, ["growth"],
            statement="Revenue & margins <grew> strongly this year.",
        )
        svg = emit_svg(layout_grid(organize([ins], schema_for("swot"))))
        texts = [
            t.text for t in ET.fromstring(svg).iter("{http://www.w3.org/2000/svg}text")
        ]
        assert any("&" in t and "<grew>" in " ".join(texts) for t in texts if t)

    def test_invalid_spec_rejected(self):
        box = layout_grid(swot_analysis()).boxes[0]
        overlapping = DiagramSpec(
            width=900, height=640,
            boxes=(box, box),  # identical boxes overlap
        )
        with pytest.raises(InvariantViolation):
            emit_svg(overlapping)

    def test_render_analysis_dispatch(self):
        assert render_analysis(swot_analysis()).startswith("<?xml")


# ---------------------------------------------------------------------------
# randomized smoke across layouts (the full 100-per-layout suite is in the
# acceptance module)

@pytest.mark.parametrize("kind", ["swot", "porter5", "virtuous_cycle", "value_discipline"])
def test_randomized_layouts_hold_invariants(kind):
    layouts = {
        "swot": layout_grid, "porter5": layout_hub_spoke,
        "virtuous_cycle": layout_cycle, "value_discipline": layout_radar,
    }
    rng = random.Random(hash(kind) % 2**32)
    for _ in range(25):
        analysis = random_analysis(rng, kind)
        spec = layouts[kind](analysis)
        assert validate_spec(spec) == []
        for box in spec.boxes:
            for block in ([box.title] if box.title else []) + list(box.body):
                if block.lines:
                    assert MIN_FONT <= block.font_size <= MAX_FONT


def test_layout_overflow_is_typed():
    # an analysis whose only factor cannot fit in any box: force it by
    # shrinking the canvas so far that doublings cannot recover
    tiny = Style(canvas_w=0.5, canvas_h=0.4, padding=1.0)
    insights = random_insights(random.Random(0), 6)
    analysis = organize(insights, schema_for("swot"))
    with pytest.raises(diagram.LayoutOverflow):
        layout_grid(analysis, tiny)
