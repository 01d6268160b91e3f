#!/usr/bin/env python3
"""Regenerate the replay transcript fixtures under tests/fixtures/.

The recorded responses are static texts; this script exists so the
request hashes stay in sync with the canonical hashing scheme whenever a
prompt template or the Foobar fixture changes.
"""

from __future__ import annotations

import json
from pathlib import Path

from stratagem import ingest, llm

FIXTURES = Path(__file__).resolve().parent.parent / "tests" / "fixtures"

WALMART_TREND_RESPONSE = """\
As of my last update, Walmart's income statement has reflected several key trends over recent periods:

- Revenue Growth: Walmart has generally experienced steady revenue growth, driven by a combination of factors including its strong e-commerce presence, expansion in international markets, and robust performance in its grocery segment.
- E-Commerce Expansion: E-commerce sales have been a significant growth area for Walmart, with increased investments in online infrastructure and partnerships. This segment has seen strong year-over-year growth, contributing significantly to overall revenue.
- Gross Margin Stability: Gross margins have remained relatively stable, with pricing discipline offsetting higher supply chain and transportation costs across the retail segments.
- Operating Expense Pressure: Operating expenses have risen with investments in wages, automation, and store remodels, partially offsetting the gains from revenue growth.
- International Performance: International revenue has been mixed, with divestitures in some markets balanced by strong growth in Mexico and India operations.
- Grocery Strength: The grocery segment continues to anchor store traffic, with private label products gaining share as consumers manage inflation pressures.
- Membership and Advertising: Newer income streams such as membership programs and retail media advertising have grown quickly and carry higher margins than the core retail business.
"""

WALMART_SWOT_RESPONSE = """\
Here is a SWOT analysis of Walmart:

Strengths:

1. Strong global presence with a vast network of stores.
2. Wide range of products offered, including groceries, electronics, apparel, and household goods.
3. Robust supply chain and distribution infrastructure enabling low prices.
4. Strong brand recognition and customer loyalty across markets.
5. Growing e-commerce platform complementing the physical store base.

Weaknesses:

1. Dependence on physical stores, facing challenges from the shift to online shopping.
2. Negative publicity regarding labor practices and employee relations.
3. Thin profit margins typical of the discount retail model.

Opportunities:

1. Growth in e-commerce presents opportunities for Walmart to expand its online presence.
2. Expansion into emerging markets, particularly in Asia and Africa.
3. Private label expansion to improve margins and differentiation.

Threats:

1. Intense competition from online retailers like Amazon and brick-and-mortar competitors like Target and Costco.
2. Economic downturns impacting consumer spending.
3. Regulatory scrutiny over labor and competitive practices.
"""

VALUE_DISCIPLINE_REFUSAL = (
    "While the dataset provides information on revenues, growth rates, margins, "
    "marketing spend, and other operational metrics, it lacks specific data "
    "related to customer relationships, product innovation, or operational "
    "efficiency. Therefore I am unable to assign the three Value Discipline "
    "categories or derive numeric values for them."
)

FOOBAR_INSIGHTS_RESPONSE = """\
Based on the data, here are insights about Foobar Corp:

1. **Strong Physical Presence:** Foobar Corp's extensive network of 1300 stores and high in-store revenue suggest a strong physical retail strategy. However, this also indicates an area of improvement in online sales, which are currently very low.
2. **High Brand Awareness:** With 79% brand awareness and the highest media spend, Foobar Corp's marketing efforts are effective. However, balancing the media spend with returns on investment would be crucial.
3. **Efficient Supply Chain:** The low average inbound shipment delay indicates a well-managed supply chain, contributing to operational efficiency.
4. **Product Diversity:** With the highest number of product categories, Foobar Corp offers a wide range of products, which could attract a diverse customer base.
5. **Balanced Profitability:** While the net margin is decent, it's essential to monitor and possibly improve profitability, especially in comparison to competitors like Acme LLP.
6. **Public Perception:** Managing and improving public sentiment, especially on social media, is important for maintaining and enhancing brand reputation.
"""

FIXED_TIMESTAMP = "2024-07-01T00:00:00+00:00"


def record(template_id: str, bindings: dict, response: str) -> dict:
    return {
        "request_hash": llm.request_hash(template_id, bindings),
        "request": llm.render_prompt(template_id, bindings),
        "response": response,
        "timestamp": FIXED_TIMESTAMP,
    }


def write_jsonl(path: Path, records: list[dict]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for r in records:
            fh.write(json.dumps(r, ensure_ascii=False) + "\n")
    print(f"wrote {path} ({len(records)} records)")


def main() -> None:
    foobar = ingest.parse_table((FIXTURES / "foobar.tsv").read_text(encoding="utf-8"))
    data_block = ingest.serialize_dataset(foobar)
    write_jsonl(
        FIXTURES / "walmart.jsonl",
        [
            record(
                "trend_training_data",
                {"company": "Walmart"},
                WALMART_TREND_RESPONSE,
            ),
            record(
                "framework_analysis",
                {"company": "Walmart", "framework": "SWOT"},
                WALMART_SWOT_RESPONSE,
            ),
            record(
                "framework_analysis",
                {"company": "Foobar Corp", "framework": "Value Discipline"},
                VALUE_DISCIPLINE_REFUSAL,
            ),
            record(
                "insights_tabular",
                {"company": "Foobar Corp", "data_block": data_block},
                FOOBAR_INSIGHTS_RESPONSE,
            ),
        ],
    )


if __name__ == "__main__":
    main()
