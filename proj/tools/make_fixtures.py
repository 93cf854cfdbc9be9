#!/usr/bin/env python3
"""Regenerates tests/fixtures deterministically.

The golden content summaries are computed here from the generated values,
independently of the C++ profiler.
"""

import datetime as dt
import json
import random
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
FIXTURES = ROOT / "tests" / "fixtures"


def write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8", newline="\n")


def write_csv(path: Path, header, rows) -> None:
    lines = [",".join(header)] + [",".join(r) for r in rows]
    write(path, "\n".join(lines) + "\n")


def summary(row_count, columns) -> str:
    out = [f"Number of Rows: {row_count}", f"Number of Columns: {len(columns)}", "Columns:"]
    for name, types, coverage, unique in columns:
        out.append(f"  - Name: {name}")
        out.append(f"    - Data Types: {types}")
        if coverage is not None:
            out.append(f"    - Coverage: {coverage[0]} to {coverage[1]}")
        out.append(f"    - Unique Values: {unique}")
    return "\n".join(out) + "\n"


def health_insurance(rng: random.Random):
    first = ["Harbor", "Summit", "Prairie", "Lakeshore", "Granite", "Cedar", "Beacon", "Meridian", "Riverbend",
             "Keystone", "Evergreen", "Pioneer", "Bluewater", "Northstar", "Silverline", "Oakridge"]
    second = ["Health Plan", "Care Network", "Mutual", "Medical Group", "Benefit Trust"]
    names = sorted(f"{a} {b}" for a in first for b in second)
    rng.shuffle(names)
    companies = sorted(names[:79])
    kinds = {c: rng.choice(["HMO", "MCH", "A&H"]) for c in companies}
    years = list(range(2013, 2023))

    cells = len(companies) * len(years)
    assert cells == 790
    # Liabilities: 0 (20x), the maximum once written as a float, 755 other
    # distinct values of which 14 repeat once.
    maximum = 2682301090
    others = set()
    while len(others) < 755:
        others.add(rng.randint(10_000, maximum - 1))
    others = sorted(others)
    repeated = rng.sample(others, 14)
    liabilities = ["0"] * 20 + [f"{maximum}.0"] + [str(v) for v in others] + [str(v) for v in repeated]
    rng.shuffle(liabilities)

    rows = []
    assets = []
    premiums = []
    i = 0
    for year in years:
        for company in companies:
            total_assets = rng.randint(1_000_000, 9_500_000_000)
            premium = f"{rng.uniform(10_000, 500_000_000):.2f}"
            assets.append(total_assets)
            premiums.append(premium)
            rows.append([str(year), liabilities[i], company, kinds[company], str(total_assets), premium])
            i += 1
    header = ["Year", "Liabilities", "Company Name", "Insurer Type", "Total Assets", "Premiums Written"]

    liability_values = [float(v) for v in liabilities]
    assert len(set(liabilities)) == 757 and min(liability_values) == 0 and max(liability_values) == maximum
    premium_values = [float(p) for p in premiums]
    golden = summary(len(rows), [
        ("Year", "Text, DateTime", ("2013", "2022"), 10),
        ("Liabilities", "Integer", ("0", "2682301090.0"), 757),
        ("Company Name", "Text", None, len(set(companies))),
        ("Insurer Type", "Text", None, len(set(kinds.values()))),
        ("Total Assets", "Integer", (str(min(assets)), str(max(assets))), len(set(assets))),
        ("Premiums Written", "Float", (repr(min(premium_values)), repr(max(premium_values))), len(set(premiums))),
    ])
    return header, rows, golden


def wind_measurements(rng: random.Random):
    start = dt.datetime(2003, 5, 13, 0, 0)
    directions = ["0"] + [f"{round(22.5 * k):d}.0" for k in range(1, 16)]
    assert directions[-1] == "338.0" and len(set(directions)) == 16
    rows = []
    for k in range(4433):
        stamp = (start + dt.timedelta(minutes=10 * k)).strftime("%Y-%m-%d %H:%M")
        speed = f"{rng.uniform(0.1, 26.9):.1f}"
        std = f"{rng.uniform(0.01, 2.77):.2f}"
        rows.append([stamp, speed, std, rng.choice(directions)])
    rows[17][1], rows[17][2], rows[17][3] = "0", "0", "0"
    rows[2001][1] = "27.0"
    rows[3100][2] = "2.78"
    rows[3500][3] = "338.0"
    header = ["timestamp", "avg_wind_speed", "std_wind_speed", "avg_wind_direction"]
    end = (start + dt.timedelta(minutes=10 * 4432)).strftime("%Y-%m-%d %H:%M")

    def numeric(col):
        values = [r[col] for r in rows]
        floats = [float(v) for v in values]
        lo, hi = min(floats), max(floats)
        # An extreme renders as a float when any equal cell has a decimal point.
        render = lambda x: repr(x) if any(float(v) == x and "." in v for v in values) else str(int(x))
        return (render(lo), render(hi)), len(set(values))

    columns = [("timestamp", "DateTime", (rows[0][0], end), 4433)]
    for col, name in ((1, "avg_wind_speed"), (2, "std_wind_speed"), (3, "avg_wind_direction")):
        coverage, unique = numeric(col)
        columns.append((name, "Float", coverage, unique))
    return header, rows, summary(len(rows), columns)


def regional_climate(rng: random.Random):
    regions = ["Coastal North", "Coastal South", "Highlands", "Inland Valley"]
    start = dt.date(2021, 1, 1)
    rows = []
    for day in range(15):
        for region in regions:
            date = (start + dt.timedelta(days=day)).isoformat()
            rows.append([date, region, f"{rng.uniform(-5, 25):.1f}", f"{rng.uniform(0, 40):.1f}",
                         str(rng.randint(30, 95))])
    header = ["date", "region", "avg_temperature_c", "precipitation_mm", "relative_humidity"]
    return header, rows


def semantic(temporal, t_res, spatial, s_res, entity, fmt, domain, usage):
    return {
        "Temporal": {"isTemporal": temporal, "resolution": t_res},
        "Spatial": {"isSpatial": spatial, "resolution": s_res},
        "Entity Type": entity,
        "Data Format": fmt,
        "Domain-Specific Types": domain,
        "Function/Usage Context": usage,
    }


SEMANTIC_COLUMNS = {
    "Year": semantic(True, "Year", False, "", "Temporal Entity", "YYYY", "General", "Aggregation Key"),
    "Liabilities": semantic(False, "", False, "", "Monetary Value", "Integer", "Financial", "Measurement"),
    "Company Name": semantic(False, "", False, "", "Organization", "Free text", "Financial", "Identifier"),
    "Insurer Type": semantic(False, "", False, "", "Category", "Abbreviation", "Financial", "Grouping Attribute"),
    "Total Assets": semantic(False, "", False, "", "Monetary Value", "Integer", "Financial", "Measurement"),
    "Premiums Written": semantic(False, "", False, "", "Monetary Value", "Decimal", "Financial", "Measurement"),
    "timestamp": semantic(True, "Minute", False, "", "Temporal Entity", "YYYY-MM-DD HH:MM", "General", "Time Index"),
    "avg_wind_speed": semantic(False, "", False, "", "Measurement", "Decimal", "Meteorological", "Measurement"),
    "std_wind_speed": semantic(False, "", False, "", "Statistic", "Decimal", "Meteorological", "Measurement"),
    "avg_wind_direction": semantic(False, "", False, "", "Measurement", "Degrees", "Meteorological", "Measurement"),
    "date": semantic(True, "Day", False, "", "Temporal Entity", "YYYY-MM-DD", "General", "Time Index"),
    "region": semantic(False, "", True, "Region", "Location", "Free text", "Geographic", "Grouping Attribute"),
    "avg_temperature_c": semantic(False, "", False, "", "Measurement", "Decimal", "Climate", "Measurement"),
    "precipitation_mm": semantic(False, "", False, "", "Measurement", "Decimal", "Climate", "Measurement"),
    "relative_humidity": semantic(False, "", False, "", "Measurement", "Percentage", "Climate", "Measurement"),
}

WIND_UFD = (
    "This dataset contains wind speed and direction measurements taken every ten minutes during 2003. "
    "It has 4433 unique time stamps running from May 13 to June 12, 2003 at a resolution of minutes. "
    "Average wind speed spans 0 to 27.0 and its standard deviation spans 0 to 2.78, while the average wind "
    "direction takes 16 distinct values between 0 and 338.0. The records suit studies of local wind behaviour "
    "and wind energy assessment."
)

WIND_SFD = """Dataset Overview:
This dataset contains wind speed and direction measurements with 4433 unique time stamps recorded in 2003.

Related Topics:
- Wind Measurements
- Meteorology
- Renewable Energy

Concepts and Synonyms:
- Wind Speed/Velocity
- Wind Direction/Bearing
- Standard Deviation of Wind Speed

Applications and Use Cases:
- Siting of wind turbines
- Short-term weather analysis

Additional Context:
- Can be combined with temperature or pressure records for broader atmospheric studies."""

HEALTH_UFD = (
    "This dataset reports yearly financial figures for 79 health insurance companies from 2013 to 2022, "
    "with 790 rows and 6 columns. Each row gives the company name, the insurer type (HMO, MCH or A&H), "
    "total assets, liabilities ranging from 0 to 2682301090.0 and premiums written. It supports comparisons "
    "of insurer finances across years and insurer types."
)

HEALTH_SFD = """Dataset Overview:
Yearly financial statements of health insurance companies, covering total assets, liabilities and premiums written from 2013 to 2022.

Key Themes or Topics:
- Health Insurance Finance
- Insurer Types (HMO, MCH, A&H)
- Insurance Premiums

Applications and Use Cases:
- Benchmarking insurer solvency
- Actuarial and financial modelling

Concepts and Synonyms:
- Health Insurance/Medical Insurance
- Premiums Written/Premium Income
- Liabilities/Financial Obligations

Keywords and Themes:
- insurer balance sheet
- health plan finances
- managed care

Additional Context:
- Useful alongside enrolment or claims data for market analysis."""

CLIMATE_UFD = (
    "This dataset holds daily climate observations for four regions over the first half of January 2021, "
    "including average temperature, precipitation and relative humidity. It can support regional comparisons "
    "of weather conditions."
)


def mock_script():
    return {
        "latency_ms": 0,
        "responses": [
            {"tag": "topic", "contains": "Health Insurance", "text": "Health Insurance Finance"},
            {"tag": "topic", "contains": "Wind", "text": "Topic: \"Wind Measurements\""},
            {"tag": "topic", "contains": "Climate", "text": "climate data"},
            {"tag": "ufd", "contains": "avg_wind_speed", "text": WIND_UFD},
            {"tag": "ufd", "contains": "Premiums Written", "text": "  " + HEALTH_UFD + "\n"},
            {"tag": "ufd", "contains": "relative_humidity", "text": CLIMATE_UFD},
            {"tag": "sfd", "contains": "4433 unique time stamps", "text": WIND_SFD},
            {"tag": "sfd", "contains": "Health Insurance Finance", "text": HEALTH_SFD},
            {"tag": "judge-pointwise", "contains": "4433 unique time stamps",
             "text": "Completeness: 7, Conciseness: 9, Readability: 9"},
        ],
        "semantic_columns": SEMANTIC_COLUMNS,
        "fallback": {
            "sfd": "Dataset Overview:\nDescription {prompt_hash}.\n\nKey Themes or Topics:\n- data\n\n"
                   "Applications and Use Cases:\n- analysis\n\nConcepts and Synonyms:\n- data/records\n\n"
                   "Keywords and Themes:\n- dataset\n\nAdditional Context:\n- none",
        },
    }


def toy_benchmark():
    docs = {
        "t_wind": ("Wind Observations", "wind speed and gust measurements from coastal anemometers"),
        "t_rain": ("Rainfall Totals", "daily rainfall and precipitation totals for river basins"),
        "t_taxi": ("Taxi Trips", "yellow taxi trips with pickup and dropoff zones and fares"),
        "t_school": ("School Enrollment", "student enrollment counts per school district and grade"),
        "t_power": ("Power Plants", "electricity generation capacity of power plants by fuel"),
    }
    queries = [("q1", "wind gust"), ("q2", "rainfall river"), ("q3", "taxi fares"), ("q4", "school enrollment")]
    qrels = [("q1", "t_wind", 2), ("q1", "t_power", 0), ("q2", "t_rain", 1), ("q3", "t_taxi", 2),
             ("q4", "t_school", 1), ("q4", "t_taxi", 0)]
    return docs, queries, qrels


def main() -> None:
    rng = random.Random(20240611)
    corpus = FIXTURES / "corpus"

    header, rows, golden = health_insurance(rng)
    write_csv(corpus / "health_insurance.csv", header, rows)
    write(FIXTURES / "golden" / "health_insurance_summary.txt", golden)

    header, rows, golden = wind_measurements(rng)
    write_csv(corpus / "wind_measurements.csv", header, rows)
    write(FIXTURES / "golden" / "wind_measurements_summary.txt", golden)

    header, rows = regional_climate(rng)
    write_csv(corpus / "regional_climate.csv", header, rows)

    manifest = [
        {"dataset_id": "health_insurance", "title": "Health Insurance Dataset",
         "description": "Financial data of health insurance companies by year, including assets, liabilities and premiums.",
         "csv_path": "health_insurance.csv"},
        {"dataset_id": "wind_measurements", "title": "Wind Measurements 2003",
         "description": "Ten-minute wind speed and direction readings from a meteorological mast.",
         "csv_path": "wind_measurements.csv"},
        {"dataset_id": "regional_climate", "title": "Regional Climate Observations",
         "description": "Daily temperature, precipitation and humidity for four regions.",
         "csv_path": "regional_climate.csv"},
    ]
    write(corpus / "manifest.jsonl", "".join(json.dumps(m) + "\n" for m in manifest))
    write(FIXTURES / "mock" / "corpus_mock.json", json.dumps(mock_script(), indent=2) + "\n")

    config = {
        "provider": {"kind": "mock", "model": "mock-gen", "mock_script": "../mock/corpus_mock.json"},
        "exec": {"mode": "mt", "workers": 64, "batch_size": 8},
        "ablation": {"sp": True, "sfd": True},
        "sample_size": 5,
        "seed": 7,
        "ks": [5, 10, 15, 20],
        "paths": {"corpus_manifest": "../corpus/manifest.jsonl", "benchmark_dir": "../benchmark/toy"},
    }
    write(FIXTURES / "configs" / "mock_full.json", json.dumps(config, indent=2) + "\n")
    remote = {
        "provider": {"kind": "remote", "endpoint": "https://llm.invalid/v1/chat/completions", "model": "remote-model",
                     "credential_env": "DATADESC_TEST_MISSING_KEY"},
        "paths": {"corpus_manifest": "../corpus/manifest.jsonl"},
    }
    write(FIXTURES / "configs" / "remote_missing_key.json", json.dumps(remote, indent=2) + "\n")

    docs, queries, qrels = toy_benchmark()
    bench = FIXTURES / "benchmark" / "toy"
    write(bench / "queries.tsv", "".join(f"{q}\t{t}\n" for q, t in queries))
    write(bench / "qrels.tsv", "".join(f"{q}\t{d}\t{g}\n" for q, d, g in qrels))
    write(bench / "manifest.jsonl", "".join(
        json.dumps({"dataset_id": d, "title": t, "description": text}) + "\n" for d, (t, text) in docs.items()))
    write(bench / "descriptions.jsonl", "".join(
        json.dumps({"dataset_id": d, "mode": "UFD", "config": {}, "text": text, "tokens_in": 0, "tokens_out": 0}) + "\n"
        for d, (t, text) in docs.items()))

    write(FIXTURES / "golden" / "profile_excerpt.txt",
          "Number of Rows: 790\nNumber of Columns: 6\nColumns:\n"
          "  - Name: Year\n    - Data Types: Text, DateTime\n    - Coverage: 2013 to 2022\n    - Unique Values: 10\n"
          "  - Name: Liabilities\n    - Data Types: Integer\n    - Coverage: 0 to 2682301090.0\n"
          "    - Unique Values: 757\n")


if __name__ == "__main__":
    main()
