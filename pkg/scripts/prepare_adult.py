#!/usr/bin/env python3
"""Fetch the public census income sample and convert it for this toolkit.

Downloads the classic 32561-row training file (or reads a local copy), keeps
the six quasi-identifier columns plus the salary class, trims cells, and
writes data/adult.csv with a header row. Requires network access unless a
local source file is given.

Usage:
    python scripts/prepare_adult.py [path-or-url-to-adult.data] [output.csv]
"""

import csv
import sys
import urllib.request
from pathlib import Path

DEFAULT_URL = "https://archive.ics.uci.edu/ml/machine-learning-databases/adult/adult.data"
# source column order in adult.data
SOURCE_COLUMNS = [
    "age", "workclass", "fnlwgt", "education", "education-num", "marital-status",
    "occupation", "relationship", "race", "sex", "capital-gain", "capital-loss",
    "hours-per-week", "native-country", "salary-class",
]
KEEP = ["age", "sex", "education", "relationship", "occupation", "native-country", "salary-class"]


def main() -> int:
    source = sys.argv[1] if len(sys.argv) > 1 else DEFAULT_URL
    out_path = Path(sys.argv[2]) if len(sys.argv) > 2 else Path(__file__).resolve().parent.parent / "data" / "adult.csv"
    if source.startswith(("http://", "https://")):
        print(f"downloading {source} ...")
        text = urllib.request.urlopen(source, timeout=60).read().decode("utf-8")
    else:
        text = Path(source).read_text(encoding="utf-8")
    indices = [SOURCE_COLUMNS.index(name) for name in KEEP]
    rows = []
    for line in text.splitlines():
        if not line.strip():
            continue
        cells = [c.strip() for c in line.split(",")]
        if len(cells) != len(SOURCE_COLUMNS):
            raise SystemExit(f"unexpected row with {len(cells)} cells: {line[:60]}")
        rows.append([cells[i].rstrip(".") if KEEP[j] == "salary-class" else cells[i]
                     for j, i in enumerate(indices)])
    out_path.parent.mkdir(parents=True, exist_ok=True)
    with open(out_path, "w", encoding="utf-8", newline="") as stream:
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(KEEP)
        writer.writerows(rows)
    print(f"wrote {len(rows)} rows to {out_path}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
