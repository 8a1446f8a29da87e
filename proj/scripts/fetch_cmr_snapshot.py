#!/usr/bin/env python3
"""Download the Community Mobility Reports CSV and keep the rows for the
localities in a study config.

    scripts/fetch_cmr_snapshot.py [--config data/study_config.ini] [--out data/cmr_snapshot.csv]

Google stopped updating the reports in October 2022 but the archived file is
still served. It is about 1 GB, so rows are filtered while streaming.
"""
import argparse
import configparser
import csv
import io
import sys
import urllib.request

URL = "https://www.gstatic.com/covid19/mobility/Global_Mobility_Report.csv"
LAST_DATE = "2021-03-31"


def selectors(config_path):
    # the config has global keys before the first section; give them one
    with open(config_path, encoding="utf-8") as f:
        text = "[global]\n" + f.read()
    cp = configparser.ConfigParser(inline_comment_prefixes=None)
    cp.read_string(text)
    out = set()
    for section in cp.sections():
        if not section.startswith("locality "):
            continue
        s = cp[section]
        out.add((s.get("country_region_code", ""), s.get("sub_region_1", ""),
                 s.get("sub_region_2", ""), s.get("metro_area", "")))
    return out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--config", default="data/study_config.ini")
    ap.add_argument("--out", default="data/cmr_snapshot.csv")
    ap.add_argument("--url", default=URL)
    args = ap.parse_args()

    wanted = selectors(args.config)
    kept = 0
    with urllib.request.urlopen(args.url) as resp, \
            open(args.out, "w", newline="", encoding="utf-8") as out:
        reader = csv.DictReader(io.TextIOWrapper(resp, encoding="utf-8-sig", newline=""))
        writer = csv.DictWriter(out, fieldnames=reader.fieldnames, lineterminator="\n")
        writer.writeheader()
        for row in reader:
            key = (row["country_region_code"], row["sub_region_1"], row["sub_region_2"],
                   row.get("metro_area", ""))
            if key in wanted and row["date"] <= LAST_DATE:
                writer.writerow(row)
                kept += 1
    print(f"{kept} rows written to {args.out}", file=sys.stderr)
    return 0 if kept else 1


if __name__ == "__main__":
    sys.exit(main())
