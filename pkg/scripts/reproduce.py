"""Regenerate tables, improved and irregular packings, and their drawings.

Writes into ``results/`` (or ``--out``):
  table_1_62.txt, table_segments.txt, dimorphism_5000.txt, table_1_5000.csv
  improved_<n>.packing.json/.svg for every size with a known move
  irregular_<n>.packing.json/.svg for 13 and 21
  found_<n>.packing.json/.svg for the shipped record packings (43, 57, 58)
  summary.json with the headline numbers

    python scripts/reproduce.py [--out results] [--jobs 1]
"""
from __future__ import annotations

import argparse
import json
import time
from pathlib import Path

from rectpack.geom import check_feasible, extract_bonds, measure
from rectpack.improve import (
    FOUND_SIZES,
    KNOWN_DELTA_INDEX,
    apply_improvement,
    delta_value,
    solve_found,
    solve_irregular,
)
from rectpack.io import render_svg, scan_text, table_csv, table_text, write_packing
from rectpack.restricted import best_in_rn, dimorphism_hybrid_scan, make_table
from rectpack.verify import merged_records, oler_epsilon_bound, records_monotone, square_sequence

SEGMENTS = ((101, 110), (251, 260), (501, 511), (1001, 1010), (2001, 2011), (4991, 5000))


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default="results")
    ap.add_argument("--jobs", type=int, default=1)
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    summary: dict = {}

    t0 = time.perf_counter()
    (out / "table_1_62.txt").write_text(table_text(make_table(1, 62), True, KNOWN_DELTA_INDEX))
    (out / "table_segments.txt").write_text(
        "\n".join(table_text(make_table(lo, hi), True) for lo, hi in SEGMENTS)
    )
    rows = make_table(1, 5000, jobs=args.jobs)
    (out / "table_1_5000.csv").write_text(table_csv(rows))
    summary["scan_seconds"] = round(time.perf_counter() - t0, 1)
    scan = [(n, ts) for n, ts in dimorphism_hybrid_scan(5000, jobs=args.jobs) if n > 62]
    (out / "dimorphism_5000.txt").write_text(scan_text(scan))
    summary["dimorphic_or_hybrid_above_62"] = [n for n, _ in scan]

    summary["delta"] = {i: delta_value(i) for i in (1, 2, 3, 4)}
    improved = {}
    for n, i in sorted(KNOWN_DELTA_INDEX.items()):
        t = next(t for t in best_in_rn(n).minimizers if t.v >= 1 and t.s == 0)
        p = apply_improvement(t, i)
        p = p.replace(bonds=extract_bonds(p))
        write_packing(p, out / f"improved_{n}.packing.json")
        (out / f"improved_{n}.svg").write_text(render_svg(p))
        improved[n] = {"delta_index": i, "P": p.perimeter, "feasible": check_feasible(p).ok}
        print(f"improved n={n}: P={p.perimeter:.12f}")
    summary["improved"] = improved

    for key, sizes, solve in (("irregular", (13, 21), solve_irregular), ("found", FOUND_SIZES, solve_found)):
        summary[key] = {}
        for n in sizes:
            p = solve(n)
            write_packing(p, out / f"{key}_{n}.packing.json")
            (out / f"{key}_{n}.svg").write_text(render_svg(p, labels=True, rattlers=p.meta["rattlers"]))
            summary[key][n] = measure(p).to_json()
            print(f"{key} n={n}: P={p.perimeter:.12f}")

    recs = merged_records(5000)
    summary["monotone_violations"] = records_monotone(recs)
    b = oler_epsilon_bound(1000)
    summary["oler_m1000"] = {"epsilon": b.epsilon_max, "ls": b.ls_bound}
    summary["square_sequence"] = square_sequence(5)
    (out / "summary.json").write_text(json.dumps(summary, indent=1) + "\n")
    print(json.dumps({k: summary[k] for k in ("scan_seconds", "monotone_violations", "oler_m1000")}))


if __name__ == "__main__":
    main()
