"""Run every suite for every catalog entry at n = 2, 3, 5 and print a summary table.

Usage: python3 scripts/run_all_entries.py [--seed 7] [--sample-count 200] [--json-dir DIR]
"""
import argparse
import time
from pathlib import Path

from nullscreen.catalog import REGISTRY
from nullscreen.cli import build_config, run
from nullscreen.report import emit_report

parser = argparse.ArgumentParser()
parser.add_argument("--seed", type=int, default=7)
parser.add_argument("--sample-count", type=int, default=200)
parser.add_argument("--dims", default="2,3,5")
parser.add_argument("--json-dir", type=Path)
args = parser.parse_args()

print(f"{'entry':<28} {'n':>2} {'time':>6}  {'result':<6} failing suites")
for name, entry in REGISTRY.items():
    for n in map(int, args.dims.split(",")):
        if n < entry.min_n:
            continue
        cfg = build_config({"entry.name": name, "n": str(n), "seed": str(args.seed),
                            "sample_count": str(args.sample_count), "output.format": "json"})
        start = time.perf_counter()
        report = run(cfg)
        elapsed = time.perf_counter() - start
        failing = [s.name for s in report.suites if not s.passed]
        status = "PASS" if report.all_passed else ("CTRL" if entry.control else "FAIL")
        print(f"{name:<28} {n:>2} {elapsed:>5.1f}s  {status:<6} {', '.join(failing)}")
        if args.json_dir:
            args.json_dir.mkdir(parents=True, exist_ok=True)
            (args.json_dir / f"{name}_n{n}.json").write_bytes(emit_report(report, "json"))
