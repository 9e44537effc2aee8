"""Evaluate every acceptance criterion and print one line per criterion."""
import sys
import time

from nullscreen.acceptance import CRITERIA

failed = 0
for crit in CRITERIA:
    start = time.perf_counter()
    res = crit()
    print(f"{res.line()}  [{time.perf_counter() - start:.1f}s]", flush=True)
    failed += not res.passed
sys.exit(1 if failed else 0)
