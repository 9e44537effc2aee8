"""Rewrite the golden JSON report used by the determinism test.

Only run this after an intentional numerical change; the test compares bytes.
"""
from pathlib import Path

from nullscreen.cli import build_config, run
from nullscreen.report import emit_report

GOLDEN = Path(__file__).resolve().parents[1] / "tests" / "golden" / "mink_cone_n3_seed7.json"
SETTINGS = {"entry.name": "mink_cone", "n": "3", "seed": "7", "sample_count": "24", "output.format": "json"}

if __name__ == "__main__":
    GOLDEN.write_bytes(emit_report(run(build_config(SETTINGS)), "json"))
    print(f"wrote {GOLDEN}")
