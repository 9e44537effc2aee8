"""Run reports and their text/JSON renderings."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field


@dataclass(frozen=True)
class SuiteResult:
    name: str
    max_residual: float
    threshold: float
    passed: bool
    samples: int

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "max_residual": self.max_residual,
            "threshold": self.threshold,
            "pass": self.passed,
            "samples": self.samples,
        }


@dataclass
class RunReport:
    version: str
    config: dict
    suites: list[SuiteResult] = field(default_factory=list)
    spectra: list[dict] = field(default_factory=list)
    conventions: dict = field(default_factory=dict)
    control: bool = False
    include_controls: bool = False

    @property
    def all_passed(self) -> bool:
        return all(s.passed for s in self.suites)

    @property
    def exit_code(self) -> int:
        if self.control and not self.include_controls:
            return 0
        return 0 if self.all_passed else 1

    def to_dict(self) -> dict:
        return {
            "version": self.version,
            "config": self.config,
            "suites": [s.to_dict() for s in self.suites],
            "spectra": self.spectra,
            "conventions": self.conventions,
            "control": self.control,
            "all_pass": self.all_passed,
        }


def _encode(obj) -> str:
    if obj is None or isinstance(obj, bool):
        return json.dumps(obj)
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        if not math.isfinite(obj):
            return "null"
        return format(obj, ".17g")
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {_encode(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(_encode(v) for v in obj) + "]"
    if hasattr(obj, "item"):  # numpy scalars
        return _encode(obj.item())
    raise TypeError(f"cannot encode {type(obj).__name__}")


def to_json(report: RunReport) -> str:
    """JSON with insertion-ordered keys and floats printed to 17 significant digits."""
    return _encode(report.to_dict()) + "\n"


def to_text(report: RunReport) -> str:
    cfg = report.config
    lines = [f"nullscreen {report.version}  entry={cfg.get('entry', {}).get('name')}  n={cfg.get('n')}  seed={cfg.get('seed')}"]
    if report.control:
        lines.append("negative control: " + ("counted in roll-up" if report.include_controls else "excluded from roll-up"))
    if report.suites:
        width = max(len(s.name) for s in report.suites)
        lines.append(f"{'suite':<{width}}  {'max_residual':>12}  {'threshold':>10}  {'samples':>7}  result")
        for s in report.suites:
            lines.append(
                f"{s.name:<{width}}  {s.max_residual:>12.3e}  {s.threshold:>10.1e}  {s.samples:>7d}  "
                + ("PASS" if s.passed else "FAIL")
            )
    for sp in report.spectra:
        lam = ", ".join(f"{d['value']:.6g}^{d['multiplicity']}" for d in sp["lambdas"])
        lines.append(f"slice t={sp['t']:.6g}: lambda = {{{lam}}}  psi={sp['psi']:.6g}  corollary={sp['corollary']['reason']}")
    for key, conv in report.conventions.items():
        parts = ", ".join(f"{k}={v:.3e}" if isinstance(v, float) else f"{k}={v}" for k, v in conv.items())
        lines.append(f"convention {key}: {parts}")
    return "\n".join(lines) + "\n"


def emit_report(report: RunReport, fmt: str = "text") -> bytes:
    if fmt == "json":
        return to_json(report).encode()
    if fmt == "text":
        return to_text(report).encode()
    raise ValueError(f"unknown format {fmt!r}")
