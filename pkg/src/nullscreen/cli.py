"""Command-line verification runner.

Configuration is a flat ``key = value`` file with dotted keys, e.g.::

    entry.name = mink_cylinder
    entry.k = 2
    n = 3
    seed = 7
    suites = frames,shape,cartan,corollary
    tolerances.fd_eq = 1e-5
    output.format = json

Every key can be overridden by a flag of the same name (``--entry.k 3``);
``--entry``, ``--n``, ``--seed``, ``--suites``, ``--format`` and ``--out``
are shorthands. Exit status: 0 all pass, 1 some suite failed, 2 bad
configuration, 3 a suite raised.
"""
from __future__ import annotations

import math
import sys
import zlib
from dataclasses import dataclass, field
from itertools import combinations
from pathlib import Path

import numpy as np

from . import __version__
from .catalog import REGISTRY, catalog_get
from .chart import column_residual, make_patch, pullback_metric_residual
from .errors import ConfigError, ContractError, GeometryError
from .grw import (
    EventPoint,
    EventVector,
    ambient_metric,
    curvature_relation_residual,
    embed_isometry,
    embedding_quadric_residual,
    embedding_signature,
    event_curve,
)
from .isoparam import isoparametric_scan, screen_spectrum, slice_relation
from .nullhyp import (
    build_null_frame,
    compute_shape,
    dtau_residual,
    forms_on_radical,
    frame_pairings,
    fundamental_forms,
    shape_relation_residual,
    tangent_fields,
    transnormal_residual,
)
from .numkernel import DEFAULT_TOL, Tolerances, fd_derivative
from .report import RunReport, SuiteResult, emit_report
from .rng import Xorshift64Star

SUITES = ("frames", "shape", "cartan", "corollary", "dtau", "chart", "isometry")
SCALAR_KEYS = {
    "n", "seed", "sample_count", "suites", "entry.name",
    "tolerances.abs_eq", "tolerances.fd_eq", "tolerances.cluster_rel",
    "output.path", "output.format", "rollup.include_controls",
}
SHORTHANDS = {"--entry": "entry.name", "--format": "output.format", "--out": "output.path", "--config": None}

SLICE_FRACTIONS = (0.25, 0.5, 0.75)
SCAN_POINTS = 20
CHART_S = 5
CHART_Q = 20
ISOMETRY_POINTS = 50


@dataclass(frozen=True)
class RunConfig:
    entry: str = "mink_cone"
    params: dict = field(default_factory=dict)
    n: int = 3
    sample_count: int = 200
    seed: int = 0
    tolerances: Tolerances = DEFAULT_TOL
    suites: tuple = SUITES
    output_path: str | None = None
    output_format: str = "text"
    include_controls: bool = False

    def echo(self) -> dict:
        return {
            "entry": {"name": self.entry, **self.params},
            "n": self.n,
            "sample_count": self.sample_count,
            "seed": self.seed,
            "tolerances": {
                "abs_eq": self.tolerances.abs_eq,
                "fd_eq": self.tolerances.fd_eq,
                "cluster_rel": self.tolerances.cluster_rel,
            },
            "suites": list(self.suites),
            "output": {"format": self.output_format},
            "rollup": {"include_controls": self.include_controls},
        }


# -- configuration parsing -----------------------------------------------------


def _scalar(text: str):
    text = text.strip()
    for conv in (int, float):
        try:
            return conv(text)
        except ValueError:
            pass
    return text


def parse_config_text(text: str) -> dict[str, str]:
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        if not key:
            raise ConfigError(f"line {lineno}: empty key")
        out[key] = value
    return out


def parse_args(argv: list[str]) -> dict[str, str]:
    """Turn command flags into dotted settings, reading ``--config`` first."""
    file_settings: dict[str, str] = {}
    flags: dict[str, str] = {}
    i = 0
    while i < len(argv):
        tok = argv[i]
        if not tok.startswith("--"):
            raise ConfigError(f"unexpected argument {tok!r}")
        if "=" in tok:
            name, value = tok.split("=", 1)
        else:
            if i + 1 >= len(argv):
                raise ConfigError(f"flag {tok} needs a value")
            name, value = tok, argv[i + 1]
            i += 1
        i += 1
        if name == "--config":
            try:
                file_settings = parse_config_text(Path(value).read_text())
            except OSError as exc:
                raise ConfigError(f"cannot read config: {exc}") from exc
            continue
        key = SHORTHANDS.get(name, name[2:])
        if key not in SCALAR_KEYS and not key.startswith("entry."):
            raise ConfigError(f"unknown flag {name}")
        flags[key] = value
    return {**file_settings, **flags}


def build_config(settings: dict[str, str]) -> RunConfig:
    unknown = [k for k in settings if k not in SCALAR_KEYS and not k.startswith("entry.")]
    if unknown:
        raise ConfigError(f"unknown keys {unknown}")
    try:
        name = settings.get("entry.name", RunConfig.entry)
        if name not in REGISTRY:
            raise ConfigError(f"unknown entry {name!r}")
        entry = REGISTRY[name]
        params = {}
        for k, v in settings.items():
            if k.startswith("entry.") and k != "entry.name":
                p = k[len("entry."):]
                if p not in entry.defaults:
                    raise ConfigError(f"entry {name} has no parameter {p!r}")
                params[p] = _scalar(v)
        tol = Tolerances(
            abs_eq=float(settings.get("tolerances.abs_eq", DEFAULT_TOL.abs_eq)),
            fd_eq=float(settings.get("tolerances.fd_eq", DEFAULT_TOL.fd_eq)),
            cluster_rel=float(settings.get("tolerances.cluster_rel", DEFAULT_TOL.cluster_rel)),
        )
        suites = tuple(s.strip() for s in settings.get("suites", ",".join(SUITES)).split(",") if s.strip())
        bad = [s for s in suites if s not in SUITES]
        if bad:
            raise ConfigError(f"unknown suites {bad}")
        fmt = settings.get("output.format", "text")
        if fmt not in ("text", "json"):
            raise ConfigError(f"unknown format {fmt!r}")
        include = settings.get("rollup.include_controls", "false").lower()
        if include not in ("true", "false", "1", "0"):
            raise ConfigError("rollup.include_controls must be true or false")
        cfg = RunConfig(
            entry=name,
            params=params,
            n=int(settings.get("n", RunConfig.n)),
            sample_count=int(settings.get("sample_count", RunConfig.sample_count)),
            seed=int(settings.get("seed", RunConfig.seed)),
            tolerances=tol,
            suites=suites,
            output_path=settings.get("output.path"),
            output_format=fmt,
            include_controls=include in ("true", "1"),
        )
    except (ValueError, ContractError) as exc:
        raise ConfigError(str(exc)) from exc
    if cfg.sample_count < 1:
        raise ConfigError("sample_count must be >= 1")
    if cfg.seed < 0:
        raise ConfigError("seed must be unsigned")
    if cfg.n < max(1, entry.min_n):
        raise ConfigError(f"entry {name} needs n >= {entry.min_n}")
    return cfg


# -- suites --------------------------------------------------------------------


class _Context:
    def __init__(self, cfg: RunConfig):
        self.cfg = cfg
        self.tol = cfg.tolerances
        self.g = catalog_get(cfg.entry, cfg.n, **cfg.params)
        lo, hi = self.g.t_range
        self.slices = [lo + (hi - lo) * f for f in SLICE_FRACTIONS]
        self._spectra = None

    def rng(self, label: str) -> Xorshift64Star:
        return Xorshift64Star((self.cfg.seed << 32) ^ zlib.crc32(label.encode()))

    def points(self, label: str, count: int):
        rng = self.rng(label)
        return [self.g.sample_point(rng) for _ in range(count)]

    def spectra(self):
        if self._spectra is None:
            out = []
            for k, t in enumerate(self.slices):
                q = self.g.sample_slice(t, self.rng(f"slice{k}"))
                frame = build_null_frame(self.g, q, self.tol)
                out.append((frame, screen_spectrum(self.g, frame, self.tol)))
            self._spectra = out
        return self._spectra


def _result(name, residuals, threshold, samples=None) -> SuiteResult:
    worst = float(max(residuals, default=0.0))
    return SuiteResult(name, worst, float(threshold), bool(worst < threshold), samples or len(residuals))


def suite_frames(ctx: _Context):
    g, tol = ctx.g, ctx.tol
    pts = ctx.points("frames", ctx.cfg.sample_count)
    pair = [max(frame_pairings(g.model, build_null_frame(g, q, tol)).values()) for q in pts]
    tn = [transnormal_residual(g, q) for q in pts]
    return [
        _result("frames.pairings", pair, tol.abs_eq),
        _result("frames.transnormal", tn, 1e-3 * tol.fd_eq),
    ]


def suite_shape(ctx: _Context, report: RunReport):
    g, tol = ctx.g, ctx.tol
    h = g.model.hubble
    pts = ctx.points("shape", max(1, ctx.cfg.sample_count // 2))
    sym, eq8, tau_s, tau_x, bc, rad, rel = [], [], [], [], [], [], {"slice_unit": [], "fiber_unit": []}
    for q in pts:
        frame = build_null_frame(g, q, tol)
        shape = compute_shape(g, frame)
        sym.append(shape.asymmetry)
        eq8.append(shape_relation_residual(g, frame, shape))
        tau_s.append(float(np.max(np.abs(shape.tau_screen), initial=0.0)))
        tau_x.append(abs(shape.tau_xi + h(frame.at.t) / math.sqrt(2)))
        B, C = fundamental_forms(g, frame)
        bc.append(max(np.max(np.abs(B - shape.A_star)), np.max(np.abs(C - shape.A_N))))
        Bx, Cx = forms_on_radical(g, frame)
        rad.append(float(np.max(np.abs(np.concatenate([Bx, Cx])), initial=0.0)))
        srep = screen_spectrum(g, frame, tol, shape)
        for k, v in slice_relation(g, frame, srep).items():
            rel[k].append(v)
    selected = min(rel, key=lambda k: max(rel[k]))
    report.conventions["eta_normalization"] = {
        "slice_unit": max(rel["slice_unit"]),
        "fiber_unit": max(rel["fiber_unit"]),
        "selected": selected,
    }
    scans = [isoparametric_scan(g, t, SCAN_POINTS, ctx.rng(f"scan{k}"), tol) for k, t in enumerate(ctx.slices)]
    return [
        _result("shape.symmetry", sym, tol.fd_eq),
        _result("shape.relation", eq8, tol.fd_eq),
        _result("shape.tau_screen", tau_s, tol.fd_eq),
        _result("shape.tau_xi", tau_x, tol.fd_eq),
        _result("shape.forms", bc, tol.fd_eq),
        _result("shape.forms_radical", rad, tol.fd_eq),
        _result("shape.slice_curvatures", rel[selected], 10 * tol.fd_eq),
        _result("shape.isoparametric", [s.spread for s in scans], 10 * tol.fd_eq, SCAN_POINTS * len(scans)),
    ]


def suite_dtau(ctx: _Context):
    g, tol = ctx.g, ctx.tol
    pts = ctx.points("dtau", max(1, ctx.cfg.sample_count // 4))
    res = []
    for q in pts:
        frame = build_null_frame(g, q, tol)
        fields = tangent_fields(g, frame)
        for a, b in combinations(fields, 2):
            try:
                res.append(dtau_residual(g, frame, fields[a], fields[b]))
            except ContractError:
                # fields not tangent to M: only happens for non-transnormal controls
                res.append(math.inf)
    return [_result("dtau", res, 10 * tol.fd_eq)]


def suite_cartan(ctx: _Context):
    res = [abs(c) for _, rep in ctx.spectra() for c in rep.cartan_residuals]
    return [_result("cartan", res, 0.1 * ctx.tol.fd_eq, len(ctx.spectra()))]


def suite_corollary(ctx: _Context):
    reps = [rep for _, rep in ctx.spectra()]
    ok = all(r.corollary.ok for r in reps)
    worst = max((r.corollary.relation_residual for r in reps), default=0.0)
    thr = ctx.tol.cluster_rel if ctx.g.model.cbar == 0 else ctx.tol.fd_eq
    return [SuiteResult("corollary", float(worst), float(thr), bool(ok), len(reps))]


def suite_chart(ctx: _Context, report: RunReport):
    g, tol = ctx.g, ctx.tol
    t = ctx.slices[1]
    patch = make_patch(g, t, CHART_Q, ctx.rng("chart"), tol)
    s_grid = np.linspace(-0.9 * patch.eps, 0.9 * patch.eps, CHART_S)
    deg, cross, cols, deficient = [], [], [], 0
    spatial = {"fiber_unit": [], "slice_unit": []}
    for q in patch.base_points:
        for s in s_grid:
            try:
                pb = pullback_metric_residual(patch, s, q)
            except GeometryError:
                deficient += 1
                continue
            deg.append(pb.degenerate)
            cross.append(pb.cross)
            for k, v in pb.spatial.items():
                spatial[k].append(v)
            cols.append(column_residual(patch, s, q))
    selected = min(spatial, key=lambda k: max(spatial[k], default=math.inf))
    report.conventions["chart"] = {
        "t": t,
        "eps": patch.eps,
        "fiber_unit": max(spatial["fiber_unit"], default=math.inf),
        "slice_unit": max(spatial["slice_unit"], default=math.inf),
        "selected": selected,
    }
    total = CHART_S * CHART_Q
    return [
        SuiteResult("chart.rank", float(deficient), 1.0, deficient == 0, total),
        _result("chart.degenerate", deg, tol.fd_eq),
        _result("chart.cross", cross, tol.fd_eq),
        _result("chart.columns", cols, tol.fd_eq),
        _result("chart.spatial", spatial[selected], 10 * tol.fd_eq),
    ]


def isometry_residuals(model, points, tol=DEFAULT_TOL):
    """Quadric and pullback residuals of the space-form embedding at each event."""
    sig = embedding_signature(model)
    fiber = model.fiber
    quad, pull = [], []
    for e in points:
        x = embed_isometry(model, e)
        quad.append(abs(embedding_quadric_residual(model, x)))
        frame = [EventVector(e, 1.0, np.zeros(fiber.embed_dim))]
        frame += [EventVector(e, 0.0, b) for b in fiber.tangent_basis(e.p)]
        diffs = []
        for V in frame:
            curve = event_curve(model, e, V)
            diffs.append(fd_derivative(lambda u: embed_isometry(model, curve(u)), 0.0))
        worst = 0.0
        for i in range(len(frame)):
            for j in range(i, len(frame)):
                target = float(np.sum(sig * diffs[i] * diffs[j]))
                worst = max(worst, abs(target - ambient_metric(model, frame[i], frame[j])))
        pull.append(worst)
    return quad, pull


def isometry_points(model, count: int, rng):
    fiber = model.fiber
    lo, hi = model.interval
    lo, hi = max(lo, -1.2), min(hi, 1.2)
    out = []
    for _ in range(count):
        t = rng.uniform(lo, hi)
        v = fiber.project(fiber.origin(), rng.normals(fiber.embed_dim))
        out.append(EventPoint(t, fiber.geodesic(fiber.origin(), v, 0.7)))
    return out


def suite_isometry(ctx: _Context):
    model = ctx.g.model
    pts = isometry_points(model, ISOMETRY_POINTS, ctx.rng("isometry"))
    quad, pull = isometry_residuals(model, pts, ctx.tol)
    curv = [max(abs(r) for r in curvature_relation_residual(model, e.t)) for e in pts]
    return [
        _result("isometry.quadric", quad, 0.1 * ctx.tol.abs_eq),
        _result("isometry.pullback", pull, ctx.tol.fd_eq),
        _result("isometry.curvature_relation", curv, 1e-3 * ctx.tol.abs_eq),
    ]


def _spectrum_dict(rep) -> dict:
    return {
        "t": rep.at.t,
        "lambdas": [{"value": v, "multiplicity": m} for v, m in rep.lambdas],
        "psi": rep.psi,
        "cartan_residuals": list(rep.cartan_residuals),
        "corollary": {"ok": rep.corollary.ok, "applicable": rep.corollary.applicable, "reason": rep.corollary.reason},
    }


def run(cfg: RunConfig) -> RunReport:
    """Execute the requested suites in dependency order."""
    ctx = _Context(cfg)
    report = RunReport(__version__, cfg.echo(), control=ctx.g.control, include_controls=cfg.include_controls)
    wanted = set(cfg.suites)
    order = [
        ("frames", lambda: suite_frames(ctx)),
        ("shape", lambda: suite_shape(ctx, report)),
        ("cartan", lambda: suite_cartan(ctx)),
        ("corollary", lambda: suite_corollary(ctx)),
        ("dtau", lambda: suite_dtau(ctx)),
        ("chart", lambda: suite_chart(ctx, report)),
        ("isometry", lambda: suite_isometry(ctx)),
    ]
    for name, fn in order:
        if name in wanted:
            report.suites.extend(fn())
    if wanted & {"shape", "cartan", "corollary"}:
        report.spectra = [_spectrum_dict(rep) for _, rep in ctx.spectra()]
    return report


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    if argv and argv[0] in ("-h", "--help"):
        print(__doc__)
        print("entries: " + ", ".join(REGISTRY))
        print("suites:  " + ", ".join(SUITES))
        return 0
    try:
        cfg = build_config(parse_args(argv))
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    try:
        report = run(cfg)
    except Exception as exc:  # any suite failure to evaluate is status 3
        print(f"suite error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3
    data = emit_report(report, cfg.output_format)
    try:
        if cfg.output_path:
            Path(cfg.output_path).write_bytes(data)
        else:
            sys.stdout.buffer.write(data)
            sys.stdout.flush()
    except OSError as exc:
        print(f"output error: {exc}", file=sys.stderr)
        return 3
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
