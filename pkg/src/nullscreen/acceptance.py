"""Exit criteria for the library, one function per criterion.

Each criterion returns a :class:`Criterion` with the worst observed value
and the threshold it was held to. ``run_all`` evaluates everything and is
what ``scripts/run_acceptance.py`` and ``tests/test_acceptance.py`` use.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations

import numpy as np

from .catalog import REGISTRY, catalog_get
from .chart import make_patch, pullback_metric_residual
from .cli import build_config, isometry_points, isometry_residuals, run
from .grw import curvature_relation_residual, space_form
from .isoparam import cartan_residuals, check_corollary, isoparametric_scan, make_report, screen_spectrum, slice_relation
from .nullhyp import (
    build_null_frame,
    compute_shape,
    dtau_residual,
    frame_pairings,
    shape_relation_residual,
    tangent_fields,
    transnormal_residual,
)
from .numkernel import DEFAULT_TOL
from .report import emit_report
from .rng import Xorshift64Star

DIMS = (2, 3, 5)
SEED = 20240601


@dataclass(frozen=True)
class Criterion:
    number: int
    title: str
    passed: bool
    worst: float
    threshold: float
    detail: str = ""

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        return f"[{tag}] criterion {self.number:>2}: {self.title} (worst {self.worst:.3e} vs {self.threshold:.1e}) {self.detail}".rstrip()


def _combos(include_controls=False):
    for name, entry in REGISTRY.items():
        if entry.control and not include_controls:
            continue
        for n in DIMS:
            if n >= entry.min_n:
                yield name, n


def _rng(*labels) -> Xorshift64Star:
    rng = Xorshift64Star(SEED)
    for lab in labels:
        rng = rng.spawn(str(lab))
    return rng


@lru_cache(maxsize=None)
def _sweep(name: str, n: int, count: int = 100):
    """Shape data, spectra and slice relations at ``count`` seeded points."""
    g = catalog_get(name, n)
    rng = _rng("sweep", name, n)
    out = []
    for _ in range(count):
        frame = build_null_frame(g, g.sample_point(rng))
        shape = compute_shape(g, frame)
        srep = screen_spectrum(g, frame, DEFAULT_TOL, shape)
        out.append((frame, shape, srep, slice_relation(g, frame, srep)))
    return g, out


def criterion_1_frames() -> Criterion:
    worst = 0.0
    for name, n in _combos(include_controls=True):
        g = catalog_get(name, n)
        rng = _rng("frames", name, n)
        for _ in range(200):
            worst = max(worst, max(frame_pairings(g.model, build_null_frame(g, g.sample_point(rng))).values()))
    return Criterion(1, "null frame pairings", worst < 1e-9, worst, 1e-9)


def criterion_2_transnormal() -> Criterion:
    worst = 0.0
    for name, n in _combos():
        g = catalog_get(name, n)
        rng = _rng("transnormal", name, n)
        worst = max(worst, max(transnormal_residual(g, g.sample_point(rng)) for _ in range(500)))
    return Criterion(2, "transnormality |grad f| = rho o f", worst < 1e-8, worst, 1e-8)


def criterion_3_curvature_relation() -> Criterion:
    worst = 0.0
    for cbar, (lo, hi) in ((-1, (-1.5, 1.5)), (0, (-3.0, 3.0)), (1, (-3.0, 3.0))):
        model = space_form(cbar, 3)
        rng = _rng("eq5", cbar)
        for _ in range(100):
            worst = max(worst, *map(abs, curvature_relation_residual(model, rng.uniform(lo, hi))))
    return Criterion(3, "constant-curvature warping relation", worst < 1e-12, worst, 1e-12)


def criterion_4_tau() -> Criterion:
    worst = 0.0
    for name, n in _combos():
        g, rows = _sweep(name, n)
        for frame, shape, _, _ in rows:
            tau_xi_err = abs(shape.tau_xi + g.model.hubble(frame.at.t) / math.sqrt(2))
            worst = max(worst, float(np.max(np.abs(shape.tau_screen))), tau_xi_err)
    return Criterion(4, "tau vanishes on the screen, tau(xi) = -(rho'/rho)/sqrt2", worst < 1e-5, worst, 1e-5)


def criterion_5_shape_relation() -> Criterion:
    worst = 0.0
    for name, n in _combos():
        g, rows = _sweep(name, n)
        for frame, shape, _, _ in rows:
            worst = max(worst, shape_relation_residual(g, frame, shape))
    return Criterion(5, "(A_N - A*)/sqrt2 = (rho'/rho) P, A* xi = A_N xi = 0", worst < 1e-5, worst, 1e-5)


def criterion_6_dtau() -> Criterion:
    worst = 0.0
    for name, n in _combos():
        g = catalog_get(name, n)
        rng = _rng("dtau", name, n)
        for _ in range(50):
            frame = build_null_frame(g, g.sample_point(rng))
            fields = tangent_fields(g, frame)
            for a, b in combinations(fields, 2):
                worst = max(worst, dtau_residual(g, frame, fields[a], fields[b]))
    return Criterion(6, "dtau = 0 on all pairs from {xi, E_i}", worst < 1e-4, worst, 1e-4)


def criterion_7_slice_curvatures() -> Criterion:
    worst = {"slice_unit": 0.0, "fiber_unit": 0.0}
    for name, n in _combos():
        _, rows = _sweep(name, n)
        for *_, rel in rows:
            for k, v in rel.items():
                worst[k] = max(worst[k], v)
    best = min(worst, key=worst.get)
    detail = f"selected={best}; slice_unit={worst['slice_unit']:.2e}, fiber_unit={worst['fiber_unit']:.2e}"
    return Criterion(7, "slice curvatures nu = sqrt2 lambda + rho'/rho", worst[best] < 1e-4, worst[best], 1e-4, detail)


def criterion_8_cartan() -> Criterion:
    worst = 0.0
    checked = 0
    for name in ("mink_cylinder", "ads_gudermann_tube"):
        for n in DIMS:
            if n < REGISTRY[name].min_n:
                continue
            _, rows = _sweep(name, n)
            for *_, srep, _ in rows:
                if srep.l < 2:
                    return Criterion(8, "Cartan identities", False, math.inf, 1e-6, f"{name} n={n} gave l=1")
                checked += 1
                worst = max(worst, *map(abs, srep.cartan_residuals))
    arithmetic_ok = (
        cartan_residuals([(0.7, 2), (0.0, 1)], 0, 0.0) == (0.0, 0.0)
        and cartan_residuals([(1.0, 1), (-0.5, 2)], 1, 0.0) == (0.0, 0.0)
        and cartan_residuals([(1.0, 1), (0.5, 1)], 1, 0.0) == (4.0, -4.0)
    )
    ok = worst < 1e-6 and arithmetic_ok
    return Criterion(8, "Cartan identities", ok, worst, 1e-6, f"{checked} spectra; arithmetic examples {'ok' if arithmetic_ok else 'WRONG'}")


def criterion_9_corollary() -> Criterion:
    problems = []
    worst = 0.0
    for name, n in _combos():
        _, rows = _sweep(name, n)
        for *_, srep, _ in rows:
            if name == "mink_cylinder":
                small = min(abs(v) for v, _ in srep.lambdas)
                worst = max(worst, small)
                if srep.l != 2 or small >= 1e-6:
                    problems.append(f"{name} n={n} l={srep.l}")
            elif name in ("mink_cone", "mink_hyperplane"):
                if srep.l != 1:
                    problems.append(f"{name} n={n} l={srep.l}")
            elif name == "ads_gudermann_tube":
                (nu1, _), (nu2, _) = srep.nus if srep.l == 2 else ((0, 0), (0, 0))
                rel = abs(srep.rho**2 * nu1 * nu2 - 1.0)
                worst = max(worst, rel)
                if srep.l > 2 or rel >= 1e-4:
                    problems.append(f"{name} n={n} l={srep.l} rel={rel:.1e}")
            if not srep.corollary.ok:
                problems.append(f"{name} n={n} verdict {srep.corollary.reason}")
    synthetic = make_report([(-1.0, 1), (0.0, 1), (2.0, 1)], 0)
    if check_corollary(synthetic, 0).ok:
        problems.append("synthetic l=3 passed")
    detail = "; ".join(problems[:3]) if problems else "cylinder zero cluster, l=1 for cone/plane, tube relation, synthetic l=3 rejected"
    return Criterion(9, "Corollary (l <= 2, zero curvature, rho^2 nu1 nu2 = 1)", not problems, worst, 1e-4, detail)


def criterion_10_chart() -> Criterion:
    worst_null = 0.0
    worst_flat = 0.0
    worst_curved = 0.0
    rank_ok = True
    literal = 0.0
    for name, n in _combos():
        g = catalog_get(name, n)
        t = 0.5 * sum(g.t_range)
        patch = make_patch(g, t, 20, _rng("chart", name, n))
        for q in patch.base_points:
            for s in np.linspace(-0.9 * patch.eps, 0.9 * patch.eps, 5):
                try:
                    pb = pullback_metric_residual(patch, s, q)
                except Exception:
                    rank_ok = False
                    continue
                worst_null = max(worst_null, pb.degenerate, pb.cross)
                if g.model.cbar == 0:
                    worst_flat = max(worst_flat, pb.spatial["slice_unit"], pb.spatial["fiber_unit"])
                else:
                    worst_curved = max(worst_curved, pb.spatial[pb.selected()])
                    literal = max(literal, pb.spatial["slice_unit"])
    ok = rank_ok and worst_null < 1e-5 and worst_flat < 1e-4 and worst_curved < 1e-4
    detail = (
        f"rank {'full' if rank_ok else 'DEFICIENT'}; degenerate/cross {worst_null:.1e}; flat {worst_flat:.1e}; "
        f"curved (fiber_unit) {worst_curved:.1e}; slice_unit reading {literal:.1e}"
    )
    return Criterion(10, "chart differential and degenerate warped metric", ok, max(worst_flat, worst_curved), 1e-4, detail)


def criterion_11_isometries() -> Criterion:
    quad_w = pull_w = 0.0
    for cbar in (-1, 0, 1):
        model = space_form(cbar, 3)
        quad, pull = isometry_residuals(model, isometry_points(model, 50, _rng("iso", cbar)))
        quad_w, pull_w = max(quad_w, *quad), max(pull_w, *pull)
    ok = quad_w < 1e-10 and pull_w < 1e-5
    return Criterion(11, "isometric embeddings into dS / AdS", ok, pull_w, 1e-5, f"quadric {quad_w:.1e} (< 1e-10)")


def criterion_12_negative_control() -> Criterion:
    worst = math.inf
    for n in DIMS:
        g = catalog_get("mink_ellipsoid_negcontrol", n)
        t = 0.5 * sum(g.t_range)
        scan = isoparametric_scan(g, t, 20, _rng("negcontrol", n))
        worst = min(worst, scan.spread)
        if scan.passed:
            return Criterion(12, "negative control fails the isoparametric scan", False, scan.spread, scan.threshold)
    return Criterion(12, "negative control fails the isoparametric scan", True, worst, 1e-4, "smallest spread is above threshold")


def criterion_13_determinism() -> Criterion:
    settings = {"entry.name": "mink_cone", "n": "3", "seed": "11", "sample_count": "40", "output.format": "json"}
    a = emit_report(run(build_config(settings)), "json")
    b = emit_report(run(build_config(settings)), "json")
    return Criterion(13, "byte-identical JSON for identical config and seed", a == b, 0.0 if a == b else 1.0, 0.5)


CRITERIA = [
    criterion_1_frames,
    criterion_2_transnormal,
    criterion_3_curvature_relation,
    criterion_4_tau,
    criterion_5_shape_relation,
    criterion_6_dtau,
    criterion_7_slice_curvatures,
    criterion_8_cartan,
    criterion_9_corollary,
    criterion_10_chart,
    criterion_11_isometries,
    criterion_12_negative_control,
    criterion_13_determinism,
]


def run_all() -> list[Criterion]:
    return [c() for c in CRITERIA]
