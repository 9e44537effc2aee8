"""Screen principal curvatures, slice curvatures and Cartan identities."""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from .errors import ContractError
from .grw import EventPoint
from .nullhyp import NullFrame, ShapeData, TransnormalGraph, build_null_frame, compute_shape
from .numkernel import DEFAULT_TOL, Tolerances, cluster_values, fd_derivative, sym_eigen, symmetrize

SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True)
class CorollaryVerdict:
    ok: bool
    applicable: bool
    reason: str
    relation_residual: float = 0.0


@dataclass(frozen=True)
class SpectrumReport:
    at: EventPoint
    cbar: int
    rho: float
    hubble: float
    eigenvalues: tuple[float, ...]
    lambdas: tuple[tuple[float, int], ...]
    nus: tuple[tuple[float, int], ...]
    cartan_residuals: tuple[float, ...] = ()
    corollary: CorollaryVerdict | None = None

    @property
    def l(self) -> int:
        return len(self.lambdas)

    @property
    def psi(self) -> float:
        return SQRT2 * self.hubble

    @property
    def corollary_ok(self) -> bool:
        return self.corollary is not None and self.corollary.ok


def cartan_residuals(lambdas: Sequence[tuple[float, int]], cbar: float, psi: float) -> tuple[float, ...]:
    """sum_{j != i} m_j (cbar + 2 l_i l_j + psi (l_i + l_j)) / (l_i - l_j), one per i."""
    out = []
    for i, (li, _) in enumerate(lambdas):
        total = 0.0
        for j, (lj, mj) in enumerate(lambdas):
            if j == i:
                continue
            if li == lj:
                raise ContractError("coincident principal curvatures in Cartan sum")
            total += mj * (cbar + 2 * li * lj + psi * (li + lj)) / (li - lj)
        out.append(total)
    return tuple(out)


def make_report(
    lambdas: Sequence[tuple[float, int]],
    cbar: int,
    t: float = 0.0,
    rho: float = 1.0,
    hubble: float = 0.0,
    tol: Tolerances = DEFAULT_TOL,
    at: EventPoint | None = None,
    eigenvalues: Sequence[float] | None = None,
) -> SpectrumReport:
    """Assemble a report from clustered values (also handy for synthetic spectra)."""
    lambdas = tuple((float(v), int(m)) for v, m in sorted(lambdas))
    if eigenvalues is None:
        eigenvalues = [v for v, m in lambdas for _ in range(m)]
    nus = tuple((SQRT2 * v + hubble, m) for v, m in lambdas)
    rep = SpectrumReport(
        at=at if at is not None else EventPoint(t, np.zeros(0)),
        cbar=cbar,
        rho=rho,
        hubble=hubble,
        eigenvalues=tuple(float(x) for x in eigenvalues),
        lambdas=lambdas,
        nus=nus,
    )
    if rep.l > 1:
        rep = replace(rep, cartan_residuals=cartan_residuals(lambdas, cbar, rep.psi))
    return replace(rep, corollary=check_corollary(rep, cbar, tol))


def check_corollary(report: SpectrumReport, cbar: int, tol: Tolerances = DEFAULT_TOL) -> CorollaryVerdict:
    if cbar not in (0, -1):
        return CorollaryVerdict(True, False, "not applicable for cbar=1")
    l = report.l
    if l > 2:
        return CorollaryVerdict(False, True, f"l={l} exceeds 2")
    if l == 1:
        return CorollaryVerdict(True, True, "l=1")
    if cbar == 0:
        smallest = min(abs(v) for v, _ in report.lambdas)
        ok = smallest < tol.cluster_rel
        return CorollaryVerdict(ok, True, "zero cluster present" if ok else "no zero cluster", smallest)
    (nu1, _), (nu2, _) = report.nus
    resid = abs(report.rho**2 * nu1 * nu2 - 1.0)
    ok = resid < tol.fd_eq
    return CorollaryVerdict(ok, True, "rho^2 nu1 nu2 = 1" if ok else "rho^2 nu1 nu2 != 1", resid)


def screen_spectrum(
    g: TransnormalGraph,
    frame: NullFrame,
    tol: Tolerances = DEFAULT_TOL,
    shape: ShapeData | None = None,
) -> SpectrumReport:
    if shape is None:
        shape = compute_shape(g, frame)
    vals, _ = sym_eigen(symmetrize(shape.A_star), tol.abs_eq)
    clusters = cluster_values(vals, tol.cluster_rel)
    t = frame.at.t
    return make_report(
        clusters,
        g.model.cbar,
        t=t,
        rho=g.model.rho(t),
        hubble=g.model.hubble(t),
        tol=tol,
        at=frame.at,
        eigenvalues=vals,
    )


@dataclass(frozen=True)
class SliceShape:
    """Shape operator of S_t inside {t} x F under both normalizations.

    ``slice_unit`` uses the unit normal of the slice metric rho^2 g_F in the
    screen basis E_i; ``fiber_unit`` uses the g_F-unit normal in the g_F-unit
    basis rho E_i. The two differ by the factor rho.
    """

    slice_unit: np.ndarray
    fiber_unit: np.ndarray


def slice_shape_operator(g: TransnormalGraph, frame: NullFrame) -> SliceShape:
    fiber = g.model.fiber
    q = frame.at.p
    rho = frame.rho

    def eta(p):
        r = g.model.rho(float(g.f(p)))
        return g.grad(p) / (r * r)

    def unit_normal(p):
        gr = g.grad(p)
        return gr / fiber.norm(gr)

    E = [e.vF for e in frame.screen]
    ehat = [rho * e for e in E]
    n = len(E)
    S = np.zeros((n, n))
    K = np.zeros((n, n))
    for i in range(n):
        d_eta = fiber.project(q, fd_derivative(lambda u: eta(fiber.geodesic(q, E[i], u)), 0.0))
        d_unit = fiber.project(q, fd_derivative(lambda u: unit_normal(fiber.geodesic(q, ehat[i], u)), 0.0))
        for j in range(n):
            S[i, j] = -rho * rho * fiber.pair(d_eta, E[j])
            K[i, j] = -fiber.pair(d_unit, ehat[j])
    return SliceShape(S, K)


def slice_relation(
    g: TransnormalGraph, frame: NullFrame, report: SpectrumReport, slice_shape: SliceShape | None = None
) -> dict[str, float]:
    """Residual of sorted slice curvatures against sqrt2 * lambda + rho'/rho, per normalization."""
    if slice_shape is None:
        slice_shape = slice_shape_operator(g, frame)
    predicted = SQRT2 * np.asarray(report.eigenvalues) + report.hubble
    out = {}
    for name in ("slice_unit", "fiber_unit"):
        m = getattr(slice_shape, name)
        vals = np.linalg.eigvalsh(symmetrize(m))
        out[name] = float(np.max(np.abs(np.sort(vals) - predicted), initial=0.0))
    return out


@dataclass(frozen=True)
class ScanReport:
    t: float
    spectra: np.ndarray  # one row of sorted eigenvalues per sample point
    spread: float
    threshold: float

    @property
    def passed(self) -> bool:
        return self.spread < self.threshold


def isoparametric_scan(
    g: TransnormalGraph, t: float, sample_count: int, rng, tol: Tolerances = DEFAULT_TOL
) -> ScanReport:
    """Screen spectra at ``sample_count`` seeded points of S_t and their spread."""
    if sample_count < 1:
        raise ContractError("sample_count must be >= 1")
    rows = []
    for _ in range(sample_count):
        q = g.sample_slice(t, rng)
        frame = build_null_frame(g, q, tol)
        A = symmetrize(compute_shape(g, frame).A_star)
        rows.append(np.sort(np.linalg.eigvalsh(A)))
    spectra = np.array(rows)
    spread = float(np.max(spectra.max(axis=0) - spectra.min(axis=0), initial=0.0))
    return ScanReport(t, spectra, spread, 10 * tol.fd_eq)
