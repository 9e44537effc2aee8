"""The normal-exponential chart Phi(s, q) = (f(exp_q(s eta(q))), exp_q(s eta(q))).

Two normalizations of eta are carried side by side:

* ``fiber_unit``: eta is g_F-unit and the geodesic is unit speed in F; the
  curvatures are those of S_t in (F, g_F), kappa_i = rho(t) nu_i, and the
  spatial block is compared in the fiber metric g_F;
* ``slice_unit``: eta is unit for the slice metric rho(t)^2 g_F, the curvatures
  are nu_i = sqrt2 lambda_i + rho'/rho, and the spatial block is the ambient
  pullback in a screen-orthonormal basis.

The closed forms compared against are the tube factors
(C(s) - nu S(s))^2 with (C, S) = (cosh, sinh), (1, s), (cos, sin) for
hyperbolic, flat and spherical fibers.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ContractError, DomainError, FocalPointError
from .grw import EventPoint
from .isoparam import SpectrumReport, screen_spectrum, slice_shape_operator
from .nullhyp import TransnormalGraph, build_null_frame
from .numkernel import DEFAULT_TOL, Tolerances, fd_derivative, symmetrize
from .spaceform import FiberKind

CONVENTIONS = ("fiber_unit", "slice_unit")


def tube_factor(kind: FiberKind, s: float, nu: float) -> float:
    if kind is FiberKind.HYPERBOLIC:
        return math.cosh(s) - nu * math.sinh(s)
    if kind is FiberKind.SPHERE:
        return math.cos(s) - nu * math.sin(s)
    return 1.0 - nu * s


def first_focal_distance(kind: FiberKind, kappa: float) -> float:
    """Smallest |s| at which the tube factor for curvature ``kappa`` vanishes."""
    if kappa == 0.0:
        return math.pi / 2 if kind is FiberKind.SPHERE else math.inf
    if kind is FiberKind.EUCLIDEAN:
        return abs(1.0 / kappa)
    if kind is FiberKind.SPHERE:
        return abs(math.atan(1.0 / kappa))
    if abs(kappa) <= 1.0:
        return math.inf
    return abs(math.atanh(1.0 / kappa))


@dataclass(frozen=True)
class ChartPatch:
    entry: TransnormalGraph
    base_t: float
    base_points: tuple[np.ndarray, ...]
    eps: float
    nu_base: SpectrumReport

    @property
    def rho(self) -> float:
        return self.entry.model.rho(self.base_t)


def _unit_normal(g: TransnormalGraph, q) -> np.ndarray:
    gr = g.grad(q)
    return gr / g.model.fiber.norm(gr)


def _fiber_point(g: TransnormalGraph, s: float, q, convention: str, rho0: float) -> np.ndarray:
    if convention not in CONVENTIONS:
        raise ContractError(f"unknown convention {convention!r}")
    v = _unit_normal(g, q)
    if convention == "slice_unit":
        v = v / rho0
    return g.model.fiber.geodesic(q, v, s)


def make_patch(
    g: TransnormalGraph,
    t: float,
    count: int,
    rng,
    tol: Tolerances = DEFAULT_TOL,
    eps_cap: float = 0.5,
) -> ChartPatch:
    """Sample base points on S_t and pick eps inside the first focal distance.

    eps is half the first focal distance (both conventions), capped by
    ``eps_cap`` and shrunk until every Phi(+-eps, q) stays in the domain.
    """
    fiber = g.model.fiber
    points = tuple(g.sample_slice(t, rng) for _ in range(count))
    frame = build_null_frame(g, points[0], tol)
    report = screen_spectrum(g, frame, tol)
    rho0 = g.model.rho(t)
    focal = math.inf
    for nu, _ in report.nus:
        # fiber_unit geodesics see kappa = rho nu; slice_unit ones run at speed 1/rho
        focal = min(focal, first_focal_distance(fiber.kind, rho0 * nu))
        focal = min(focal, rho0 * first_focal_distance(fiber.kind, rho0 * nu))
    eps = min(eps_cap, 0.5 * focal)

    def inside(e):
        for q in points:
            for s in (-e, e):
                for conv in CONVENTIONS:
                    p = _fiber_point(g, s, q, conv, rho0)
                    if not g.domain(p) or not g.model.contains(g.f(p)):
                        return False
        return True

    while not inside(eps):
        eps *= 0.7
        if eps < 1e-3:
            raise DomainError(f"{g.label}: no usable chart range at t={t}")
    return ChartPatch(g, t, points, eps, report)


def phi(patch: ChartPatch, s: float, q, convention: str = "fiber_unit") -> EventPoint:
    if abs(s) >= patch.eps:
        raise ContractError(f"s={s} outside (-{patch.eps}, {patch.eps})")
    g = patch.entry
    q = np.asarray(q, dtype=float)
    if abs(g.f(q) - patch.base_t) > 1e-8 * (1 + abs(patch.base_t)):
        raise ContractError("q is not on the base slice")
    p = _fiber_point(g, s, q, convention, patch.rho)
    return EventPoint(float(g.f(p)), p)


def _phi_array(patch, s, q, convention):
    g = patch.entry
    p = _fiber_point(g, s, q, convention, patch.rho)
    return np.concatenate([[g.f(p)], p])


@dataclass(frozen=True)
class ChartDifferential:
    matrix: np.ndarray  # columns: d/ds, then the n slice directions
    basis: np.ndarray  # rows: g_F-unit eigenvectors of the fiber shape operator at q
    kappas: np.ndarray  # fiber-normalized curvatures, kappa = rho nu
    singular_values: np.ndarray

    @property
    def rank(self) -> int:
        sv = self.singular_values
        return int(np.sum(sv > 1e-8 * sv[0]))


def phi_differential(patch: ChartPatch, s: float, q, convention: str = "fiber_unit") -> ChartDifferential:
    """FD differential of Phi in the (s, e_1..e_n) directions.

    e_i diagonalize the shape operator of S_t at q (re-diagonalized per base
    point). Raises FocalPointError if the rank drops below n + 1.
    """
    g = patch.entry
    fiber = g.model.fiber
    q = np.asarray(q, dtype=float)
    if abs(s) >= patch.eps:
        raise ContractError(f"s={s} outside (-{patch.eps}, {patch.eps})")
    frame = build_null_frame(g, q)
    shape = slice_shape_operator(g, frame)
    kappas, vecs = np.linalg.eigh(symmetrize(shape.fiber_unit))
    ehat = frame.screen_fiber()
    basis = vecs.T @ ehat
    cols = [fd_derivative(lambda u: _phi_array(patch, s + u, q, convention), 0.0)]
    for e in basis:
        cols.append(fd_derivative(lambda u: _phi_array(patch, s, fiber.geodesic(q, e, u), convention), 0.0))
    M = np.column_stack(cols)
    sv = np.linalg.svd(M, compute_uv=False)
    out = ChartDifferential(M, basis, kappas, sv)
    if out.rank < len(cols):
        raise FocalPointError(f"{g.label}: dPhi has rank {out.rank} < {len(cols)} at s={s}")
    return out


def column_residual(patch: ChartPatch, s: float, q, diff: ChartDifferential | None = None) -> float:
    """max_i |dPhi(0, e_i) - (0, factor_i e_i)| in the fiber-unit convention."""
    if diff is None:
        diff = phi_differential(patch, s, q)
    kind = patch.entry.model.fiber.kind
    worst = 0.0
    for i, (e, k) in enumerate(zip(diff.basis, diff.kappas)):
        expected = np.concatenate([[0.0], tube_factor(kind, s, k) * e])
        worst = max(worst, float(np.max(np.abs(diff.matrix[:, i + 1] - expected))))
    return worst


@dataclass(frozen=True)
class PullbackResidual:
    gram: dict  # convention -> ambient pullback matrix
    degenerate: float  # |g(dPhi(1,0), dPhi(1,0))|
    cross: float  # max |g(dPhi(1,0), dPhi(0,e_i))|
    spatial: dict  # convention -> max-abs residual of the spatial block

    def selected(self) -> str:
        return min(self.spatial, key=self.spatial.get)


def _ambient_gram(model, t_img: float, M: np.ndarray) -> np.ndarray:
    rho = model.rho(t_img)
    fib = model.fiber
    k = M.shape[1]
    G = np.zeros((k, k))
    for a in range(k):
        for b in range(a, k):
            G[a, b] = G[b, a] = -M[0, a] * M[0, b] + rho * rho * fib.pair(M[1:, a], M[1:, b])
    return G


def pullback_metric_residual(patch: ChartPatch, s: float, q) -> PullbackResidual:
    """Pullback of the ambient metric by Phi against the degenerate warped form.

    The (0,0) entry and the cross terms are compared against 0; the spatial
    block against diag(factor_i^2) under each convention.
    """
    g = patch.entry
    model = g.model
    kind = model.fiber.kind
    rho0 = patch.rho
    grams, spatial = {}, {}
    degenerate = cross = 0.0
    for conv in CONVENTIONS:
        diff = phi_differential(patch, s, q, conv)
        t_img = phi(patch, s, q, conv).t
        G = _ambient_gram(model, t_img, diff.matrix)
        grams[conv] = G
        degenerate = max(degenerate, abs(G[0, 0]))
        cross = max(cross, float(np.max(np.abs(G[0, 1:]), initial=0.0)))
        if conv == "fiber_unit":
            block = G[1:, 1:] / model.rho(t_img) ** 2
            factors = [tube_factor(kind, s, k) for k in diff.kappas]
        else:
            # screen-orthonormal basis E_i = e_i / rho0
            block = G[1:, 1:] / rho0**2
            factors = [tube_factor(kind, s, k / rho0) for k in diff.kappas]
        spatial[conv] = float(np.max(np.abs(block - np.diag(np.square(factors)))))
    return PullbackResidual(grams, degenerate, cross, spatial)
