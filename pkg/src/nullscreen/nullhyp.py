"""Null hypersurfaces M = graph(f) of transnormal functions |grad f| = rho o f.

Along M we use

    xi  = (1, grad f / rho^2) / sqrt 2,
    N   = (-1, grad f / rho^2) / sqrt 2,
    eta = (0, grad f / rho^2) = (xi + N) / sqrt 2,

and the screen spanned by tangents of the slices S_t = M n ({t} x F). Fields
on M depend only on the fiber point q (the time coordinate is f(q)).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import ContractError, DomainError
from .grw import (
    EventPoint,
    EventVector,
    Field,
    SpaceFormModel,
    ambient_cov_deriv,
    ambient_metric,
    event_curve,
    lie_bracket,
)
from .numkernel import DEFAULT_TOL, NESTED_STEP, Tolerances, asymmetry, fd_derivative
from .spaceform import fiber_gradient

SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True)
class TransnormalGraph:
    """A fiber function whose graph is (meant to be) a null hypersurface.

    ``sample_slice(t, rng)`` returns a point of the level set f = t and
    ``t_range`` bounds the slices that are safe to sample. ``control`` marks
    negative controls that are not genuinely transnormal.
    """

    model: SpaceFormModel
    f: Callable[[np.ndarray], float]
    grad_f: Optional[Callable[[np.ndarray], np.ndarray]] = None
    domain: Callable[[np.ndarray], bool] = lambda q: True
    label: str = "graph"
    t_range: tuple[float, float] = (-1.0, 1.0)
    sample_slice: Optional[Callable] = None
    control: bool = False
    params: dict = field(default_factory=dict)

    @property
    def n(self) -> int:
        return self.model.n

    def grad(self, q) -> np.ndarray:
        return fiber_gradient(self, q).comps

    def sample_point(self, rng) -> np.ndarray:
        t = rng.uniform(*self.t_range)
        return self.sample_slice(t, rng)


@dataclass(frozen=True)
class NullFrame:
    at: EventPoint
    xi: EventVector
    N: EventVector
    screen: tuple[EventVector, ...]
    grad: np.ndarray
    rho: float

    @property
    def eta(self) -> EventVector:
        return EventVector(self.at, 0.0, self.grad / self.rho**2)

    def screen_fiber(self) -> np.ndarray:
        """Rows: fiber parts of E_1..E_n rescaled to g_F-unit length."""
        return np.array([self.rho * E.vF for E in self.screen])


def transnormal_residual(g: TransnormalGraph, q) -> float:
    q = np.asarray(q, dtype=float)
    if not g.domain(q):
        raise DomainError(f"{g.label}: point outside the domain of f")
    t = g.f(q)
    return abs(g.model.fiber.norm(g.grad(q)) - g.model.rho(t))


def _screen_basis(fiber, q, grad, rho, candidates=None, renormalize=True) -> list[np.ndarray]:
    """Fiber parts of a rho^2 g_F-orthonormal basis of T_q S_t.

    Without ``candidates`` the standard basis of the embedding space is used
    with pivoting (largest residual first), which is deterministic.
    """
    gnorm2 = fiber.pair(grad, grad)

    def reduce(v, basis):
        w = fiber.project(q, v)
        w = w - fiber.pair(w, grad) / gnorm2 * grad
        for b in basis:
            w = w - fiber.pair(w, b) / fiber.pair(b, b) * b
        return w

    n = fiber.dim - 1
    basis: list[np.ndarray] = []
    if candidates is None:
        pool = list(np.eye(fiber.embed_dim))
        while len(basis) < n:
            reduced = [reduce(v, basis) for v in pool]
            k = int(np.argmax([fiber.norm(w) for w in reduced]))
            w = reduced[k]
            if fiber.norm(w) < 1e-6:
                raise ContractError("degenerate screen completion")
            # one reorthogonalization pass keeps pairings at round-off level
            w = reduce(w, basis)
            basis.append(w / (fiber.norm(w) * rho))
            pool.pop(k)
        return basis
    for v in candidates:
        w = reduce(v, basis) if renormalize else reduce(v, [])
        if renormalize:
            w = reduce(w, basis)
        basis.append(w / (fiber.norm(w) * rho))
    return basis


def build_null_frame(g: TransnormalGraph, q, tol: Tolerances = DEFAULT_TOL) -> NullFrame:
    fiber = g.model.fiber
    q = fiber.check_point(q, tol.abs_eq)
    res = transnormal_residual(g, q)
    if res >= tol.fd_eq:
        raise ContractError(f"{g.label}: not transnormal at q (residual {res:.3e})")
    t = float(g.f(q))
    if not g.model.contains(t):
        raise DomainError(f"{g.label}: f(q)={t} outside {g.model.interval}")
    rho = g.model.rho(t)
    grad = g.grad(q)
    at = EventPoint(t, q)
    w = grad / (rho * rho)
    xi = EventVector(at, 1 / SQRT2, w / SQRT2)
    N = EventVector(at, -1 / SQRT2, w / SQRT2)
    screen = tuple(EventVector(at, 0.0, e) for e in _screen_basis(fiber, q, grad, rho))
    return NullFrame(at, xi, N, screen, grad, rho)


def frame_pairings(model: SpaceFormModel, frame: NullFrame) -> dict[str, float]:
    """Deviation of each null-frame pairing from its required value."""
    m = lambda U, V: ambient_metric(model, U, V)
    xi, N, E = frame.xi, frame.N, frame.screen
    n = len(E)
    gram = np.array([[m(E[i], E[j]) for j in range(n)] for i in range(n)])
    return {
        "xi.xi": abs(m(xi, xi)),
        "N.N": abs(m(N, N)),
        "xi.N": abs(m(xi, N) - 1.0),
        "N.E": max((abs(m(N, e)) for e in E), default=0.0),
        "xi.E": max((abs(m(xi, e)) for e in E), default=0.0),
        "E.E": float(np.max(np.abs(gram - np.eye(n)))) if n else 0.0,
        "eta.eta": abs(m(frame.eta, frame.eta) - 1.0),
    }


# -- fields along M ------------------------------------------------------------


def _null_field(g: TransnormalGraph, sign_t: float, scale_t: float) -> Field:
    model = g.model

    def field(e: EventPoint) -> EventVector:
        q = e.p
        t = float(g.f(q))
        rho = model.rho(t)
        w = g.grad(q) / (rho * rho)
        return EventVector(EventPoint(t, q), sign_t * scale_t, scale_t * w)

    return field


def xi_field(g: TransnormalGraph) -> Field:
    return _null_field(g, 1.0, 1 / SQRT2)


def N_field(g: TransnormalGraph) -> Field:
    return _null_field(g, -1.0, 1 / SQRT2)


def eta_field(g: TransnormalGraph) -> Field:
    return _null_field(g, 0.0, 1.0)


def screen_fields(g: TransnormalGraph, frame: NullFrame, extension: str = "gram_schmidt") -> list[Field]:
    """Extend E_1..E_n to screen fields near the base point.

    ``gram_schmidt`` re-orthonormalizes the projected base vectors at every
    point; ``projection`` only projects and rescales them. Both agree at the
    base point, so tensorial quantities must not depend on the choice.
    """
    if extension not in ("gram_schmidt", "projection"):
        raise ContractError(f"unknown extension {extension!r}")
    fiber = g.model.fiber
    candidates = [E.vF for E in frame.screen]
    renorm = extension == "gram_schmidt"

    def make(i: int) -> Field:
        def field(e: EventPoint) -> EventVector:
            q = e.p
            t = float(g.f(q))
            rho = g.model.rho(t)
            basis = _screen_basis(fiber, q, g.grad(q), rho, candidates[: i + 1], renorm)
            return EventVector(EventPoint(t, q), 0.0, basis[i])

        return field

    return [make(i) for i in range(len(candidates))]


def tangent_fields(g: TransnormalGraph, frame: NullFrame) -> dict[str, Field]:
    out = {"xi": xi_field(g)}
    for i, F in enumerate(screen_fields(g, frame)):
        out[f"E{i + 1}"] = F
    return out


def curve_on_M(g: TransnormalGraph, at: EventPoint, X: EventVector):
    """Curve u -> (f(c(u)), c(u)) with c a fiber geodesic along the fiber part of X."""
    base = event_curve(g.model, at, X)

    def curve(u: float) -> EventPoint:
        p = base(u).p
        return EventPoint(float(g.f(p)), p)

    return curve


# -- tau and shape operators ---------------------------------------------------


def _require_tangent(model, frame: NullFrame, X: EventVector, tol: Tolerances):
    scale = 1.0 + abs(X.vt) + float(np.linalg.norm(X.vF))
    if abs(ambient_metric(model, X, frame.xi)) > tol.fd_eq * scale:
        raise ContractError("vector is not tangent to M")


def tau_eval(g: TransnormalGraph, frame: NullFrame, X: EventVector, tol: Tolerances = DEFAULT_TOL) -> float:
    """tau(X) = <D_X N, xi> for X tangent to M."""
    model = g.model
    X = EventVector(frame.at, X.vt, X.vF)
    _require_tangent(model, frame, X, tol)
    DN = ambient_cov_deriv(model, X, N_field(g), frame.at)
    return ambient_metric(model, DN, frame.xi)


@dataclass(frozen=True)
class ShapeData:
    frame: NullFrame
    A_star: np.ndarray
    A_N: np.ndarray
    tau_screen: np.ndarray
    tau_xi: float
    # <D_{E_i} xi, N>; equals -tau(E_i)
    radical_xi: np.ndarray
    # <A_N E_i, N>
    A_N_normal: np.ndarray
    A_star_xi: np.ndarray
    A_N_xi: np.ndarray

    @property
    def asymmetry(self) -> float:
        return max(asymmetry(self.A_star), asymmetry(self.A_N))


def compute_shape(g: TransnormalGraph, frame: NullFrame) -> ShapeData:
    model = g.model
    at = frame.at
    m = lambda U, V: ambient_metric(model, U, V)
    xiF, NF = xi_field(g), N_field(g)
    E = frame.screen
    n = len(E)
    A_star = np.zeros((n, n))
    A_N = np.zeros((n, n))
    tau_screen = np.zeros(n)
    radical = np.zeros(n)
    A_N_normal = np.zeros(n)
    for i in range(n):
        Dxi = ambient_cov_deriv(model, E[i], xiF, at)
        DN = ambient_cov_deriv(model, E[i], NF, at)
        for j in range(n):
            A_star[i, j] = -m(Dxi, E[j])
            A_N[i, j] = -m(DN, E[j])
        tau_screen[i] = m(DN, frame.xi)
        radical[i] = m(Dxi, frame.N)
        A_N_normal[i] = -m(DN, frame.N)
    Dxi_xi = ambient_cov_deriv(model, frame.xi, xiF, at)
    DN_xi = ambient_cov_deriv(model, frame.xi, NF, at)
    A_star_xi = np.array([-m(Dxi_xi, e) for e in E])
    A_N_xi = np.array([-m(DN_xi, e) for e in E])
    tau_xi = m(DN_xi, frame.xi)
    return ShapeData(frame, A_star, A_N, tau_screen, tau_xi, radical, A_N_normal, A_star_xi, A_N_xi)


def shape_operator_screen(g: TransnormalGraph, frame: NullFrame) -> np.ndarray:
    """Matrix of A_xi^* on the screen basis, g(A_xi^* E_i, E_j) = -<D_{E_i} xi, E_j>."""
    return compute_shape(g, frame).A_star


def shape_operator_transversal(g: TransnormalGraph, frame: NullFrame) -> np.ndarray:
    """Screen block of A_N, g(A_N E_i, E_j) = -<D_{E_i} N, E_j>."""
    return compute_shape(g, frame).A_N


def fundamental_forms(g: TransnormalGraph, frame: NullFrame, extension: str = "gram_schmidt"):
    """B(E_i, E_j) = <D_{E_i} E_j, xi> and C(E_i, E_j) = <D_{E_i} E_j, N>.

    Computed by differentiating the extended screen fields, independently
    of the shape operators.
    """
    model = g.model
    fields = screen_fields(g, frame, extension)
    n = len(fields)
    B = np.zeros((n, n))
    C = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            D = ambient_cov_deriv(model, frame.screen[i], fields[j], frame.at)
            B[i, j] = ambient_metric(model, D, frame.xi)
            C[i, j] = ambient_metric(model, D, frame.N)
    return B, C


def forms_on_radical(g: TransnormalGraph, frame: NullFrame):
    """B(xi, E_i) and C(xi, E_i) for each screen vector."""
    model = g.model
    fields = screen_fields(g, frame)
    B = np.zeros(len(fields))
    C = np.zeros(len(fields))
    for i, F in enumerate(fields):
        D = ambient_cov_deriv(model, frame.xi, F, frame.at)
        B[i] = ambient_metric(model, D, frame.xi)
        C[i] = ambient_metric(model, D, frame.N)
    return B, C


def shape_relation_residual(g: TransnormalGraph, frame: NullFrame, shape: ShapeData | None = None) -> float:
    """max |(A_N - A_xi^*)/sqrt 2 - (rho'/rho) Id| on the screen, with both operators on xi."""
    if shape is None:
        shape = compute_shape(g, frame)
    h = g.model.hubble(frame.at.t)
    n = shape.A_star.shape[0]
    block = (shape.A_N - shape.A_star) / SQRT2 - h * np.eye(n)
    parts = [np.max(np.abs(block), initial=0.0)]
    parts.append(np.max(np.abs(shape.A_star_xi), initial=0.0))
    parts.append(np.max(np.abs(shape.A_N_xi), initial=0.0))
    return float(max(parts))


def tau_function(g: TransnormalGraph, Y: Field) -> Callable[[EventPoint], float]:
    model = g.model
    NF, xiF = N_field(g), xi_field(g)

    def tau_of(e: EventPoint) -> float:
        at = EventPoint(float(g.f(e.p)), e.p)
        DN = ambient_cov_deriv(model, Y(at), NF, at)
        return ambient_metric(model, DN, xiF(at))

    return tau_of


def dtau_residual(g: TransnormalGraph, frame: NullFrame, X: Field, Y: Field) -> float:
    """|2 dtau(X, Y)| = |X(tau(Y)) - Y(tau(X)) - tau([X, Y])| for fields tangent to M."""
    if X is Y:
        return 0.0
    at = frame.at
    tauX, tauY = tau_function(g, X), tau_function(g, Y)
    cX = curve_on_M(g, at, X(at))
    cY = curve_on_M(g, at, Y(at))
    X_tauY = fd_derivative(lambda u: tauY(cX(u)), 0.0, step=NESTED_STEP)
    Y_tauX = fd_derivative(lambda u: tauX(cY(u)), 0.0, step=NESTED_STEP)
    bracket = lie_bracket(g.model, X, Y, at)
    tau_br = tau_eval(g, frame, bracket)
    return abs(X_tauY - Y_tauX - tau_br)
