"""Lorentzian warped products -I x_rho F of constant curvature.

Vector fields are evaluation closures ``field(EventPoint) -> EventVector``.
The fiber part of the Levi-Civita connection is obtained by differentiating
in the embedding space and projecting back onto the model quadric; the
warping terms are added in closed form.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

from .errors import ContractError, DomainError
from .numkernel import DEFAULT_TOL, fd_derivative
from .spaceform import Fiber, FiberKind


@dataclass(frozen=True)
class WarpingProfile:
    name: str
    eval: Callable[[float], float]
    d1: Callable[[float], float]
    d2: Callable[[float], float]


COS = WarpingProfile("cos", math.cos, lambda t: -math.sin(t), lambda t: -math.cos(t))
ONE = WarpingProfile("one", lambda t: 1.0, lambda t: 0.0, lambda t: 0.0)
COSH = WarpingProfile("cosh", math.cosh, math.sinh, math.cosh)

_STANDARD = {
    -1: (FiberKind.HYPERBOLIC, COS, (-math.pi / 2, math.pi / 2)),
    0: (FiberKind.EUCLIDEAN, ONE, (-math.inf, math.inf)),
    1: (FiberKind.SPHERE, COSH, (-math.inf, math.inf)),
}


@dataclass(frozen=True)
class SpaceFormModel:
    cbar: int
    fiber: Fiber
    interval: tuple[float, float]
    profile: WarpingProfile

    def __post_init__(self):
        if self.cbar not in _STANDARD:
            raise ContractError(f"cbar must be -1, 0 or 1, got {self.cbar}")
        kind, profile, (lo, hi) = _STANDARD[self.cbar]
        if self.fiber.kind is not kind or self.profile.name != profile.name:
            raise ContractError(f"cbar={self.cbar} requires rho={profile.name}, F={kind.value}")
        if self.interval[0] < lo or self.interval[1] > hi or self.interval[0] >= self.interval[1]:
            raise ContractError(f"interval {self.interval} not inside {(lo, hi)}")

    @property
    def n(self) -> int:
        return self.fiber.dim - 1

    def rho(self, t: float) -> float:
        return self.profile.eval(t)

    def hubble(self, t: float) -> float:
        """rho'/rho at t."""
        return self.profile.d1(t) / self.profile.eval(t)

    def contains(self, t: float) -> bool:
        return self.interval[0] < t < self.interval[1]


def space_form(cbar: int, n: int) -> SpaceFormModel:
    if cbar not in _STANDARD:
        raise ContractError(f"cbar must be -1, 0 or 1, got {cbar}")
    kind, profile, interval = _STANDARD[cbar]
    return SpaceFormModel(cbar, Fiber(kind, n + 1), interval, profile)


@dataclass(frozen=True)
class EventPoint:
    t: float
    p: np.ndarray


@dataclass(frozen=True)
class EventVector:
    base: EventPoint
    vt: float
    vF: np.ndarray

    def as_array(self) -> np.ndarray:
        return np.concatenate([[self.vt], self.vF])

    def __add__(self, other: "EventVector") -> "EventVector":
        return EventVector(self.base, self.vt + other.vt, self.vF + other.vF)

    def __sub__(self, other: "EventVector") -> "EventVector":
        return EventVector(self.base, self.vt - other.vt, self.vF - other.vF)

    def __mul__(self, c: float) -> "EventVector":
        return EventVector(self.base, c * self.vt, c * self.vF)

    __rmul__ = __mul__


Field = Callable[[EventPoint], EventVector]


def _same_base(U: EventVector, V: EventVector):
    a, b = U.base, V.base
    if a is b:
        return
    if a.t != b.t or not np.array_equal(a.p, b.p):
        raise ContractError("vectors are based at different events")


def ambient_metric(model: SpaceFormModel, U: EventVector, V: EventVector) -> float:
    """-dt^2 + rho(t)^2 g_F."""
    _same_base(U, V)
    rho = model.rho(U.base.t)
    return -U.vt * V.vt + rho * rho * model.fiber.pair(U.vF, V.vF)


def curvature_relation_residual(model: SpaceFormModel, t: float) -> tuple[float, float]:
    """Residuals of rho''/rho = cbar and (c + rho'^2)/rho^2 = cbar."""
    rho, d1, d2 = model.profile.eval(t), model.profile.d1(t), model.profile.d2(t)
    c = model.fiber.curvature
    return d2 / rho - model.cbar, (c + d1 * d1) / (rho * rho) - model.cbar


def event_curve(model: SpaceFormModel, at: EventPoint, X: EventVector) -> Callable[[float], EventPoint]:
    """A curve through ``at`` with velocity ``X`` (fiber part along a geodesic)."""
    fiber = model.fiber
    xF = fiber.project(at.p, X.vF)

    def curve(u: float) -> EventPoint:
        return EventPoint(at.t + X.vt * u, fiber.geodesic(at.p, xF, u))

    return curve


def flat_derivative(model: SpaceFormModel, X: EventVector, Y: Field, at: EventPoint) -> np.ndarray:
    """Derivative of the components of ``Y`` along ``X`` in R x R^m (no connection terms)."""
    curve = event_curve(model, at, X)
    return fd_derivative(lambda u: Y(curve(u)).as_array(), 0.0)


def ambient_cov_deriv(
    model: SpaceFormModel,
    X: Union[EventVector, Field],
    Y: Field,
    at: EventPoint,
) -> EventVector:
    """Levi-Civita derivative of the field ``Y`` along ``X`` at ``at``.

    Warped-product rules: D_{d_t} d_t = 0, D_V d_t = D_{d_t} V = (rho'/rho) V for
    lifts V, and the fiber-fiber term picks up (rho'/rho) rho^2 g_F(V, W) d_t.
    """
    if callable(X):
        X = X(at)
    fiber = model.fiber
    h = model.hubble(at.t)
    rho = model.rho(at.t)
    xF = fiber.project(at.p, X.vF)
    Y0 = Y(at)
    d = flat_derivative(model, X, Y, at)
    vt = d[0] + h * rho * rho * fiber.pair(xF, Y0.vF)
    vF = fiber.project(at.p, d[1:]) + h * (X.vt * Y0.vF + Y0.vt * xF)
    return EventVector(at, float(vt), vF)


def lie_bracket(model: SpaceFormModel, X: Field, Y: Field, at: EventPoint) -> EventVector:
    """[X, Y] from flat derivatives in the embedding space."""
    d = flat_derivative(model, X(at), Y, at) - flat_derivative(model, Y(at), X, at)
    return EventVector(at, float(d[0]), model.fiber.project(at.p, d[1:]))


def embedding_signature(model: SpaceFormModel) -> np.ndarray:
    """Diagonal of the flat metric of the linear space the model embeds into."""
    m = model.fiber.embed_dim
    if model.cbar == 0:
        return np.concatenate([[-1.0], np.ones(m)])
    if model.cbar == 1:
        return np.concatenate([[-1.0], np.ones(m)])
    return np.concatenate([[-1.0, -1.0], np.ones(m - 1)])


def embed_isometry(model: SpaceFormModel, e: EventPoint) -> np.ndarray:
    """(sinh t, cosh t p) into de Sitter, (sin t, cos t p) into anti de Sitter.

    For cbar = 0 the map is the identity (t, p) into Minkowski space.
    """
    p = np.asarray(e.p, dtype=float)
    if model.cbar == 0:
        return np.concatenate([[e.t], p])
    if model.cbar == 1:
        return np.concatenate([[math.sinh(e.t)], math.cosh(e.t) * p])
    if not model.contains(e.t):
        raise DomainError(f"t={e.t} outside {model.interval}")
    return np.concatenate([[math.sin(e.t)], math.cos(e.t) * p])


def embedding_quadric_residual(model: SpaceFormModel, x: np.ndarray) -> float:
    """<x, x> - 1 (de Sitter) or <x, x> + 1 (anti de Sitter); 0 for Minkowski."""
    if model.cbar == 0:
        return 0.0
    val = float(np.sum(embedding_signature(model) * x * x))
    return val - 1.0 if model.cbar == 1 else val + 1.0


def check_event(model: SpaceFormModel, e: EventPoint, tol: float = DEFAULT_TOL.abs_eq):
    if not model.contains(e.t):
        raise DomainError(f"t={e.t} outside {model.interval}")
    model.fiber.check_point(e.p, tol)
