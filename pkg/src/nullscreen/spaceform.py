"""Riemannian space forms R^{n+1}, S^{n+1} and H^{n+1} in embedding coordinates.

Sphere points live in Euclidean R^{n+2}; hyperbolic points live on the upper
sheet of the hyperboloid <p,p> = -1 in Minkowski space R^{n+2}_1 with the
timelike coordinate first. Points and tangent vectors are plain numpy arrays;
:class:`FiberVector` bundles a vector with its base point where the base
matters for a contract.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import ContractError, DomainError
from .numkernel import DEFAULT_TOL, fd_derivative


class FiberKind(enum.Enum):
    EUCLIDEAN = "euclidean"
    SPHERE = "sphere"
    HYPERBOLIC = "hyperbolic"


_CURVATURE = {FiberKind.EUCLIDEAN: 0.0, FiberKind.SPHERE: 1.0, FiberKind.HYPERBOLIC: -1.0}


@dataclass(frozen=True)
class FiberVector:
    base: np.ndarray
    comps: np.ndarray


@dataclass(frozen=True)
class Fiber:
    kind: FiberKind
    dim: int  # intrinsic dimension n+1

    def __post_init__(self):
        if self.dim < 1:
            raise ContractError("fiber dimension must be >= 1")

    @property
    def curvature(self) -> float:
        return _CURVATURE[self.kind]

    @property
    def embed_dim(self) -> int:
        return self.dim if self.kind is FiberKind.EUCLIDEAN else self.dim + 1

    # -- linear structure of the embedding space -------------------------------

    def pair(self, u, v) -> float:
        """Bilinear form of the embedding space (Lorentzian for the hyperboloid)."""
        u = np.asarray(u, dtype=float)
        v = np.asarray(v, dtype=float)
        if self.kind is FiberKind.HYPERBOLIC:
            return float(-u[0] * v[0] + u[1:] @ v[1:])
        return float(u @ v)

    def constraint(self, p) -> float:
        if self.kind is FiberKind.SPHERE:
            return self.pair(p, p) - 1.0
        if self.kind is FiberKind.HYPERBOLIC:
            return self.pair(p, p) + 1.0
        return 0.0

    def check_point(self, p, tol: float = DEFAULT_TOL.abs_eq) -> np.ndarray:
        p = np.asarray(p, dtype=float)
        if p.shape != (self.embed_dim,):
            raise ContractError(f"expected {self.embed_dim} coordinates, got shape {p.shape}")
        scale = 1.0 + float(p @ p)
        if abs(self.constraint(p)) > tol * scale:
            raise DomainError(f"point violates the {self.kind.value} constraint")
        if self.kind is FiberKind.HYPERBOLIC and p[0] <= 0:
            raise DomainError("hyperboloid point must lie on the upper sheet")
        return p

    def project(self, p, v) -> np.ndarray:
        """Orthogonal projection of an embedding-space vector onto T_pF."""
        v = np.asarray(v, dtype=float)
        if self.kind is FiberKind.SPHERE:
            return v - (p @ v) * p
        if self.kind is FiberKind.HYPERBOLIC:
            return v + self.pair(p, v) * np.asarray(p)
        return v.copy()

    def tangency(self, p, v) -> float:
        if self.kind is FiberKind.EUCLIDEAN:
            return 0.0
        return abs(self.pair(p, v))

    def norm(self, v) -> float:
        return math.sqrt(max(self.pair(v, v), 0.0))

    def tangent_basis(self, p) -> np.ndarray:
        """Rows form a g_F-orthonormal basis of T_pF."""
        basis: list[np.ndarray] = []
        for e in np.eye(self.embed_dim):
            w = self.project(p, e)
            for b in basis:
                w = w - self.pair(w, b) * b
            nrm = self.norm(w)
            if nrm > 1e-6:
                basis.append(w / nrm)
            if len(basis) == self.dim:
                break
        return np.array(basis)

    def origin(self) -> np.ndarray:
        o = np.zeros(self.embed_dim)
        if self.kind is not FiberKind.EUCLIDEAN:
            o[0] = 1.0
        return o

    # -- geodesics ---------------------------------------------------------------

    def geodesic(self, p, v, s: float) -> np.ndarray:
        """Point at parameter ``s`` on the geodesic with initial velocity ``v``."""
        p = np.asarray(p, dtype=float)
        v = np.asarray(v, dtype=float)
        if self.kind is FiberKind.EUCLIDEAN:
            return p + s * v
        speed = self.norm(v)
        if speed == 0.0:
            return p.copy()
        theta = s * speed
        if self.kind is FiberKind.SPHERE:
            return math.cos(theta) * p + math.sin(theta) / speed * v
        return math.cosh(theta) * p + math.sinh(theta) / speed * v

    def geodesic_velocity(self, p, v, s: float) -> np.ndarray:
        p = np.asarray(p, dtype=float)
        v = np.asarray(v, dtype=float)
        if self.kind is FiberKind.EUCLIDEAN:
            return v.copy()
        speed = self.norm(v)
        if speed == 0.0:
            return np.zeros_like(p)
        theta = s * speed
        if self.kind is FiberKind.SPHERE:
            return -speed * math.sin(theta) * p + math.cos(theta) * v
        return speed * math.sinh(theta) * p + math.cosh(theta) * v

    def exp_map(self, q, v, s: float, tol: float = DEFAULT_TOL.abs_eq) -> np.ndarray:
        """exp_q(s v) for a unit tangent vector ``v``.

        Non-unit or non-tangent directions are rejected; callers normalize.
        """
        q = np.asarray(q, dtype=float)
        v = np.asarray(v, dtype=float)
        if self.tangency(q, v) > tol:
            raise ContractError("direction is not tangent at q")
        if abs(self.pair(v, v) - 1.0) > tol:
            raise ContractError("exp_map expects a unit direction")
        return self.geodesic(q, v, s)

    def distance(self, p, q, tol: float = DEFAULT_TOL.abs_eq) -> float:
        p = np.asarray(p, dtype=float)
        q = np.asarray(q, dtype=float)
        if self.kind is FiberKind.EUCLIDEAN:
            return float(np.linalg.norm(p - q))
        if self.kind is FiberKind.SPHERE:
            c = self.pair(p, q)
            if abs(c) > 1.0 + tol:
                raise DomainError(f"sphere pairing {c} outside [-1, 1]")
            chord = float(np.linalg.norm(p - q))
            return 2.0 * math.asin(min(1.0, 0.5 * chord))
        c = -self.pair(p, q)
        if c < 1.0 - tol:
            raise DomainError(f"hyperboloid pairing {c} below 1")
        # arccosh loses half the digits near c = 1; use the chord instead
        chord = self.norm(p - q)
        return 2.0 * math.asinh(0.5 * chord)

    # -- metric on FiberVectors --------------------------------------------------

    def metric(self, X: FiberVector, Y: FiberVector) -> float:
        if not np.array_equal(np.asarray(X.base), np.asarray(Y.base)):
            raise ContractError("fiber_metric needs vectors at the same base point")
        return self.pair(X.comps, Y.comps)


def fiber_metric(fiber: Fiber, X: FiberVector, Y: FiberVector) -> float:
    return fiber.metric(X, Y)


def fd_gradient(fiber: Fiber, f, q) -> np.ndarray:
    """Gradient of ``f`` at ``q`` from central differences along an orthonormal frame."""
    grad = np.zeros(fiber.embed_dim)
    for e in fiber.tangent_basis(q):
        grad += fd_derivative(lambda s: f(fiber.geodesic(q, e, s)), 0.0) * e
    return grad


def fiber_gradient(graph, q, analytic: bool = True) -> FiberVector:
    """Gradient of ``graph.f`` at ``q`` as a tangent vector of the fiber.

    Uses the graph's analytic gradient when it has one (and ``analytic`` is
    set); otherwise differentiates numerically.
    """
    fiber = graph.model.fiber
    q = np.asarray(q, dtype=float)
    if not graph.domain(q):
        raise DomainError(f"{graph.label}: point outside the domain of f")
    if analytic and graph.grad_f is not None:
        comps = fiber.project(q, graph.grad_f(q))
    else:
        comps = fd_gradient(fiber, graph.f, q)
    return FiberVector(q, comps)
