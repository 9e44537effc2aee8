"""Concrete transnormal functions for the three Lorentzian space forms.

For cbar = +1 and -1 the profiles gd^{-1} and gd (Gudermannian) turn a
distance function r into a solution of f' = cosh f, resp. f' = cos f.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import ContractError
from .grw import space_form
from .nullhyp import TransnormalGraph


def gd(x: float) -> float:
    return 2.0 * math.atan(math.tanh(0.5 * x))


def gd_inv(y: float) -> float:
    return math.asinh(math.tan(y))


@dataclass(frozen=True)
class Expected:
    l: int
    zero_cluster: bool
    reason: str


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    builder: Callable[..., TransnormalGraph]
    defaults: dict
    expected: Optional[Expected] = None
    notes: str = ""
    control: bool = False
    min_n: int = 1


REGISTRY: dict[str, CatalogEntry] = {}


def register(name, defaults, expected=None, notes="", control=False, min_n=1):
    def deco(builder):
        REGISTRY[name] = CatalogEntry(name, builder, defaults, expected, notes, control, min_n)
        return builder

    return deco


def catalog_get(name: str, n: int, **params) -> TransnormalGraph:
    try:
        entry = REGISTRY[name]
    except KeyError:
        raise ContractError(f"unknown catalog entry {name!r}") from None
    unknown = set(params) - set(entry.defaults)
    if unknown:
        raise ContractError(f"{name}: unknown parameters {sorted(unknown)}")
    if n < entry.min_n:
        raise ContractError(f"{name}: needs n >= {entry.min_n}")
    merged = {**entry.defaults, **params}
    return entry.builder(n, **merged)


def _perp_unit(rng, dim: int, exclude: int = 0) -> np.ndarray:
    """Random unit vector in R^dim with zeros in the first ``exclude`` slots."""
    w = np.zeros(dim)
    w[exclude:] = rng.unit_vector(dim - exclude)
    return w


# -- Minkowski (cbar = 0) --------------------------------------------------------


@register("mink_hyperplane", {"c0": 0.0}, Expected(1, True, "flat level sets"), "f = <p,u> + c0, u the normalized diagonal")
def _hyperplane(n, c0):
    model = space_form(0, n)
    u = np.ones(n + 1) / math.sqrt(n + 1)

    def sample_slice(t, rng):
        v = rng.normals(n + 1)
        v -= (v @ u) * u
        return (t - c0) * u + v

    return TransnormalGraph(
        model, lambda p: float(p @ u) + c0, lambda p: u.copy(), lambda p: True,
        "mink_hyperplane", (c0 - 1.0, c0 + 1.0), sample_slice, params={"c0": c0},
    )


@register("mink_cone", {"delta": 0.05}, Expected(1, False, "umbilic sphere slices"))
def _cone(n, delta):
    model = space_form(0, n)
    p0 = np.zeros(n + 1)
    if delta <= 0:
        raise ContractError("delta must be positive")

    def f(p):
        return float(np.linalg.norm(p - p0))

    def grad(p):
        d = p - p0
        return d / np.linalg.norm(d)

    return TransnormalGraph(
        model, f, grad, lambda p: f(p) > delta, "mink_cone", (0.5, 3.0),
        lambda t, rng: p0 + t * rng.unit_vector(n + 1), params={"delta": delta},
    )


@register(
    "mink_cylinder", {"k": 2, "delta": 0.05},
    Expected(2, True, "one round factor and one flat factor"), min_n=2,
)
def _cylinder(n, k, delta):
    k = int(k)
    if not 2 <= k <= n:
        raise ContractError(f"mink_cylinder needs 2 <= k <= n, got k={k}, n={n}")
    model = space_form(0, n)

    def f(p):
        return float(np.linalg.norm(p[:k]))

    def grad(p):
        g = np.zeros(n + 1)
        g[:k] = p[:k] / np.linalg.norm(p[:k])
        return g

    def sample_slice(t, rng):
        p = np.zeros(n + 1)
        p[:k] = t * rng.unit_vector(k)
        p[k:] = rng.normals(n + 1 - k)
        return p

    return TransnormalGraph(
        model, f, grad, lambda p: f(p) > delta, "mink_cylinder", (0.5, 3.0), sample_slice,
        params={"k": k, "delta": delta},
    )


@register(
    "mink_ellipsoid_negcontrol", {"stretch": 1.5}, None,
    "f = |D p| with the gradient rescaled to unit length; must fail the isoparametric scan",
    control=True,
)
def _ellipsoid(n, stretch):
    model = space_form(0, n)
    D = np.linspace(1.0, stretch, n + 1)

    def f(p):
        return float(np.linalg.norm(D * p))

    def grad(p):
        g = D * D * p
        return g / np.linalg.norm(g)

    return TransnormalGraph(
        model, f, grad, lambda p: f(p) > 0.05, "mink_ellipsoid_negcontrol", (0.5, 3.0),
        lambda t, rng: t * rng.unit_vector(n + 1) / D, control=True, params={"stretch": stretch},
    )


# -- de Sitter (cbar = 1) --------------------------------------------------------


@register("ds_gudermann", {"a": 0.5, "delta": 0.05}, Expected(1, False, "geodesic spheres"))
def _ds(n, a, delta):
    model = space_form(1, n)
    fib = model.fiber
    p0 = fib.origin()
    r_lo = max(delta, a - math.pi / 2 + delta)
    r_hi = min(math.pi - delta, a + math.pi / 2 - delta)
    if r_lo >= r_hi:
        raise ContractError("ds_gudermann: empty domain for these parameters")

    def r(p):
        return fib.distance(p, p0, tol=1e-6)

    def f(p):
        return gd_inv(r(p) - a)

    def grad(p):
        rr = r(p)
        grad_r = -(p0 - math.cos(rr) * p) / math.sin(rr)
        return grad_r / math.cos(rr - a)

    def domain(p):
        return r_lo < r(p) < r_hi

    def sample_slice(t, rng):
        rr = gd(t) + a
        return math.cos(rr) * p0 + math.sin(rr) * _perp_unit(rng, n + 2, 1)

    margin = 0.15 * (r_hi - r_lo)
    t_range = (gd_inv(r_lo + margin - a), gd_inv(r_hi - margin - a))
    return TransnormalGraph(model, f, grad, domain, "ds_gudermann", t_range, sample_slice,
                            params={"a": a, "delta": delta})


# -- anti de Sitter (cbar = -1) --------------------------------------------------


@register("ads_gudermann_sphere", {"a": 1.0, "delta": 0.05}, Expected(1, False, "geodesic spheres"))
def _ads_sphere(n, a, delta):
    model = space_form(-1, n)
    fib = model.fiber
    p0 = fib.origin()

    def r(p):
        return fib.distance(p, p0, tol=1e-6)

    def f(p):
        return gd(r(p) - a)

    def grad(p):
        rr = r(p)
        grad_r = -(p0 - math.cosh(rr) * p) / math.sinh(rr)
        return grad_r / math.cosh(rr - a)

    def sample_slice(t, rng):
        rr = gd_inv(t) + a
        return math.cosh(rr) * p0 + math.sinh(rr) * _perp_unit(rng, n + 2, 1)

    return TransnormalGraph(
        model, f, grad, lambda p: r(p) > delta, "ads_gudermann_sphere",
        (gd(0.3 - a), gd(2.5 - a)), sample_slice, params={"a": a, "delta": delta},
    )


@register(
    "ads_gudermann_tube", {"k": 1, "a": 1.0, "delta": 0.05},
    Expected(2, False, "tube over a totally geodesic H^k"), min_n=2,
)
def _ads_tube(n, k, a, delta):
    """Tubes around L = H^k = hyperboloid n span(e_0..e_k); sinh d(p, L) = |p_perp|."""
    k = int(k)
    if not 1 <= k <= n - 1:
        raise ContractError(f"ads_gudermann_tube needs 1 <= k <= n-1, got k={k}, n={n}")
    model = space_form(-1, n)

    def d(p):
        return math.asinh(float(np.linalg.norm(p[k + 1:])))

    def f(p):
        return gd(d(p) - a)

    def grad(p):
        w = p[k + 1:]
        dd = d(p)
        cov = np.zeros(n + 2)
        cov[k + 1:] = w / (np.linalg.norm(w) * math.cosh(dd))
        # raise with the Lorentz metric (only spacelike slots are nonzero) and project
        grad_d = cov + (-cov[0] * p[0] + cov[1:] @ p[1:]) * p
        return grad_d / math.cosh(dd - a)

    def sample_slice(t, rng):
        dd = gd_inv(t) + a
        rho_l = rng.uniform(0.0, 1.0)
        x = np.zeros(n + 2)
        x[0] = math.cosh(rho_l)
        x[1:k + 1] = math.sinh(rho_l) * rng.unit_vector(k)
        return math.cosh(dd) * x + math.sinh(dd) * _perp_unit(rng, n + 2, k + 1)

    return TransnormalGraph(
        model, f, grad, lambda p: d(p) > delta, "ads_gudermann_tube",
        (gd(0.3 - a), gd(2.0 - a)), sample_slice, params={"k": k, "a": a, "delta": delta},
    )
