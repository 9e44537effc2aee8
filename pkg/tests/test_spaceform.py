import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nullscreen.catalog import catalog_get, gd, gd_inv
from nullscreen.errors import ContractError, DomainError
from nullscreen.numkernel import fd_derivative
from nullscreen.rng import Xorshift64Star
from nullscreen.spaceform import Fiber, FiberKind, FiberVector, fd_gradient, fiber_gradient, fiber_metric

KINDS = [FiberKind.EUCLIDEAN, FiberKind.SPHERE, FiberKind.HYPERBOLIC]


def random_point(fiber, rng):
    q = fiber.origin()
    v = fiber.project(q, rng.normals(fiber.embed_dim))
    return fiber.geodesic(q, v / fiber.norm(v), rng.uniform(0.1, 1.2))


def random_unit_tangent(fiber, q, rng):
    v = fiber.project(q, rng.normals(fiber.embed_dim))
    return v / fiber.norm(v)


def test_hyperbolic_exp_example():
    H = Fiber(FiberKind.HYPERBOLIC, 2)
    p = H.exp_map(np.array([1.0, 0, 0]), np.array([0, 1.0, 0]), 1.0)
    assert np.allclose(p, [math.cosh(1), math.sinh(1), 0], atol=1e-14)
    assert H.distance(np.array([1.0, 0, 0]), p) == pytest.approx(1.0, abs=1e-12)


def test_sphere_exp_example():
    S = Fiber(FiberKind.SPHERE, 2)
    p = S.exp_map(np.array([1.0, 0, 0]), np.array([0, 1.0, 0]), math.pi / 2)
    assert np.allclose(p, [0, 1, 0], atol=1e-15)
    assert S.distance(np.array([1.0, 0, 0]), p) == pytest.approx(math.pi / 2, abs=1e-12)


def test_euclidean_exp_example():
    E = Fiber(FiberKind.EUCLIDEAN, 1)
    assert np.allclose(E.exp_map(np.zeros(2), np.array([0.6, 0.8]), 2.0), [1.2, 1.6])


def test_exp_map_rejects_non_unit():
    S = Fiber(FiberKind.SPHERE, 2)
    with pytest.raises(ContractError):
        S.exp_map(np.array([1.0, 0, 0]), np.array([0, 2.0, 0]), 1.0)


def test_check_point_rejects_off_quadric():
    with pytest.raises(DomainError):
        Fiber(FiberKind.HYPERBOLIC, 2).check_point(np.array([2.0, 0, 0]))


def test_metric_rejects_mismatched_base():
    S = Fiber(FiberKind.SPHERE, 2)
    a = FiberVector(np.array([1.0, 0, 0]), np.array([0, 1.0, 0]))
    b = FiberVector(np.array([0, 1.0, 0]), np.array([1.0, 0, 0]))
    with pytest.raises(ContractError):
        fiber_metric(S, a, b)


@pytest.mark.parametrize("kind", KINDS)
@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**32), s=st.floats(0.05, 1.5))
def test_geodesic_stays_on_fiber_with_unit_speed(kind, seed, s):
    fiber = Fiber(kind, 3)
    rng = Xorshift64Star(seed)
    q = random_point(fiber, rng)
    v = random_unit_tangent(fiber, q, rng)
    p = fiber.exp_map(q, v, s)
    assert abs(fiber.constraint(p)) < 1e-9
    vel = fd_derivative(lambda u: fiber.geodesic(q, v, u), s)
    assert fiber.norm(vel) == pytest.approx(1.0, abs=1e-6)
    assert fiber.distance(q, p) == pytest.approx(s, abs=1e-8)


@pytest.mark.parametrize("kind", KINDS)
@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**32))
def test_distance_first_variation(kind, seed):
    # d/ds dist(q, exp_p(s w)) at s=0 equals -<w, unit direction from p to q>
    fiber = Fiber(kind, 3)
    rng = Xorshift64Star(seed)
    p = random_point(fiber, rng)
    u = random_unit_tangent(fiber, p, rng)
    d = rng.uniform(0.2, 1.2)
    q = fiber.exp_map(p, u, d)
    w = random_unit_tangent(fiber, p, rng)
    deriv = fd_derivative(lambda s: fiber.distance(q, fiber.geodesic(p, w, s)), 0.0)
    assert deriv == pytest.approx(-fiber.pair(w, u), abs=1e-6)


@pytest.mark.parametrize("kind", KINDS)
def test_tangent_basis_orthonormal(kind):
    fiber = Fiber(kind, 4)
    q = random_point(fiber, Xorshift64Star(2))
    B = fiber.tangent_basis(q)
    G = np.array([[fiber.pair(a, b) for b in B] for a in B])
    assert np.allclose(G, np.eye(4), atol=1e-12)
    assert max(abs(fiber.pair(q, b)) for b in B) < 1e-12 or kind is FiberKind.EUCLIDEAN


@pytest.mark.parametrize(
    "name", ["mink_cone", "mink_cylinder", "ds_gudermann", "ads_gudermann_sphere", "ads_gudermann_tube"]
)
def test_analytic_gradient_matches_fd_oracle(name):
    g = catalog_get(name, 3)
    rng = Xorshift64Star(11)
    for _ in range(10):
        q = g.sample_point(rng)
        exact = fiber_gradient(g, q).comps
        approx = fiber_gradient(g, q, analytic=False).comps
        assert np.max(np.abs(exact - approx)) < 1e-6 * (1 + np.max(np.abs(exact)))


def test_fd_gradient_of_height_on_sphere():
    S = Fiber(FiberKind.SPHERE, 2)
    q = np.array([0.6, 0.0, 0.8])
    grad = fd_gradient(S, lambda p: p[2], q)
    assert np.allclose(grad, np.array([0, 0, 1.0]) - 0.8 * q, atol=1e-8)


@given(st.floats(-5, 5))
def test_gudermannian_identities(x):
    assert gd_inv(gd(x)) == pytest.approx(x, abs=1e-9)
    assert math.cos(gd(x)) == pytest.approx(1 / math.cosh(x), abs=1e-14)
    assert fd_derivative(gd, x) == pytest.approx(1 / math.cosh(x), abs=1e-8)
