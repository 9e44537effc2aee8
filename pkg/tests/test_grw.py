import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nullscreen.cli import isometry_points, isometry_residuals
from nullscreen.errors import DomainError, GeometryError
from nullscreen.grw import (
    EventPoint,
    EventVector,
    ambient_cov_deriv,
    ambient_metric,
    curvature_relation_residual,
    embed_isometry,
    embedding_quadric_residual,
    event_curve,
    lie_bracket,
    space_form,
)
from nullscreen.numkernel import fd_derivative
from nullscreen.rng import Xorshift64Star

CBARS = [-1, 0, 1]


def polynomial_field(model, rng):
    """A smooth tangent field with random quadratic coefficients."""
    m = model.fiber.embed_dim
    a0, a1, a2 = rng.uniform(-1, 1), rng.normals(m), rng.uniform(-1, 1)
    B0, B1, B2 = rng.normals(m), rng.normals((m * m)).reshape(m, m), rng.normals(m)

    def field(e):
        p = np.asarray(e.p)
        vt = a0 + a1 @ p + a2 * e.t * e.t
        vF = model.fiber.project(p, B0 + B1 @ p + B2 * e.t)
        return EventVector(e, float(vt), vF)

    return field


def random_event(model, rng):
    (pt,) = isometry_points(model, 1, rng)
    return pt


def test_curvature_relation_examples():
    assert curvature_relation_residual(space_form(1, 2), 0.7) == pytest.approx((0, 0), abs=1e-15)
    assert curvature_relation_residual(space_form(0, 2), 0.7) == (0.0, 0.0)
    assert curvature_relation_residual(space_form(-1, 2), 0.7) == pytest.approx((0, 0), abs=1e-15)


def test_invalid_cbar():
    with pytest.raises(GeometryError):
        space_form(2, 3)


def test_hubble_values():
    assert space_form(1, 2).hubble(1.0) == pytest.approx(math.tanh(1.0))
    assert space_form(-1, 2).hubble(0.4) == pytest.approx(-math.tan(0.4))
    assert space_form(0, 2).hubble(0.4) == 0.0


def test_metric_signature():
    model = space_form(1, 2)
    e = EventPoint(0.5, np.array([1.0, 0, 0, 0]))
    dt = EventVector(e, 1.0, np.zeros(4))
    v = EventVector(e, 0.0, np.array([0, 1.0, 0, 0]))
    assert ambient_metric(model, dt, dt) == -1.0
    assert ambient_metric(model, v, v) == pytest.approx(math.cosh(0.5) ** 2)
    assert ambient_metric(model, dt, v) == 0.0


def test_ads_embedding_rejects_out_of_interval():
    with pytest.raises(DomainError):
        embed_isometry(space_form(-1, 2), EventPoint(2.0, np.array([1.0, 0, 0, 0])))


@pytest.mark.parametrize("cbar", CBARS)
@settings(max_examples=15, deadline=None)
@given(seed=st.integers(0, 2**32))
def test_connection_is_metric_compatible(cbar, seed):
    model = space_form(cbar, 3)
    rng = Xorshift64Star(seed)
    e = random_event(model, rng)
    X, Y, Z = (polynomial_field(model, rng) for _ in range(3))
    curve = event_curve(model, e, X(e))
    lhs = fd_derivative(lambda u: ambient_metric(model, Y(curve(u)), Z(curve(u))), 0.0)
    rhs = ambient_metric(model, ambient_cov_deriv(model, X, Y, e), Z(e)) + ambient_metric(
        model, Y(e), ambient_cov_deriv(model, X, Z, e)
    )
    assert lhs == pytest.approx(rhs, abs=1e-5 * (1 + abs(lhs)))


@pytest.mark.parametrize("cbar", CBARS)
@settings(max_examples=15, deadline=None)
@given(seed=st.integers(0, 2**32))
def test_connection_is_torsion_free(cbar, seed):
    model = space_form(cbar, 3)
    rng = Xorshift64Star(seed)
    e = random_event(model, rng)
    X, Y = polynomial_field(model, rng), polynomial_field(model, rng)
    T = ambient_cov_deriv(model, X, Y, e) - ambient_cov_deriv(model, Y, X, e) - lie_bracket(model, X, Y, e)
    assert np.max(np.abs(T.as_array())) < 1e-5


@pytest.mark.parametrize("cbar", CBARS)
def test_embedding_is_isometric(cbar):
    model = space_form(cbar, 3)
    points = isometry_points(model, 50, Xorshift64Star(4))
    quad, pull = isometry_residuals(model, points)
    assert max(quad) < 1e-10
    assert max(pull) < 1e-5


@pytest.mark.parametrize("cbar", [-1, 1])
def test_quadric_example(cbar):
    model = space_form(cbar, 2)
    x = embed_isometry(model, EventPoint(0.3, model.fiber.origin()))
    assert abs(embedding_quadric_residual(model, x)) < 1e-15
