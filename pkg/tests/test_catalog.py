import math

import numpy as np
import pytest

from nullscreen.catalog import REGISTRY, catalog_get
from nullscreen.errors import ContractError
from nullscreen.isoparam import screen_spectrum
from nullscreen.nullhyp import build_null_frame
from nullscreen.rng import Xorshift64Star


def test_registry_contents():
    assert set(REGISTRY) == {
        "mink_hyperplane", "mink_cone", "mink_cylinder", "mink_ellipsoid_negcontrol",
        "ds_gudermann", "ads_gudermann_sphere", "ads_gudermann_tube",
    }
    assert [name for name, e in REGISTRY.items() if e.control] == ["mink_ellipsoid_negcontrol"]


def test_unknown_entry_and_parameter():
    with pytest.raises(ContractError):
        catalog_get("nope", 3)
    with pytest.raises(ContractError):
        catalog_get("mink_cone", 3, radius=2)


def test_parameter_ranges():
    with pytest.raises(ContractError):
        catalog_get("mink_cylinder", 3, k=4)
    with pytest.raises(ContractError):
        catalog_get("mink_cylinder", 1)
    with pytest.raises(ContractError):
        catalog_get("ads_gudermann_tube", 3, k=3)


@pytest.mark.parametrize("name", list(REGISTRY))
@pytest.mark.parametrize("n", [2, 3, 5])
def test_samples_lie_on_requested_slice(name, n):
    g = catalog_get(name, n)
    rng = Xorshift64Star(n)
    for _ in range(10):
        t = rng.uniform(*g.t_range)
        q = g.sample_slice(t, rng)
        assert abs(g.model.fiber.constraint(q)) < 1e-10
        assert g.domain(q)
        assert g.f(q) == pytest.approx(t, abs=1e-9)
        assert g.model.contains(t)


@pytest.mark.parametrize("name", [name for name, e in REGISTRY.items() if e.expected is not None])
def test_expected_cluster_count(name):
    g = catalog_get(name, 3)
    rng = Xorshift64Star(1)
    frame = build_null_frame(g, g.sample_point(rng))
    rep = screen_spectrum(g, frame)
    exp = REGISTRY[name].expected
    assert rep.l == exp.l
    has_zero = any(abs(v) < 1e-6 for v, _ in rep.lambdas)
    assert has_zero == exp.zero_cluster


def test_hyperplane_level_sets():
    g = catalog_get("mink_hyperplane", 2, c0=0.5)
    q = np.array([1.0, 1.0, 1.0])
    assert g.f(q) == pytest.approx(0.5 + math.sqrt(3))
