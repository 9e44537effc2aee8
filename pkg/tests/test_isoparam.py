import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from nullscreen.catalog import catalog_get, gd, gd_inv
from nullscreen.errors import ContractError
from nullscreen.isoparam import (
    cartan_residuals,
    check_corollary,
    isoparametric_scan,
    make_report,
    screen_spectrum,
    slice_relation,
    slice_shape_operator,
)
from nullscreen.nullhyp import build_null_frame
from nullscreen.rng import Xorshift64Star

SQ2 = math.sqrt(2)


def spectrum(name, n, t, seed=0, **params):
    g = catalog_get(name, n, **params)
    frame = build_null_frame(g, g.sample_slice(t, Xorshift64Star(seed)))
    return g, frame, screen_spectrum(g, frame)


def test_cartan_examples():
    assert cartan_residuals([(0.7, 2), (0.0, 1)], 0, 0.0) == (0.0, 0.0)
    assert cartan_residuals([(1.0, 1), (-0.5, 1)], 1, 0.0) == (0.0, 0.0)
    assert cartan_residuals([(1.0, 1), (0.5, 1)], 1, 0.0) == (4.0, -4.0)


def test_cartan_rejects_coincident():
    with pytest.raises(ContractError):
        cartan_residuals([(1.0, 1), (1.0, 2)], 0, 0.0)


@given(
    st.lists(st.tuples(st.floats(-3, 3), st.integers(1, 4)), min_size=2, max_size=4, unique_by=lambda x: round(x[0], 3)),
    st.sampled_from([-1, 0, 1]),
    st.floats(-2, 2),
    st.randoms(),
)
def test_cartan_permutation_invariant(pairs, cbar, psi, rnd):
    perm = list(range(len(pairs)))
    rnd.shuffle(perm)
    a = cartan_residuals(pairs, cbar, psi)
    b = cartan_residuals([pairs[i] for i in perm], cbar, psi)
    assert np.allclose([a[i] for i in perm], b, rtol=1e-12, atol=1e-9)


@given(st.floats(0.1, 5), st.floats(0.1, 5))
def test_cbar0_two_cluster_forces_product_zero(l1, l2):
    # with psi = 0 the residual vanishes only when l1 l2 = 0
    if abs(l1 - l2) < 1e-3:
        return
    res = cartan_residuals([(l1, 1), (-l2, 1)], 0, 0.0)
    assert abs(res[0]) > 0


def test_hyperplane_spectrum():
    _, _, rep = spectrum("mink_hyperplane", 3, 0.2)
    assert rep.l == 1 and rep.lambdas[0][1] == 3 and abs(rep.lambdas[0][0]) < 1e-9
    assert rep.cartan_residuals == ()


@pytest.mark.parametrize("n", [2, 3, 5])
def test_cone_single_cluster(n):
    _, _, rep = spectrum("mink_cone", n, 2.0)
    assert rep.l == 1 and rep.lambdas[0][1] == n
    assert rep.lambdas[0][0] == pytest.approx(-1 / (2 * SQ2), abs=1e-8)


@pytest.mark.parametrize("n,k", [(2, 2), (3, 2), (5, 3)])
def test_cylinder_clusters(n, k):
    r = 1.5
    _, _, rep = spectrum("mink_cylinder", n, r, k=k)
    assert rep.l == 2
    (lo, m_lo), (hi, m_hi) = rep.lambdas
    assert lo == pytest.approx(-1 / (SQ2 * r), abs=1e-8) and m_lo == k - 1
    assert abs(hi) < 1e-8 and m_hi == n + 1 - k
    assert max(map(abs, rep.cartan_residuals)) < 1e-6
    assert rep.corollary_ok


def test_ds_sphere_spectrum_closed_form():
    t, a = 0.6, 0.5
    r = gd(t) + a
    g, frame, rep = spectrum("ds_gudermann", 3, t)
    nu = -1 / math.tan(r) / math.cosh(t)
    assert rep.l == 1
    assert rep.lambdas[0][0] == pytest.approx((nu - math.tanh(t)) / SQ2, abs=1e-7)
    shp = slice_shape_operator(g, frame)
    assert np.allclose(shp.fiber_unit, -np.eye(3) / math.tan(r), atol=1e-6)
    assert not rep.corollary.applicable


def test_ads_sphere_slice_curvatures():
    t = 0.4
    r = gd_inv(t) + 1.0
    g, frame, rep = spectrum("ads_gudermann_sphere", 2, t)
    shp = slice_shape_operator(g, frame)
    assert np.allclose(shp.fiber_unit, -np.eye(2) / math.tanh(r), atol=1e-6)
    assert np.allclose(shp.slice_unit, shp.fiber_unit / math.cos(t), atol=1e-6)
    rel = slice_relation(g, frame, rep, shp)
    assert rel["slice_unit"] < 1e-6


@pytest.mark.parametrize("n", [2, 3, 5])
def test_ads_tube_two_clusters(n):
    t = 0.2
    d = gd_inv(t) + 1.0
    g, frame, rep = spectrum("ads_gudermann_tube", n, t)
    assert rep.l == 2
    # sphere directions: -coth d (mult n-1); directions along H^1: -tanh d (mult 1)
    kappas = [(rep.rho * v, m) for v, m in rep.nus]
    assert kappas[0][0] == pytest.approx(-1 / math.tanh(d), abs=1e-6) and kappas[0][1] == n - 1
    assert kappas[1][0] == pytest.approx(-math.tanh(d), abs=1e-6) and kappas[1][1] == 1
    assert rep.corollary.ok and rep.corollary.relation_residual < 1e-4
    assert max(map(abs, rep.cartan_residuals)) < 1e-6


def test_corollary_synthetic_cases():
    assert not check_corollary(make_report([(-1.0, 1), (0.0, 1), (2.0, 1)], 0), 0).ok
    assert not make_report([(-1.0, 1), (2.0, 2)], 0).corollary.ok
    assert make_report([(-1.0, 1), (0.0, 2)], 0).corollary.ok
    assert make_report([(0.3, 3)], 0).corollary.ok
    v = make_report([(1.0, 1), (2.0, 1)], 1).corollary
    assert v.ok and not v.applicable


def test_corollary_ads_relation_synthetic():
    # rho = 1, hubble = 0: nu = sqrt2 lambda, need nu1 nu2 = 1
    ok = make_report([(2 / SQ2, 1), (0.5 / SQ2, 1)], -1)
    bad = make_report([(2 / SQ2, 1), (0.4 / SQ2, 1)], -1)
    assert ok.corollary.ok and not bad.corollary.ok


def test_isoparametric_scan_passes_and_fails(rng):
    good = isoparametric_scan(catalog_get("mink_cone", 3), 1.5, 15, rng)
    bad = isoparametric_scan(catalog_get("mink_ellipsoid_negcontrol", 3), 1.5, 15, rng)
    assert good.passed and good.spectra.shape == (15, 3)
    assert not bad.passed


def test_scan_needs_samples(rng):
    with pytest.raises(ContractError):
        isoparametric_scan(catalog_get("mink_cone", 2), 1.0, 0, rng)
