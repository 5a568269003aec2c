import numpy as np
import pytest

from conftest import build
from lieapp import conserved as cq
from lieapp import gauge as ga
from lieapp import minkowski as mk
from lieapp.errors import DegenerateGInfinity, DependentQuantities

E = mk.BASIS


def flat_front_pencil(shape=(4, 4)):
    """p(t) = e6 - t(e6 + e2), q(t) = e5 - t(e5 + e1): g0 = -g_inf / 2 by construction."""
    f = E[4] + E[0]
    tt = E[5] + E[1]
    p = cq.make_cq([E[5], -tt], shape, label="p")
    q = cq.make_cq([E[4], -f], shape, label="q")
    return p, q


def test_polynomial_evaluation_and_combination():
    p = cq.make_cq([E[0], E[1], E[2]], (2, 3))
    np.testing.assert_allclose(p(2.0)[1, 2], E[0] + 2 * E[1] + 4 * E[2])
    q = cq.make_cq([E[3]], (2, 3))
    r = cq.combine(2.0, p, -1.0, q)
    assert r.degree == 2
    np.testing.assert_allclose(r.coeffs[0, 0, 0], 2 * E[0] - E[3])
    z = cq.combine(1.0, p, -1.0, p)
    assert z.degree == 0


@pytest.mark.parametrize("name", ["catenoid", "pseudosphere", "unduloid", "torus", "cylinder"])
def test_lw_pair_is_conserved_exactly_at_vertices(name):
    d = build(name)
    for r in (d["p"], d["q"]):
        res = cq.verify_cq(d["L"], d["eta"], r)
        assert res["vertex_max"] < 1e-12
        assert res["constant_term"] == 0.0


@pytest.mark.parametrize("name", ["catenoid", "pseudosphere", "unduloid", "torus", "cylinder"])
def test_norm_polynomial_is_constant(name):
    d = build(name)
    for r in (d["p"], d["q"]):
        assert cq.norm_polynomial(r).max_deviation < 1e-12


def test_verify_cq_detects_non_conserved_field():
    d = build("catenoid")
    bad = cq.make_cq([mk.P, d["L"].f], d["L"].shape)
    good = cq.verify_cq(d["L"], d["eta"], d["p"])["edge_max"]
    assert cq.verify_cq(d["L"], d["eta"], bad)["edge_max"] > 100 * good


def test_classification_matrix():
    cat_ = build("catenoid")
    assert cq.classify_type1(cat_["p"]) == "isothermic"
    assert cq.classify_type1(cat_["q"]) == "l_isothermic"
    ps = build("pseudosphere")
    assert cq.classify_type1(ps["p"]) == "guichard"
    assert cq.classify_type1(ps["q"]) == "degenerate_constant_term"
    assert cq.classify_type1(cq.make_cq([E[0], E[1], E[2]], (2, 2))) == "not_type1"


def test_pencil_metrics_catenoid():
    d = build("catenoid")
    P = cq.pencil_metrics(d["p"], d["q"])
    np.testing.assert_allclose(P.g0, [[-1, 0], [0, 0]], atol=1e-12)
    np.testing.assert_allclose(P.ginf, [[0, 2], [2, 0]], atol=1e-12)
    for t in (-1.3, 0.2, 2.0):
        assert cq.pencil_reproduction(P, t) < 1e-12
    WT = cq.weingarten_from_pencil(P)
    np.testing.assert_allclose(WT.abc, (0, 1, 0), atol=1e-12)
    assert WT.cross_check < 1e-12
    assert np.max(cq.weingarten_residual(WT, d["L"].sigma1, d["L"].sigma2)) < 1e-12


@pytest.mark.parametrize("name", ["pseudosphere", "unduloid"])
def test_weingarten_tensor_recovers_triple(name):
    d = build(name)
    WT = cq.weingarten_from_pencil(cq.pencil_metrics(d["p"], d["q"]))
    np.testing.assert_allclose(WT.abc, d["abc"], atol=1e-12)


def test_weingarten_errors():
    d = build("torus")
    with pytest.raises(DegenerateGInfinity):
        cq.weingarten_from_pencil(cq.pencil_metrics(d["p"], d["q"]))
    with pytest.raises(DependentQuantities):
        cq.pencil_metrics(d["p"], d["p"])


def test_flat_front_detection():
    p, q = flat_front_pencil()
    P = cq.pencil_metrics(p, q)
    np.testing.assert_allclose(P.g0, -0.5 * P.ginf, atol=1e-15)
    assert cq.flat_front_detect(P) == pytest.approx(0.5, abs=1e-12)
    for name in ("catenoid", "pseudosphere"):
        d = build(name)
        assert cq.flat_front_detect(cq.pencil_metrics(d["p"], d["q"])) is None


def test_complementary_roots():
    ps = build("pseudosphere")
    roots = cq.complementary_roots(ps["p"]).roots
    assert [m for m, _ in roots] == pytest.approx([-0.5])
    m, pm = roots[0]
    assert np.max(np.abs(mk.pair(pm, pm))) < 1e-12
    assert cq.complementary_roots(build("catenoid")["q"]).identically_zero


def test_gauge_transform_can_lower_degree():
    d = build("catenoid")
    L, p = d["L"], d["p"]
    # catenoid p_1 = -f, and (f ^ t) p_0 = (f, e6) t - (t, e6) f = f, so exp(t f^t) kills the top term
    tau, _ = ga.wedge_f_field(L, 1.0)
    np.testing.assert_allclose(mk.apply(tau, p.coeffs[0]), -p.coeffs[1], atol=1e-12)
    moved = cq.gauge_transform_cq(p, tau)
    assert moved.degree == 0


def test_tubular_branch():
    for name in ("torus", "cylinder"):
        d = build(name)
        rep = cq.classify_lw(d["L"], d["eta"], *d["abc"])
        assert rep["branch"] == "tubular"
        assert rep["tubular_cq_degree"] == 0
        assert rep["cq_residuals"]["tubular"]["constant_term"] < 1e-12


def test_classify_report():
    d = build("catenoid")
    rep = cq.classify_lw(d["L"], d["eta"], *d["abc"])
    assert rep["branch"] == "type1"
    assert rep["classes"] == {"p": "isothermic", "q": "l_isothermic"}
    assert rep["flat_front_t0"] is None
