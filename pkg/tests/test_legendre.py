import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from conftest import build
from lieapp import catalog as cat
from lieapp import legendre as lg
from lieapp import minkowski as mk
from lieapp.errors import GeometryError, ProjectionSingular

vec3 = arrays(np.float64, (3,), elements=st.floats(-50, 50))


@given(vec3)
def test_point_sphere_is_normalized_null(x):
    f = lg.lift_point(x)
    scale = 1 + x @ x
    assert abs(mk.pair(f, f)) <= 1e-12 * scale**2
    assert mk.pair(f, mk.QINF) == pytest.approx(-1.0)
    assert mk.pair(f, mk.P) == 0


@given(vec3, vec3)
def test_pairing_of_point_spheres_is_distance(x, y):
    d = -2 * mk.pair(lg.lift_point(x), lg.lift_point(y))
    assert d == pytest.approx(np.sum((x - y) ** 2), abs=1e-8 * (1 + x @ x + y @ y) ** 2)


@pytest.mark.parametrize("name", ["catenoid", "torus", "pseudosphere", "unduloid", "cylinder"])
def test_legendre_conditions(name):
    L = build(name)["L"]
    rep = lg.check_legendre(L)
    scale = max(1.0, float(np.max(np.abs(L.f))))
    assert rep["isotropy"] <= 1e-12 * scale**2
    assert rep["normalization"] <= 1e-12 * scale
    assert rep["contact"] <= 1e-12 * scale
    assert rep["curvature_sphere"] <= 1e-12 * scale
    assert rep["null_curvature_spheres"] <= 1e-12 * scale**2
    assert rep["curvature_recovery"] <= 1e-12
    assert rep["immersion_min_sv"] > 0.1


def test_space_form_projection_recovers_surface():
    L = build("torus")["L"]
    # any other basis of the plane gives back the normalized lifts
    v1 = 2.0 * L.sigma1 - 0.5 * L.f
    v2 = L.sigma2 + 3.0 * L.sigma1
    f, t = lg.space_form_projection(v1, v2, mk.QINF, mk.P)
    np.testing.assert_allclose(f, L.f, atol=1e-11)
    np.testing.assert_allclose(t, L.t, atol=1e-11)
    x, n = lg.euclidean_point(f, t)
    np.testing.assert_allclose(x, L.grid.x, atol=1e-11)
    np.testing.assert_allclose(n, L.grid.n, atol=1e-11)


def test_space_form_projection_singular():
    # a plane containing qinf has no finite point sphere
    with pytest.raises(ProjectionSingular):
        lg.space_form_projection(mk.QINF, mk.P + mk.BASIS[0], mk.QINF, mk.P)


def test_lift_rejects_broken_contact():
    g = cat.sample(cat.catalog("catenoid"), 16, 16)
    bad = cat.SampledGrid(**{**g.__dict__, "n": np.roll(g.n, 1, axis=-1)})
    with pytest.raises(GeometryError):
        lg.lift_euclidean(bad)


def test_midpoints_match_averages_to_second_order():
    L = build("catenoid", 32)["L"]
    exact = L.midpoints(0)
    avg = 0.5 * (L.f[1:] + L.f[:-1])
    err = np.max(np.abs(exact["f"] - avg))
    assert err < 2 * L.grid.h_u**2 * np.max(np.abs(L.f))
