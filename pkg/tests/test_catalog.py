import numpy as np
import pytest
import sympy as sp

from lieapp import catalog as cat
from lieapp.errors import BadParams, UmbilicEverywhere, UnknownSurface

u, v = sp.symbols("u v", real=True)


def symbolic_charts():
    R, r = 2, 1
    prof = {
        "catenoid": (sp.cosh(u), u),
        "torus": (R + r * sp.cos(u), r * sp.sin(u)),
        "pseudosphere": (1 / sp.cosh(u), u - sp.tanh(u)),
    }
    out = {k: sp.Matrix([a * sp.cos(v), a * sp.sin(v), b]) for k, (a, b) in prof.items()}
    out["cylinder"] = sp.Matrix([sp.sin(u), sp.cos(u), v])
    return out


def oracle(X):
    """Unit normal and principal curvatures of a chart with orthogonal curvature lines."""
    Xu, Xv = X.diff(u), X.diff(v)
    N = Xu.cross(Xv)
    N = N / sp.sqrt(N.dot(N))
    k1 = -N.diff(u).dot(Xu) / Xu.dot(Xu)
    k2 = -N.diff(v).dot(Xv) / Xv.dot(Xv)
    def fn(e):
        comps = list(e) if isinstance(e, sp.MatrixBase) else [e]
        return [sp.lambdify((u, v), c, "numpy") for c in comps]

    return [fn(e) for e in (X, N, k1, k2, Xu, Xv)]


@pytest.mark.parametrize("name", ["catenoid", "torus", "pseudosphere", "cylinder"])
def test_chart_matches_symbolic_oracle(name):
    X, N, K1, K2, XU, XV = oracle(symbolic_charts()[name])
    chart = cat.catalog(name)
    u0, u1, v0, v1 = chart.domain
    U, V = np.meshgrid(np.linspace(u0, u1, 7), np.linspace(v0, v1, 5), indexing="ij")
    d = chart.evaluate(U, V)

    def field(fns):
        return np.stack([np.broadcast_to(np.asarray(c(U, V), dtype=float), U.shape) for c in fns], axis=-1)

    np.testing.assert_allclose(d["x"], field(X), atol=1e-12)
    np.testing.assert_allclose(d["xu"], field(XU), atol=1e-12)
    np.testing.assert_allclose(d["xv"], field(XV), atol=1e-12)
    np.testing.assert_allclose(d["n"], field(N), atol=1e-12)
    np.testing.assert_allclose(d["k1"], field(K1)[..., 0], atol=1e-12)
    np.testing.assert_allclose(d["k2"], field(K2)[..., 0], atol=1e-12)


@pytest.mark.parametrize("name", ["catenoid", "torus", "pseudosphere", "cylinder", "unduloid", "sphere"])
def test_chart_invariants(name):
    g = cat.sample(cat.catalog(name), 16, 12) if name != "sphere" else None
    if g is None:
        chart = cat.catalog(name)
        d = chart.evaluate(*np.meshgrid(np.linspace(-1, 1, 9), np.linspace(-1, 1, 9), indexing="ij"))
        g = cat.SampledGrid(u=None, v=None, x=d["x"], n=d["n"], k1=d["k1"], k2=d["k2"],
                            xu=d["xu"], xv=d["xv"], nu_=d["nu"], nv_=d["nv"])
    res = cat.check_chart(g)
    for key, val in res.items():
        assert np.max(val) < 1e-12, key


def test_known_curvature_values():
    g = cat.sample(cat.catalog("catenoid"), 9, 9)
    np.testing.assert_allclose(g.k1 + g.k2, 0, atol=1e-14)
    g = cat.sample(cat.catalog("pseudosphere"), 9, 9)
    np.testing.assert_allclose(g.k1 * g.k2, -1, atol=1e-12)
    g = cat.sample(cat.catalog("torus", {"R": 3.0, "r": 0.5}), 9, 9)
    np.testing.assert_allclose(np.abs(g.k1), 2.0, atol=1e-12)


def test_unduloid_is_cmc_and_profile_integrates():
    H0 = 0.7
    chart = cat.catalog("unduloid", {"H0": H0, "neck": 0.3})
    g = cat.sample(chart, 40, 9)
    np.testing.assert_allclose(0.5 * (g.k1 + g.k2), H0, atol=1e-12)
    # z from quadrature agrees with the differentiated profile
    xu_fd = np.gradient(g.x, g.u, axis=0, edge_order=2)
    assert np.max(np.abs(xu_fd - g.xu)) < 2e-2
    g2 = cat.sample(chart, 79, 9)
    xu_fd2 = np.gradient(g2.x, g2.u, axis=0, edge_order=2)
    assert np.max(np.abs(xu_fd2 - g2.xu)) < 0.3 * np.max(np.abs(xu_fd - g.xu))
    np.testing.assert_allclose(np.linalg.norm(g.xu, axis=-1), 1.0, atol=1e-12)


@pytest.mark.parametrize("name", ["catenoid", "torus", "unduloid"])
def test_finite_difference_partials_converge_at_order_two(name):
    chart = cat.catalog(name)
    errs, hs = [], []
    for n in (16, 32, 64):
        g = cat.sample(chart, n, n)
        xu, xv = np.gradient(g.x, g.u, g.v, axis=(0, 1), edge_order=2)
        errs.append(max(np.max(np.abs(xu - g.xu)), np.max(np.abs(xv - g.xv))))
        hs.append(max(g.h_u, g.h_v))
    for i in (1, 2):
        order = np.log(errs[i - 1] / errs[i]) / np.log(hs[i - 1] / hs[i])
        assert order > 1.8


def test_umbilic_mask_and_errors():
    with pytest.raises(UmbilicEverywhere):
        cat.sample(cat.catalog("sphere"), 16, 16)
    with pytest.raises(UnknownSurface):
        cat.catalog("klein bottle")
    with pytest.raises(BadParams):
        cat.catalog("torus", {"R": 1.0, "r": 2.0})
    with pytest.raises(BadParams):
        cat.catalog("unduloid", {"H0": 0.5, "neck": 1.5})
    with pytest.raises(BadParams):
        cat.sample(cat.catalog("catenoid"), 4, 16)
    with pytest.raises(BadParams):
        cat.catalog("catenoid", {"u0": 1.0, "u1": 0.0})


def test_domain_override():
    chart = cat.catalog("catenoid", {"u0": -1.0, "u1": 1.0})
    assert chart.domain[:2] == (-1.0, 1.0)
    g = cat.sample(chart, 11, 9)
    assert g.u[0] == -1.0 and g.u[-1] == 1.0 and g.shape == (11, 9)
    assert not g.umbilic.any()
