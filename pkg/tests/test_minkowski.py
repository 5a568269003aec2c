import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays
from scipy.linalg import expm

from lieapp import minkowski as mk
from lieapp.errors import DegeneratePair, NoNullVectors

vec6 = arrays(np.float64, (6,), elements=st.floats(-3, 3))


def random_null(rng):
    x = rng.normal(size=4)
    y = rng.normal(size=2)
    return np.concatenate([x / np.linalg.norm(x), y / np.linalg.norm(y)])


def test_frame_vectors():
    assert mk.pair(mk.Q0, mk.Q0) == 0
    assert mk.pair(mk.QINF, mk.QINF) == 0
    assert mk.pair(mk.Q0, mk.QINF) == -1
    assert mk.pair(mk.P, mk.P) == -1
    assert mk.pair(mk.P, mk.Q0) == 0 and mk.pair(mk.P, mk.QINF) == 0


@given(vec6, vec6, vec6)
def test_wedge_action_and_skewness(a, b, c):
    W = mk.wedge(a, b)
    np.testing.assert_allclose(mk.apply(W, c), mk.pair(a, c) * b - mk.pair(b, c) * a, atol=1e-10)
    assert mk.skewness_defect(W) <= 1e-10 * (1 + np.abs(a).max() * np.abs(b).max())


@given(vec6, vec6, vec6, vec6)
def test_sym_form(a, b, v, w):
    B = mk.sym(a, b)
    np.testing.assert_allclose(B, B.T)
    expect = 0.5 * (mk.pair(a, v) * mk.pair(b, w) + mk.pair(a, w) * mk.pair(b, v))
    assert mk.form(B, v, w) == pytest.approx(expect, abs=1e-9)
    np.testing.assert_allclose(
        mk.sym_apply(B, v), 0.5 * (mk.pair(a, v) * b + mk.pair(b, v) * a), atol=1e-9
    )


def test_exp_matches_scipy(rng):
    for scale in (1e-3, 0.3, 2.0, 9.0):
        A = mk.wedge(rng.normal(size=6), rng.normal(size=6)) + mk.wedge(rng.normal(size=6), rng.normal(size=6))
        E = mk.exp_skew(A, scale)
        ref = expm(scale * A)
        assert np.linalg.norm(E - ref) <= 1e-12 * np.linalg.norm(ref)
        assert mk.orthogonality_defect(E) <= 1e-10 * np.linalg.norm(ref) ** 2


def test_exp_nilpotent_branch():
    # wedge of two orthogonal null vectors squares to zero
    f = mk.Q0 + np.array([0.3, 0, 0, 0, 0, 0]) + 0.045 * mk.QINF
    t = mk.P + np.array([0, 0, 1.0, 0, 0, 0])
    A = mk.wedge(f, t)
    assert np.allclose(A @ A, 0)
    np.testing.assert_allclose(mk.exp_skew(A, 0.7), expm(0.7 * A), atol=1e-14)


@settings(max_examples=30, deadline=None)
@given(st.floats(-2, 2), st.floats(-2, 2), st.integers(0, 2**31 - 1))
def test_exp_additivity(s, t, seed):
    rng = np.random.default_rng(seed)
    A = mk.wedge(rng.normal(size=6), rng.normal(size=6))
    lhs = mk.exp_skew(A, s) @ mk.exp_skew(A, t)
    rhs = mk.exp_skew(A, s + t)
    assert np.linalg.norm(lhs - rhs) <= 1e-10 * max(1.0, np.linalg.norm(rhs))


def test_adjoint_is_inverse(rng):
    T = mk.exp_skew(mk.wedge(rng.normal(size=6), rng.normal(size=6)), 0.4)
    np.testing.assert_allclose(mk.adjoint(T) @ T, np.eye(6), atol=1e-12)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**31 - 1), st.floats(0.05, 20), vec6, vec6)
def test_gamma_is_orthogonal(seed, t, v, w):
    rng = np.random.default_rng(seed)
    L, Lh = random_null(rng), random_null(rng)
    if abs(mk.pair(L, Lh)) < 1e-3:
        return
    T = mk.gamma_transform(L, Lh, t)
    assert mk.pair(T @ v, T @ w) == pytest.approx(mk.pair(v, w), abs=1e-8 * (1 + t + 1 / t) * 50)
    np.testing.assert_allclose(T @ Lh, t * Lh, atol=1e-10 * t)
    np.testing.assert_allclose(T @ L, L / t, atol=1e-10 / t)


def test_gamma_rejects_orthogonal_lines():
    with pytest.raises(DegeneratePair):
        mk.gamma_transform(mk.Q0, mk.Q0, 2.0)
    with pytest.raises(ValueError):
        mk.gamma_transform(mk.Q0, mk.QINF, 0.0)


def test_gamma_pole_cancellation_symbolic():
    """Gamma(1 - t/m) p(t) stays polynomial of the same degree.

    Hypotheses: (p(m), Lhat) = 0 and the top coefficient has no Lhat-part,
    i.e. (p_1, L) = 0.
    """
    t, m = sp.symbols("t m", nonzero=True)
    Gs = sp.diag(1, 1, 1, 1, -1, -1)
    L = sp.Matrix([1, 0, 0, 0, 1, 0])
    Lh = sp.Matrix([1, 0, 0, 0, -1, 0])
    c = (L.T * Gs * Lh)[0]
    lam = 1 - t / m
    Gam = sp.eye(6) + (1 / lam - 1) * L * (Gs * Lh).T / c + (lam - 1) * Lh * (Gs * L).T / c
    P0 = sp.Matrix(sp.symbols("x0:6"))
    P1 = sp.Matrix(sp.symbols("y0:6"))
    sol = sp.solve([(Gs * Lh).dot(P0 + m * P1), (Gs * L).dot(P1)], [P0[0], P1[0]], dict=True)[0]
    p = (P0 + t * P1).subs(sol)
    img = (Gam * p).applyfunc(lambda e: sp.cancel(sp.together(e)))
    for e in img:
        num, den = sp.fraction(e)
        assert t not in den.free_symbols
        assert sp.Poly(num, t).degree() <= 1
    # Gamma is an isometry for every t
    assert sp.simplify(Gam.T * Gs * Gam - Gs) == sp.zeros(6, 6)


def test_reorthogonalize_reduces_defect(rng):
    T = mk.exp_skew(mk.wedge(rng.normal(size=6), rng.normal(size=6)), 0.5)
    noisy = T + 1e-6 * rng.normal(size=(6, 6))
    fixed = mk.reorthogonalize(noisy)
    assert mk.orthogonality_defect(fixed) < 1e-12
    assert np.linalg.norm(fixed - T) < 1e-5


def test_null_directions_in():
    v = mk.null_directions_in(mk.BASIS, (0.3, 1.0, 2.0, 0.5))
    assert abs(mk.pair(v, v)) < 1e-14
    e1 = mk.BASIS[0]
    comp = mk.orthogonal_complement([mk.P, e1])
    w = mk.null_directions_in(comp, (0.4, 0.2))
    assert abs(mk.pair(w, w)) < 1e-14
    assert abs(mk.pair(w, mk.P)) < 1e-14 and abs(mk.pair(w, e1)) < 1e-14
    with pytest.raises(NoNullVectors):
        mk.null_directions_in(mk.BASIS[:4])


def test_orthogonal_complement_dimension(rng):
    V = rng.normal(size=(2, 6))
    C = mk.orthogonal_complement(V)
    assert C.shape == (4, 6)
    assert np.max(np.abs(V @ mk.G @ C.T)) < 1e-12
