"""Integration of the flat pencil d + t eta and the transformations built on it.

The trivializing gauge T(t) solves dT = t T eta, so T(t) p is constant for
every parallel section p of d + t eta. It is pinned by T = I at a basepoint
vertex and propagated edge by edge with the midpoint rule

    T(next) = T(current) exp(t eta_e)

(backward steps use exp(-t eta_e)).

Darboux transforms are parametrized by m (a nonzero real) and a constant
null line L (a point of the 4-dimensional projective lightcone), giving the
5-parameter family; restricting L to the orthogonal complement of the
parallel 2-plane P(m) of a linear Weingarten surface leaves a 2-sphere of
seeds, which together with m is the 3-parameter family that preserves the
linear Weingarten condition.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import minkowski as mk
from .conserved import PolyCQ, WeingartenTensor, weingarten_residual
from .errors import NotApproximatelyFlat, RegularityViolation, SingularIntersection
from .gauge import GaugeOneForm
from .legendre import LegendreGrid, recover_curvature, space_form_projection

REGULARITY_TOL = 1e-4
FLAT_FACTOR = 10.0


@dataclass
class GaugeField:
    T: np.ndarray
    t: float
    basepoint: tuple = (0, 0)
    order: str = "row"

    @property
    def inverse(self):
        return mk.adjoint(self.T)

    def apply(self, v):
        return mk.apply(self.T, v)


def edge_exponentials(eta: GaugeOneForm, t):
    """exp(t eta_e) and exp(-t eta_e) for all u- and v-edges."""
    return (mk.exp_skew(eta.eu, t), mk.exp_skew(eta.eu, -t),
            mk.exp_skew(eta.ev, t), mk.exp_skew(eta.ev, -t))


def _sweep(T, E, Einv, start, axis, reortho):
    """Propagate T along ``axis`` from index ``start`` in both directions, batched over the other axis."""
    n = T.shape[axis]
    idx = [slice(None)] * 2

    def at(a, k):
        idx[axis] = k
        return a[tuple(idx)]

    def put(k, val):
        idx[axis] = k
        T[tuple(idx)] = val

    for k in range(start + 1, n):
        put(k, mk.reorthogonalize(at(T, k - 1) @ at(E, k - 1), reortho))
    for k in range(start - 1, -1, -1):
        put(k, mk.reorthogonalize(at(T, k + 1) @ at(Einv, k), reortho))


def integrate_gauge(eta: GaugeOneForm, t, basepoint=(0, 0), order="row", check_flat=True,
                    reortho=mk.ORTHO_TOL, exps=None) -> GaugeField:
    """Trivializing gauge of d + t eta.

    ``order="row"`` goes along the basepoint row in u first and then up and
    down every column in v; ``"column"`` is the transposed sweep, kept as a
    path-independence diagnostic. With ``check_flat`` the mean plaquette
    holonomy is compared with the flat-pencil prediction (see
    ``flatness_report``) and NotApproximatelyFlat is raised beyond 10x.
    """
    nu, nv = eta.shape
    i0, j0 = basepoint
    T = np.zeros((nu, nv, 6, 6))
    if t == 0:
        T[:] = np.eye(6)
        return GaugeField(T=T, t=t, basepoint=basepoint, order=order)
    Eu, Eui, Ev, Evi = exps if exps is not None else edge_exponentials(eta, t)
    if check_flat:
        rep = flatness_report(eta, t, exps=(Eu, Eui, Ev, Evi))
        if rep["ratio"] > FLAT_FACTOR:
            raise NotApproximatelyFlat(
                f"mean holonomy {rep['mean']:.3e} exceeds {FLAT_FACTOR:g}x the flat prediction {rep['predicted']:.3e}"
            )
    if order == "row":
        T[i0, j0] = np.eye(6)
        line = T[:, j0]
        _sweep(line[:, None], Eu[:, j0][:, None], Eui[:, j0][:, None], i0, 0, reortho)
        T[:, j0] = line
        _sweep(T, Ev, Evi, j0, 1, reortho)
    elif order == "column":
        T[i0, j0] = np.eye(6)
        line = T[i0]
        _sweep(line[None], Ev[i0][None], Evi[i0][None], j0, 1, reortho)
        T[i0] = line
        _sweep(T, Eu, Eui, i0, 0, reortho)
    else:
        raise ValueError(f"unknown sweep order {order!r}")
    return GaugeField(T=T, t=t, basepoint=basepoint, order=order)


def holonomy_residual(eta: GaugeOneForm, t, exps=None):
    """Per-plaquette |E_u(i,j) E_v(i+1,j) E_u(i,j+1)^-1 E_v(i,j)^-1 - I| (Frobenius)."""
    if t == 0:
        return np.zeros((eta.shape[0] - 1, eta.shape[1] - 1))
    Eu, Eui, Ev, Evi = exps if exps is not None else edge_exponentials(eta, t)
    H = Eu[:, :-1] @ Ev[1:] @ Eui[:, 1:] @ Evi[:-1] - np.eye(6)
    return np.linalg.norm(H, axis=(-2, -1))


def quadrature_error_form(eta: GaugeOneForm):
    """Estimated midpoint-rule error of every edge value, (midpoint - trapezoid) / 3.

    Needs the vertex values of eta; returns None without them.
    """
    if eta.vertex is None:
        return None
    Vu, Vv = eta.vertex
    tu = 0.5 * eta.h_u * (Vu[1:] + Vu[:-1])
    tv = 0.5 * eta.h_v * (Vv[:, 1:] + Vv[:, :-1])
    return (eta.eu - tu) / 3.0, (eta.ev - tv) / 3.0


def flatness_report(eta: GaugeOneForm, t, exps=None):
    """Mean plaquette holonomy against the prediction for a flat pencil.

    A closed form integrated with the midpoint rule has a holonomy equal, to
    leading order, to the oriented plaquette sum of its quadrature errors
    (fourth order per plaquette). That sum, scaled by |t|, is the prediction;
    a genuine curvature defect adds a second-order term on top and drives
    the ratio up under refinement. The ratio is reported as 0 when no
    vertex values are available to estimate the quadrature error.
    """
    hol = holonomy_residual(eta, t, exps)
    mean = float(np.mean(hol))
    err = quadrature_error_form(eta)
    if err is None:
        return {"mean": mean, "max": float(np.max(hol)), "predicted": float("nan"), "ratio": 0.0}
    eu, ev = err
    plaq = eu[:, :-1] + ev[1:] - eu[:, 1:] - ev[:-1]
    scale = max(float(np.max(np.abs(eta.eu))), float(np.max(np.abs(eta.ev))))
    predicted = abs(t) * float(np.mean(np.linalg.norm(plaq, axis=(-2, -1)))) + 1e-14 * abs(t) * scale
    return {"mean": mean, "max": float(np.max(hol)), "predicted": predicted, "ratio": mean / predicted}


def path_disagreement(eta: GaugeOneForm, t, basepoint=(0, 0)):
    """max over vertices of |T_row - T_column| (Frobenius)."""
    exps = edge_exponentials(eta, t)
    Tr = integrate_gauge(eta, t, basepoint, "row", check_flat=False, exps=exps).T
    Tc = integrate_gauge(eta, t, basepoint, "column", check_flat=False, exps=exps).T
    return float(np.max(np.linalg.norm(Tr - Tc, axis=(-2, -1))))


def conjugate_form(eta: GaugeOneForm, G: GaugeField) -> GaugeOneForm:
    """eta^t = T eta T^-1; edge values use T at the edge midpoint, T(A) exp(t eta_e / 2)."""
    T, Ti = G.T, G.inverse
    t = G.t
    Hu = mk.exp_skew(eta.eu, 0.5 * t)
    Hv = mk.exp_skew(eta.ev, 0.5 * t)
    Tu = T[:-1] @ Hu
    Tv = T[:, :-1] @ Hv
    eu = Tu @ eta.eu @ mk.adjoint(Tu)
    ev = Tv @ eta.ev @ mk.adjoint(Tv)
    vertex = None
    if eta.vertex is not None:
        vertex = T[None] @ eta.vertex @ Ti[None]
    return GaugeOneForm(eu=eu, ev=ev, h_u=eta.h_u, h_v=eta.h_v, vertex=vertex, middle=eta.middle, coeffs=eta.coeffs)


def shift_cq(p: PolyCQ, t) -> PolyCQ:
    """Coefficients of s -> p(s + t) (binomial re-expansion)."""
    from math import comb

    d = p.degree
    C = p.coeffs
    new = np.zeros_like(C)
    for j in range(d + 1):
        for k in range(j, d + 1):
            new[j] += comb(k, j) * t ** (k - j) * C[k]
    return PolyCQ(coeffs=new, label=p.label)


def transport_cq(p: PolyCQ, G: GaugeField) -> PolyCQ:
    """p^t(s) = T(t) p(s + t), a conserved quantity of the Calapso transform."""
    sh = shift_cq(p, G.t)
    coeffs = np.stack([mk.apply(G.T, c) for c in sh.coeffs])
    return PolyCQ(coeffs=coeffs, label=p.label)


@dataclass
class CalapsoResult:
    gauge: GaugeField
    f: np.ndarray
    t: np.ndarray
    sigma1: np.ndarray
    sigma2: np.ndarray
    eta: GaugeOneForm
    q: np.ndarray
    q_deviation: float
    cqs: list = field(default_factory=list)


def calapso_transform(L: LegendreGrid, eta: GaugeOneForm, t, cqs=(), basepoint=(0, 0), check_flat=True) -> CalapsoResult:
    """The Calapso transform T(t) f, its potential T eta T^-1 and transported conserved quantities.

    The quadratic differential of the transform is recomputed from scratch:
    d(T sigma_i) is differenced on the grid (fourth-order stencils), the trace is
    taken in the frame T sigma_1, T sigma_2, and the relative deviation from
    the original q is reported.
    """
    from .gauge import trace_form

    G = integrate_gauge(eta, t, basepoint=basepoint, check_flat=check_flat)
    f_t = G.apply(L.f)
    t_t = G.apply(L.t)
    s1 = G.apply(L.sigma1)
    s2 = G.apply(L.sigma2)
    eta_t = conjugate_form(eta, G)
    g = L.grid
    ds = []
    for s in (s1, s2):
        ds.append([_diff4(s, g.h_u, 0), _diff4(s, g.h_v, 1)])
    shadow = LegendreGrid(f=f_t, t=t_t, fu=L.fu, fv=L.fv, tu=L.tu, tv=L.tv, k1=L.k1, k2=L.k2, grid=g, frame=L.frame)
    q_t = trace_form(shadow, eta_t.vertex, dsig=ds)
    q0 = trace_form(L, eta.vertex)
    m = L.mask
    diff = np.nan_to_num(q_t - q0)[:, :, m]
    dev = float(np.linalg.norm(diff) / np.linalg.norm(np.nan_to_num(q0)[:, :, m]))
    moved = [transport_cq(p, G) for p in cqs]
    return CalapsoResult(gauge=G, f=f_t, t=t_t, sigma1=s1, sigma2=s2, eta=eta_t, q=q_t, q_deviation=dev, cqs=moved)


@dataclass
class DarbouxResult:
    m: float
    seed: np.ndarray
    shat: np.ndarray
    s0: np.ndarray
    margin: float
    isotropy: float
    gauge: GaugeField | None = None
    L: LegendreGrid | None = None

    @property
    def plane(self):
        return self.s0, self.shat


def _sign_change(a, msk):
    """First edge (as a vertex index) along which a changes sign, or None."""
    for axis in (0, 1):
        lo = [slice(None)] * 2
        hi = [slice(None)] * 2
        lo[axis], hi[axis] = slice(None, -1), slice(1, None)
        lo, hi = tuple(lo), tuple(hi)
        flip = (np.sign(a[lo]) * np.sign(a[hi]) < 0) & msk[lo] & msk[hi]
        if flip.any():
            return tuple(int(i) for i in np.argwhere(flip)[0])
    return None


def darboux_transform(L: LegendreGrid, eta: GaugeOneForm, m, seed, gauge: GaugeField | None = None,
                      regularity_tol=REGULARITY_TOL, basepoint=(0, 0), check_flat=True) -> DarbouxResult:
    """Darboux transform from the parallel null line shat = T(m)^-1 seed.

    s0 = (shat, sigma2) sigma1 - (shat, sigma1) sigma2 spans f meet shat-perp,
    and the transform is the isotropic plane s0 + shat. The regularity
    margin is min |(shat, sigma_i)| / (|shat| |sigma_i|) over unmasked vertices.
    A sign change of (shat, sigma_i) along an edge also counts as a violation,
    since the singular curve then passes between vertices.
    """
    if m == 0:
        raise ValueError("Darboux transforms need m != 0")
    seed = np.asarray(seed, dtype=float)
    if not mk.is_null(seed, 1e-9):
        raise ValueError("seed must be a null vector")
    G = gauge if gauge is not None else integrate_gauge(eta, m, basepoint=basepoint, check_flat=check_flat)
    shat = mk.apply(G.inverse, seed)
    shat = shat / np.linalg.norm(shat, axis=-1, keepdims=True)
    s1, s2 = L.sigma1, L.sigma2
    a1 = mk.pair(shat, s1) / np.linalg.norm(s1, axis=-1)
    a2 = mk.pair(shat, s2) / np.linalg.norm(s2, axis=-1)
    msk = L.mask
    both = np.maximum(np.abs(a1), np.abs(a2))
    if np.any(both[msk] < regularity_tol):
        raise SingularIntersection("shat is orthogonal to the whole plane f at some vertex")
    margin = float(np.min(np.minimum(np.abs(a1), np.abs(a2))[msk]))
    if margin < regularity_tol:
        raise RegularityViolation(f"shat is (nearly) orthogonal to a curvature sphere: margin {margin:.2e}")
    crossing = _sign_change(a1, msk) or _sign_change(a2, msk)
    if crossing:
        raise RegularityViolation(f"shat meets a curvature sphere between vertices near {crossing}")
    s0 = mk.pair(shat, s2)[..., None] * s1 - mk.pair(shat, s1)[..., None] * s2
    s0 = s0 / np.linalg.norm(s0, axis=-1, keepdims=True)
    iso = float(np.max(np.maximum.reduce([
        np.abs(mk.pair(s0, s0)), np.abs(mk.pair(shat, shat)), np.abs(mk.pair(s0, shat))
    ])[msk]))
    return DarbouxResult(m=m, seed=seed, shat=shat, s0=s0, margin=margin, isotropy=iso, gauge=G, L=L)


def lw_seed(P_m, angles=(0.0, 0.0)):
    """A null seed orthogonal to the given vectors (values of conserved quantities at the basepoint)."""
    comp = mk.orthogonal_complement(np.atleast_2d(P_m))
    return mk.null_directions_in(comp, angles)


def enforce_orthogonality(shat, vectors):
    """Move a null field onto the lightcone of the orthogonal complement of ``vectors``.

    ``vectors`` has shape (k, *grid, 6). Per vertex the field is projected
    (Euclidean-orthogonally) onto the complement, which works also when the
    spanned space is degenerate, and the part along a unit timelike
    direction of the complement is rescaled so the result is null again.
    Used to pin constraints that the discrete transport satisfies only to
    O(h^2).
    """
    V = np.asarray(vectors, dtype=float)
    k = V.shape[0]
    shape = shat.shape
    A = np.moveaxis(V.reshape(k, -1, 6), 0, 1) * mk.METRIC_DIAG      # (N, k, 6) lowered rows
    _, sv, Vt = np.linalg.svd(A)
    rank = k
    B = Vt[:, rank:, :]                                              # (N, 6-k, 6) complement basis
    s = shat.reshape(-1, 6)
    s = np.einsum("nij,nj->ni", B, s)
    s = np.einsum("nij,ni->nj", B, s)
    gram = B @ mk.G @ np.swapaxes(B, -1, -2)
    w, U = np.linalg.eigh(gram)
    e = np.einsum("ni,nij->nj", U[:, :, 0], B)
    e = e / np.sqrt(-mk.pair(e, e))[:, None]
    e = e * np.sign(e[:, 5] + (e[:, 5] == 0))[:, None]
    a = -mk.pair(s, e)
    x = s - a[:, None] * e
    nx = np.sqrt(np.maximum(mk.pair(x, x), 0.0))
    out = np.sign(a)[:, None] * nx[:, None] * e + x
    out = out / np.linalg.norm(out, axis=-1, keepdims=True)
    return out.reshape(shape)


@dataclass
class ReprojectedSurface:
    x: np.ndarray
    n: np.ndarray
    f: np.ndarray
    t: np.ndarray
    k1: np.ndarray
    k2: np.ndarray
    fu: np.ndarray
    fv: np.ndarray
    tu: np.ndarray
    tv: np.ndarray

    @property
    def sigma1(self):
        return self.t + self.k1[..., None] * self.f

    @property
    def sigma2(self):
        return self.t + self.k2[..., None] * self.f

    @property
    def H(self):
        return 0.5 * (self.k1 + self.k2)

    @property
    def K(self):
        return self.k1 * self.k2


def _diff4(a, h, axis):
    """Fourth-order central differences with fourth-order one-sided stencils at the ends."""
    a = np.moveaxis(a, axis, 0)
    d = np.empty_like(a)
    d[2:-2] = (a[:-4] - 8 * a[1:-3] + 8 * a[3:-1] - a[4:]) / (12 * h)
    c = np.array([-25, 48, -36, 16, -3]) / (12 * h)
    d[0] = np.tensordot(c, a[:5], axes=1)
    d[1] = np.tensordot(np.array([-3, -10, 18, -6, 1]) / (12 * h), a[:5], axes=1)
    d[-1] = -np.tensordot(c, a[::-1][:5], axes=1)
    d[-2] = -np.tensordot(np.array([-3, -10, 18, -6, 1]) / (12 * h), a[::-1][:5], axes=1)
    return np.moveaxis(d, 0, axis)


def reproject(D: DarbouxResult, frame: mk.Frame | None = None, order=4) -> ReprojectedSurface:
    """Euclidean point/plane lifts of the transformed plane and its principal curvatures.

    Darboux pairs are Ribaucour, so curvature lines are kept and the
    curvatures follow from t_u + k1 f_u = 0 with differenced partials.
    """
    frame = frame or D.L.frame
    f, t = space_form_projection(D.s0, D.shat, frame.qinf, frame.p)
    g = D.L.grid
    if order == 4:
        fu, fv = _diff4(f, g.h_u, 0), _diff4(f, g.h_v, 1)
        tu, tv = _diff4(t, g.h_u, 0), _diff4(t, g.h_v, 1)
    else:
        fu, fv = np.gradient(f, g.u, g.v, axis=(0, 1), edge_order=2)
        tu, tv = np.gradient(t, g.u, g.v, axis=(0, 1), edge_order=2)
    k1 = recover_curvature(fu, tu)
    k2 = recover_curvature(fv, tv)
    x, n = frame.euclidean_part(f), frame.euclidean_part(t)
    return ReprojectedSurface(x=x, n=n, f=f, t=t, k1=k1, k2=k2, fu=fu, fv=fv, tu=tu, tv=tv)


def reverse_line(D: DarbouxResult):
    """The line s in f used for the reverse transform: the direction in f Euclidean-orthogonal to s0."""
    s1, s2 = D.L.sigma1, D.L.sigma2
    s0 = D.s0
    # Gram-Schmidt of sigma1 (or sigma2) against s0 in Euclidean coordinates
    base = np.where((np.abs(np.sum(s1 * s0, -1)) < np.abs(np.sum(s2 * s0, -1)))[..., None], s1, s2)
    s = base - np.sum(base * s0, -1, keepdims=True) * s0
    return s / np.linalg.norm(s, axis=-1, keepdims=True)


def _polymul_linear(C, m):
    """Multiply coefficient stack C (k, ...) by (1 - t/m)."""
    out = np.zeros((C.shape[0] + 1,) + C.shape[1:])
    out[:-1] += C
    out[1:] -= C / m
    return out


def _polydiv_linear(C, m):
    """Synthetic division of C(t) by (1 - t/m); returns quotient stack and remainder C(m)."""
    d = C.shape[0] - 1
    # C(t) = (1 - t/m) Q(t) + r; solve from the top: C_d = -Q_{d-1}/m, C_k = Q_k - Q_{k-1}/m
    Q = np.zeros((max(d, 1),) + C.shape[1:])
    if d == 0:
        return Q * 0, C[0]
    Q[d - 1] = -m * C[d]
    for k in range(d - 1, 0, -1):
        Q[k - 1] = m * (Q[k] - C[k])
    r = C[0] - Q[0]
    return Q, r


@dataclass
class TransportedCQ:
    cq: PolyCQ
    constrained: bool
    constraint_residual: float
    remainder: float


def darboux_cq_transport(D: DarbouxResult, p: PolyCQ, s=None, constrained=None, enforce=True,
                         constraint_tol=1e-3) -> TransportedCQ:
    """Carry a conserved quantity of f to the Darboux transform.

    Unconstrained: phat(t) = (1 - t/m) Gamma(1 - t/m) p(t), of degree d + 1.
    Constrained ((p(m), shat) = 0): phat(t) = Gamma(1 - t/m) p(t), of degree d,
    where the pole of the s-component cancels by exact division. Gamma scales
    the shat-component by its argument and the s-component by the inverse.

    ``constrained=None`` decides from the normalized residual of (p(m), shat)
    (threshold ``constraint_tol``). With ``enforce`` the constrained branch
    first projects shat onto the lightcone of p(m)-perp, so the division is
    exact; the pre-projection residual is reported.
    """
    m = D.m
    shat = D.shat
    pm = p(m)
    res = float(np.max(np.abs(mk.pair(pm, shat)) / (np.linalg.norm(pm, axis=-1) * np.linalg.norm(shat, axis=-1))))
    if constrained is None:
        constrained = res <= constraint_tol
    if constrained and enforce:
        shat = enforce_orthogonality(shat, pm[None])
    if s is None:
        s = reverse_line(D)
    ss = mk.pair(s, shat)[None, ..., None]
    C = p.coeffs
    A = mk.pair(C, shat[None])[..., None] / ss        # s-component coefficients
    B = mk.pair(C, s[None])[..., None] / ss           # shat-component coefficients
    rest = C - A * s[None] - B * shat[None]
    if constrained:
        Aq, r = _polydiv_linear(A, m)
        Bm = _polymul_linear(B, m)
        d = p.degree
        out = np.zeros((d + 1,) + C.shape[1:])
        out += rest
        out += Bm[: d + 1] * shat[None]
        out[: Aq.shape[0]] += Aq * s[None]
        rem = float(np.max(np.abs(r)))
    else:
        R1 = _polymul_linear(rest, m)
        B2 = _polymul_linear(_polymul_linear(B, m), m)
        d = p.degree + 1
        out = np.zeros((d + 1,) + C.shape[1:])
        out += R1
        out += B2[: d + 1] * shat[None]
        out[: A.shape[0]] += A * s[None]
        rem = 0.0
    return TransportedCQ(cq=PolyCQ(coeffs=out, label=p.label + "^"), constrained=bool(constrained),
                         constraint_residual=res, remainder=rem)


@dataclass
class LWDarboux:
    result: DarbouxResult
    surface: ReprojectedSurface
    lw_residual: np.ndarray
    W_residual: np.ndarray
    transported: list
    constraint_residual: float


def lw_preserving_darboux(L: LegendreGrid, eta: GaugeOneForm, p: PolyCQ, q: PolyCQ, m, angles=(0.0, 0.0),
                          WT: WeingartenTensor | None = None, abc=None, basepoint=(0, 0), enforce=False,
                          check_flat=True, trim=2) -> LWDarboux:
    """Darboux transform whose seed is orthogonal to P(m) = span(p(m), q(m)) at the basepoint.

    Since T(m) p(m) is constant, the seed stays orthogonal to P(m) all over
    the grid and the transform satisfies the same linear Weingarten
    condition. After Euclidean re-projection the pointwise residual
    a K + 2b H + c and the normalized W(shat_1, shat_2) are returned,
    ignoring ``trim`` rows of vertices at the boundary (one-sided stencils).
    """
    i0, j0 = basepoint
    Pm = np.stack([p(m)[i0, j0], q(m)[i0, j0]])
    seed = lw_seed(Pm, angles)
    D = darboux_transform(L, eta, m, seed, basepoint=basepoint, check_flat=check_flat)
    cres = float(np.max(np.abs(np.stack([mk.pair(D.shat, p(m)), mk.pair(D.shat, q(m))]))
                        / np.linalg.norm(D.shat, axis=-1)))
    if enforce:
        shat = enforce_orthogonality(D.shat, np.stack([p(m), q(m)]))
        s1, s2 = L.sigma1, L.sigma2
        s0 = mk.pair(shat, s2)[..., None] * s1 - mk.pair(shat, s1)[..., None] * s2
        s0 = s0 / np.linalg.norm(s0, axis=-1, keepdims=True)
        D = DarbouxResult(m=m, seed=seed, shat=shat, s0=s0, margin=D.margin, isotropy=D.isotropy, gauge=D.gauge, L=L)
    S = reproject(D)
    a, b, c = abc if abc is not None else (WT.abc if WT is not None else eta.coeffs)
    sl = (slice(trim, -trim or None), slice(trim, -trim or None))
    lw = (a * S.K + 2 * b * S.H + c)[sl]
    if WT is None:
        from .conserved import pencil_metrics, weingarten_from_pencil

        WT = weingarten_from_pencil(pencil_metrics(p, q))
    Wr = weingarten_residual(WT, S.sigma1, S.sigma2)[sl]
    moved = [darboux_cq_transport(D, r, constrained=True, enforce=True) for r in (p, q)]
    return LWDarboux(result=D, surface=S, lw_residual=lw, W_residual=Wr, transported=moved, constraint_residual=cres)
