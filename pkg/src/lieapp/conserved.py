"""Polynomial conserved quantities of the pencil d + t eta.

A conserved quantity of degree d is p(t) = p_0 + t p_1 + ... + t^d p_d with
p_0 constant and

    d p_k + eta p_{k-1} = 0   (k = 1..d),      eta p_d = 0.

Coefficients are stored as one array of shape (d+1, *grid, 6); p_0 is
broadcast over the grid.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import minkowski as mk
from .errors import DegenerateGInfinity, DependentQuantities
from .gauge import GaugeOneForm, lw_discriminant_sign
from .legendre import LegendreGrid

CONST_TOL = 1e-8
FLAT_TOL = 1e-8


@dataclass
class PolyCQ:
    """Coefficient fields p_0..p_d; ``derivs`` optionally holds exact (d/du, d/dv) of each."""

    coeffs: np.ndarray
    derivs: np.ndarray | None = None
    label: str = ""

    @property
    def degree(self):
        return self.coeffs.shape[0] - 1

    @property
    def grid_shape(self):
        return self.coeffs.shape[1:-1]

    def __call__(self, t):
        """Evaluate p(t) as a vector field."""
        out = np.zeros(self.coeffs.shape[1:])
        for pk in self.coeffs[::-1]:
            out = out * t + pk
        return out


def make_cq(coeff_list, grid_shape, derivs=None, label=""):
    """Stack coefficient fields, broadcasting constants over the grid."""
    arr = np.stack([np.broadcast_to(np.asarray(c, dtype=float), tuple(grid_shape) + (6,)) for c in coeff_list])
    return PolyCQ(coeffs=arr, derivs=derivs, label=label)


def combine(alpha, p: PolyCQ, beta, q: PolyCQ, label=""):
    """alpha p + beta q, padded to the larger degree."""
    d = max(p.degree, q.degree)

    def pad(r, arr):
        if arr is None:
            return None
        extra = d - r.degree
        return np.concatenate([arr, np.zeros((extra,) + arr.shape[1:])]) if extra else arr

    coeffs = alpha * pad(p, p.coeffs) + beta * pad(q, q.coeffs)
    derivs = None
    if p.derivs is not None and q.derivs is not None:
        derivs = alpha * pad(p, p.derivs) + beta * pad(q, q.derivs)
    return trim_degree(PolyCQ(coeffs=coeffs, derivs=derivs, label=label))


def trim_degree(p: PolyCQ, tol=1e-12):
    """Drop vanishing top coefficients (relative to the largest coefficient)."""
    scale = max(float(np.max(np.abs(p.coeffs))), 1e-300)
    d = p.degree
    while d > 0 and float(np.max(np.abs(p.coeffs[d]))) <= tol * scale:
        d -= 1
    if d == p.degree:
        return p
    derivs = None if p.derivs is None else p.derivs[: d + 1]
    return PolyCQ(coeffs=p.coeffs[: d + 1], derivs=derivs, label=p.label)


def lw_conserved_pair(L: LegendreGrid, a, b, c, frame: mk.Frame | None = None):
    """The linear conserved quantities of a linear Weingarten surface.

    p(t) = p + t(-b f + a t),   q(t) = q + t(c f - b t)

    with the point sphere complex p and space form vector q of the frame.
    """
    frame = frame or L.frame
    shape = L.shape
    p1 = -b * L.f + a * L.t
    q1 = c * L.f - b * L.t
    zero = np.zeros((2,) + shape + (6,))
    dp1 = np.stack([-b * L.fu + a * L.tu, -b * L.fv + a * L.tv])
    dq1 = np.stack([c * L.fu - b * L.tu, c * L.fv - b * L.tv])
    p = make_cq([frame.p, p1], shape, derivs=np.stack([zero, dp1]), label="p")
    q = make_cq([frame.qinf, q1], shape, derivs=np.stack([zero, dq1]), label="q")
    return p, q


def _edge_mid(a, axis):
    return 0.5 * (np.take(a, range(1, a.shape[axis]), axis=axis) + np.take(a, range(a.shape[axis] - 1), axis=axis))


def verify_cq(L: LegendreGrid | None, eta: GaugeOneForm, p: PolyCQ):
    """Residuals of the conserved-quantity equations.

    ``edge``: per-edge |delta p_k + eta_e p_{k-1}(mid)| / h, and |eta_e p_d(mid)| / h,
    scaled by the largest coefficient; second order in h.
    ``vertex``: the same with exact derivatives and vertex values of eta,
    when both are available.
    ``constant_term``: spatial spread of p_0.
    """
    scale = max(float(np.max(np.abs(p.coeffs))), 1e-300)
    C = p.coeffs
    p0 = C[0].reshape(-1, 6)
    const = float(np.max(np.abs(p0 - p0[0]))) / scale
    edge = []
    for axis, e, h in ((0, eta.eu, eta.h_u), (1, eta.ev, eta.h_v)):
        res = np.zeros(e.shape[:2])
        for k in range(1, p.degree + 2):
            prev = _edge_mid(C[k - 1], axis)
            r = mk.apply(e, prev)
            if k <= p.degree:
                r = r + np.diff(C[k], axis=axis)
            res = np.maximum(res, np.linalg.norm(r, axis=-1))
        edge.append(res / (h * scale))
    out = {
        "constant_term": const,
        "edge_max": float(max(np.max(edge[0]), np.max(edge[1]))),
        "edge_mean": float(0.5 * (np.mean(edge[0]) + np.mean(edge[1]))),
        "degree": p.degree,
    }
    if p.derivs is not None and eta.vertex is not None:
        V = eta.vertex
        res = 0.0
        for X in range(2):
            for k in range(1, p.degree + 2):
                r = mk.apply(V[X], C[k - 1])
                if k <= p.degree:
                    r = r + p.derivs[k, X]
                res = max(res, float(np.max(np.linalg.norm(r, axis=-1))))
        out["vertex_max"] = res / scale
    return out


@dataclass
class NormPolynomial:
    """Coefficients of (p(t), p(t)): grid means, per-vertex values and spatial deviation."""

    coeffs: np.ndarray
    per_vertex: np.ndarray
    deviation: np.ndarray

    @property
    def max_deviation(self):
        return float(np.max(self.deviation))


def norm_polynomial(p: PolyCQ) -> NormPolynomial:
    d = p.degree
    pv = np.zeros((2 * d + 1,) + p.grid_shape)
    for i in range(d + 1):
        for j in range(d + 1):
            pv[i + j] += mk.pair(p.coeffs[i], p.coeffs[j])
    flat = pv.reshape(2 * d + 1, -1)
    mean = flat.mean(axis=1)
    dev = np.max(np.abs(flat - mean[:, None]), axis=1)
    return NormPolynomial(coeffs=mean, per_vertex=pv, deviation=dev)


CLASSES = ("isothermic", "guichard", "l_isothermic", "degenerate_constant_term", "not_type1")


def classify_type1(p: PolyCQ, tol=CONST_TOL):
    """Branch on the norm polynomial of a linear conserved quantity.

    nonzero constant -> isothermic; linear with nonzero constant term ->
    guichard; identically zero -> l_isothermic; linear with vanishing
    constant term -> degenerate_constant_term; anything else -> not_type1.
    """
    if p.degree != 1:
        return "not_type1"
    c = norm_polynomial(p).coeffs
    scale = max(float(np.max(np.abs(p.coeffs))) ** 2, 1.0)
    z = np.abs(c) <= tol * scale
    c0, c1, c2 = z
    if not c2:
        return "not_type1"
    if c0 and c1:
        return "l_isothermic"
    if c1:
        return "isothermic"
    if c0:
        return "degenerate_constant_term"
    return "guichard"


@dataclass
class PencilMetrics:
    g0: np.ndarray
    ginf: np.ndarray
    p: PolyCQ
    q: PolyCQ
    deviation: float = 0.0
    extras: dict = field(default_factory=dict)

    @property
    def det_ginf(self):
        return float(np.linalg.det(self.ginf))

    def g(self, t):
        return self.g0 + t * self.ginf


def pencil_metrics(p: PolyCQ, q: PolyCQ) -> PencilMetrics:
    """g0 and g_inf on the basis (p, q) of a 2-space of linear conserved quantities."""
    if p.degree != 1 or q.degree != 1:
        raise DependentQuantities("pencil metrics need two linear conserved quantities")
    A = np.stack([p.coeffs.reshape(-1), q.coeffs.reshape(-1)])
    gram = A @ A.T
    if np.linalg.det(gram) <= 1e-20 * gram[0, 0] * gram[1, 1]:
        raise DependentQuantities("p and q are linearly dependent")
    basis = (p, q)
    g0 = np.zeros((2, 2))
    gi = np.zeros((2, 2))
    dev = 0.0
    for i, al in enumerate(basis):
        for j, be in enumerate(basis):
            v0 = mk.pair(al.coeffs[0], be.coeffs[0])
            vi = mk.pair(al.coeffs[0], be.coeffs[1]) + mk.pair(be.coeffs[0], al.coeffs[1])
            g0[i, j] = float(np.mean(v0))
            gi[i, j] = float(np.mean(vi))
            dev = max(dev, float(np.max(np.abs(vi - gi[i, j]))), float(np.max(np.abs(v0 - g0[i, j]))))
    return PencilMetrics(g0=g0, ginf=gi, p=p, q=q, deviation=dev)


def pencil_reproduction(P: PencilMetrics, t, idx=None):
    """max |g_t(alpha, beta) - (alpha(t), beta(t))| over the grid (or the given flat indices)."""
    pt = P.p(t).reshape(-1, 6)
    qt = P.q(t).reshape(-1, 6)
    if idx is not None:
        pt, qt = pt[idx], qt[idx]
    g = P.g(t)
    vals = [mk.pair(pt, pt) - g[0, 0], mk.pair(pt, qt) - g[0, 1], mk.pair(qt, qt) - g[1, 1]]
    return float(max(np.max(np.abs(v)) for v in vals))


@dataclass
class WeingartenTensor:
    W: np.ndarray
    abc: tuple
    discriminant: float
    cross_check: float

    def __call__(self, v, w):
        return mk.form(self.W, v, w)


def weingarten_from_pencil(P: PencilMetrics, p0=None, q0=None) -> WeingartenTensor:
    """Invert g_inf into the symmetric square of P and evaluate at t = 0.

    With A, B, C = g_inf(p,p), g_inf(p,q), g_inf(q,q) and D = AC - B^2 the
    inverse metric is (C p.p - 2B p.q + A q.q)/D; the recovered triple is
    (a, b, c) = (-A/2, B/2, -C/2), and W is cross-checked against
    a q.q + 2b q.p + c p.p up to scale.
    """
    p0 = P.p.coeffs[0].reshape(-1, 6)[0] if p0 is None else np.asarray(p0, dtype=float)
    q0 = P.q.coeffs[0].reshape(-1, 6)[0] if q0 is None else np.asarray(q0, dtype=float)
    A, B, C = P.ginf[0, 0], P.ginf[0, 1], P.ginf[1, 1]
    D = A * C - B * B
    if abs(D) <= 1e-10 * max(A * A + B * B + C * C, 1e-300):
        raise DegenerateGInfinity("g_inf is degenerate (tubular case)")
    W = (C * mk.sym(p0, p0) - 2 * B * mk.sym(p0, q0) + A * mk.sym(q0, q0)) / D
    a, b, c = -A / 2 + 0.0, B / 2 + 0.0, -C / 2 + 0.0
    W2 = a * mk.sym(q0, q0) + 2 * b * mk.sym(q0, p0) + c * mk.sym(p0, p0)
    s = np.sum(W * W2) / np.sum(W2 * W2)
    cross = float(np.linalg.norm(W - s * W2) / np.linalg.norm(W))
    return WeingartenTensor(W=W, abc=(a, b, c), discriminant=b * b - a * c, cross_check=cross)


def weingarten_residual(WT: WeingartenTensor, s1, s2):
    """|W(s1, s2)| / (|W| |s1| |s2|) per vertex (Euclidean norms)."""
    num = np.abs(WT(s1, s2))
    return num / (np.linalg.norm(WT.W) * np.linalg.norm(s1, axis=-1) * np.linalg.norm(s2, axis=-1))


def flat_front_detect(P: PencilMetrics, tol=FLAT_TOL):
    """Return t0 with g0 = -t0 g_inf if the two metrics are proportional, else None."""
    gi = P.ginf
    nn = float(np.sum(gi * gi))
    if nn == 0.0:
        return None
    t0 = -float(np.sum(P.g0 * gi)) / nn
    res = np.linalg.norm(P.g0 + t0 * gi) / max(np.linalg.norm(P.g0), np.linalg.norm(gi))
    return t0 if res <= tol else None


@dataclass
class ComplementaryRoots:
    roots: list
    identically_zero: bool = False


def complementary_roots(p: PolyCQ, tol=CONST_TOL) -> ComplementaryRoots:
    """Nonzero real roots m of (p(t), p(t)) with the null fields p(m).

    Only degree <= 2 norm polynomials occur (linear conserved quantities);
    they are solved in closed form.
    """
    c = norm_polynomial(p).coeffs
    scale = max(float(np.max(np.abs(p.coeffs))) ** 2, 1.0)
    c = np.where(np.abs(c) <= tol * scale, 0.0, c)
    if np.all(c == 0):
        return ComplementaryRoots(roots=[], identically_zero=True)
    c = np.trim_zeros(c, "b")
    if len(c) > 3:
        raise ValueError("complementary roots are only solved for norm polynomials of degree <= 2")
    roots = []
    if len(c) == 2:
        roots = [-c[0] / c[1]]
    elif len(c) == 3:
        disc = c[1] ** 2 - 4 * c[2] * c[0]
        if disc >= 0:
            sq = np.sqrt(disc)
            roots = sorted({(-c[1] - sq) / (2 * c[2]), (-c[1] + sq) / (2 * c[2])})
    roots = [float(m) for m in roots if abs(m) > tol]
    return ComplementaryRoots(roots=[(m, p(m)) for m in roots])


def gauge_transform_cq(p: PolyCQ, tau) -> PolyCQ:
    """Action of exp(t tau) for tau in the wedge square of f (tau^2 = 0).

    exp(t tau) p(t) = p(t) + t tau p(t), so the new coefficients are
    p_k + tau p_{k-1}; a vanishing new top coefficient drops the degree.
    """
    tau = np.asarray(tau, dtype=float)
    C = p.coeffs
    new = np.concatenate([C, np.zeros((1,) + C.shape[1:])])
    for k in range(1, new.shape[0]):
        new[k] = new[k] + mk.apply(tau, C[k - 1])
    return trim_degree(PolyCQ(coeffs=new, label=p.label), tol=1e-10)


def tubular_cq(p: PolyCQ, q: PolyCQ, a, b, c) -> PolyCQ:
    """c p + b q; its top coefficient is (ac - b^2) t, so it is constant exactly in the tubular case."""
    return combine(c, p, b, q, label="tubular")


def classify_lw(L: LegendreGrid, eta: GaugeOneForm, a, b, c):
    """Classification report for a linear Weingarten surface with its middle potential."""
    p, q = lw_conserved_pair(L, a, b, c)
    sign = lw_discriminant_sign(a, b, c)
    out = {"discriminant_sign": sign, "cq_residuals": {}, "norm_deviation": {}}
    for r in (p, q):
        out["cq_residuals"][r.label] = verify_cq(L, eta, r)
        out["norm_deviation"][r.label] = norm_polynomial(r).max_deviation
    if sign == 0:
        t = tubular_cq(p, q, a, b, c)
        out["branch"] = "tubular"
        out["tubular_cq_degree"] = t.degree
        out["tubular_cq"] = t.coeffs[0].reshape(-1, 6)[0].tolist()
        out["cq_residuals"]["tubular"] = verify_cq(L, eta, t)
        out["classes"] = {}
        return out
    out["branch"] = "type1"
    out["classes"] = {"p": classify_type1(p), "q": classify_type1(q)}
    P = pencil_metrics(p, q)
    WT = weingarten_from_pencil(P)
    out["g0"] = P.g0.tolist()
    out["ginf"] = P.ginf.tolist()
    out["abc_recovered"] = WT.abc
    out["W_cross_check"] = WT.cross_check
    out["W_residual"] = float(np.max(weingarten_residual(WT, L.sigma1, L.sigma2)[L.mask]))
    out["flat_front_t0"] = flat_front_detect(P)
    out["complementary_roots"] = {}
    for r in (p, q):
        cr = complementary_roots(r)
        out["complementary_roots"][r.label] = "all" if cr.identically_zero else [m for m, _ in cr.roots]
    return out
