"""Discrete f^f-perp valued 1-forms on curvature-line grids.

A 1-form eta is stored edge-integrated: the value on the u-edge from
(i, j) to (i+1, j) is h_u * eta(d/du) at the edge midpoint, and likewise for
v-edges. Optionally the exact pointwise values eta(d/du), eta(d/dv) at the
vertices are kept as well; they feed the quadratic differential.

Shapes: ``eu`` (nu-1, nv, 6, 6), ``ev`` (nu, nv-1, 6, 6),
``vertex`` (2, nu, nv, 6, 6).
"""
from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from . import minkowski as mk
from .catalog import SampledGrid
from .errors import AllZeroCoefficients, AssociateSingular, BadParams, FrameDegenerate, GeometryError, TauNotInWedgeF
from .legendre import LegendreGrid


@dataclass
class GaugeOneForm:
    eu: np.ndarray
    ev: np.ndarray
    h_u: float
    h_v: float
    vertex: np.ndarray | None = None
    middle: bool = False
    coeffs: tuple | None = None

    @property
    def shape(self):
        return (self.ev.shape[0], self.eu.shape[1])

    def scaled(self, s):
        """The form s * eta."""
        v = None if self.vertex is None else s * self.vertex
        return replace(self, eu=s * self.eu, ev=s * self.ev, vertex=v)


@dataclass
class QuadDiff:
    quu: np.ndarray
    quv: np.ndarray
    qvv: np.ndarray
    mask: np.ndarray

    def as_array(self):
        return np.stack([self.quu, self.quv, self.qvv])


def lw_eta(f, t, fX, tX, a, b, c):
    """eta(X) = c f^df(X) - b (f^dt(X) + t^df(X)) + a t^dt(X)."""
    return (
        c * mk.wedge(f, fX)
        - b * (mk.wedge(f, tX) + mk.wedge(t, fX))
        + a * mk.wedge(t, tX)
    )


def middle_potential_lw(L: LegendreGrid, a, b, c) -> GaugeOneForm:
    """Middle potential of a linear Weingarten surface aK + 2bH + c = 0.

    Edge values use the lifted data at the edge midpoints.
    """
    if a == 0 and b == 0 and c == 0:
        raise AllZeroCoefficients("(a, b, c) = (0, 0, 0) defines no linear Weingarten condition")
    g = L.grid
    mu = L.midpoints(0)
    mv = L.midpoints(1)
    eu = g.h_u * lw_eta(mu["f"], mu["t"], mu["fu"], mu["tu"], a, b, c)
    ev = g.h_v * lw_eta(mv["f"], mv["t"], mv["fv"], mv["tv"], a, b, c)
    vertex = np.stack([
        lw_eta(L.f, L.t, L.fu, L.tu, a, b, c),
        lw_eta(L.f, L.t, L.fv, L.tv, a, b, c),
    ])
    return GaugeOneForm(eu=eu, ev=ev, h_u=g.h_u, h_v=g.h_v, vertex=vertex, middle=True, coeffs=(a, b, c))


def exterior_derivative(eta: GaugeOneForm):
    """Oriented plaquette sums; shape (nu-1, nv-1, 6, 6).

    The plaquette (i, j) is traversed u-edge at j, v-edge at i+1, u-edge at
    j+1 backwards, v-edge at i backwards.
    """
    return eta.eu[:, :-1] + eta.ev[1:, :] - eta.eu[:, 1:] - eta.ev[:-1, :]


def plaquette_mask(mask):
    """Plaquettes whose four corners are all unmasked."""
    return mask[:-1, :-1] & mask[1:, :-1] & mask[:-1, 1:] & mask[1:, 1:]


def closedness_residual(eta: GaugeOneForm, mask=None):
    """Area-normalized plaquette residuals |d eta| / (h_u h_v) and their max and mean."""
    plaq = exterior_derivative(eta)
    r = np.linalg.norm(plaq, axis=(-2, -1)) / (eta.h_u * eta.h_v)
    m = np.ones(r.shape, dtype=bool) if mask is None else plaquette_mask(mask)
    return {"per_plaquette": r, "max": float(np.max(r[m])), "mean": float(np.mean(r[m]))}


def closedness_oracle(L: LegendreGrid, a, b, c):
    """Pointwise value of d eta(d/du, d/dv) = (aK + 2bH + c) * 2 f_u ^ f_v at plaquette centres.

    Evaluated from the chart at the centres when available.
    """
    g = L.grid
    if g.chart is not None:
        um = 0.5 * (g.u[1:] + g.u[:-1])
        vm = 0.5 * (g.v[1:] + g.v[:-1])
        U, V = np.meshgrid(um, vm, indexing="ij")
        d = g.chart.evaluate(U, V)
        from .legendre import lift_fields

        _, _, fu, fv, _, _ = lift_fields(d["x"], d["n"], d["xu"], d["xv"], d["nu"], d["nv"], L.frame)
        k1, k2 = d["k1"], d["k2"]
    else:
        def c4(a_):
            return 0.25 * (a_[:-1, :-1] + a_[1:, :-1] + a_[:-1, 1:] + a_[1:, 1:])

        fu, fv, k1, k2 = c4(L.fu), c4(L.fv), c4(L.k1), c4(L.k2)
    lw = a * k1 * k2 + b * (k1 + k2) + c
    return 2.0 * lw[..., None, None] * mk.wedge(fu, fv)


def wedge_f_field(L: LegendreGrid, lam, lam_u=None, lam_v=None):
    """tau = lam f^t and, when the partials of lam are given, its exact differential.

    Returns (tau, dtau) with dtau of shape (2, nu, nv, 6, 6) or None.
    """
    lam = np.broadcast_to(np.asarray(lam, dtype=float), L.shape)
    W = mk.wedge(L.f, L.t)
    tau = lam[..., None, None] * W
    if lam_u is None or lam_v is None:
        return tau, None
    lam_u = np.broadcast_to(np.asarray(lam_u, dtype=float), L.shape)
    lam_v = np.broadcast_to(np.asarray(lam_v, dtype=float), L.shape)
    Wu = mk.wedge(L.fu, L.t) + mk.wedge(L.f, L.tu)
    Wv = mk.wedge(L.fv, L.t) + mk.wedge(L.f, L.tv)
    dtau = np.stack([
        lam_u[..., None, None] * W + lam[..., None, None] * Wu,
        lam_v[..., None, None] * W + lam[..., None, None] * Wv,
    ])
    return tau, dtau


def check_in_wedge_f(L: LegendreGrid, tau, tol=1e-9):
    """Raise TauNotInWedgeF unless tau is vertexwise a multiple of f^t."""
    W = mk.wedge(L.f, L.t)
    ww = np.sum(W * W, axis=(-2, -1))
    lam = np.sum(tau * W, axis=(-2, -1)) / ww
    res = np.linalg.norm(tau - lam[..., None, None] * W, axis=(-2, -1))
    scale = np.maximum(np.linalg.norm(tau, axis=(-2, -1)), 1.0)
    if np.any(res > tol * scale):
        raise TauNotInWedgeF(f"tau leaves the wedge square of f (residual {float(np.max(res)):.3e})")
    return lam


def gauge_shift(eta: GaugeOneForm, tau, L: LegendreGrid | None = None, dtau=None) -> GaugeOneForm:
    """eta - d tau for a vertex field tau in the wedge square of f.

    Edge values subtract the difference of tau along each edge, so discrete
    closedness is unchanged exactly. Vertex values use ``dtau`` when given,
    otherwise second-order differences of tau.
    """
    tau = np.asarray(tau, dtype=float)
    if L is not None:
        check_in_wedge_f(L, tau)
    eu = eta.eu - (tau[1:] - tau[:-1])
    ev = eta.ev - (tau[:, 1:] - tau[:, :-1])
    vertex = None
    if eta.vertex is not None:
        if dtau is None:
            nu, nv = tau.shape[:2]
            du = np.gradient(tau, eta.h_u, axis=0, edge_order=2)
            dv = np.gradient(tau, eta.h_v, axis=1, edge_order=2)
            dtau = np.stack([du, dv])
        vertex = eta.vertex - dtau
    return GaugeOneForm(eu=eu, ev=ev, h_u=eta.h_u, h_v=eta.h_v, vertex=vertex, middle=False, coeffs=eta.coeffs)


def vertex_values(eta: GaugeOneForm):
    """Pointwise eta(d/du), eta(d/dv) at vertices; recovered from edges if not stored."""
    if eta.vertex is not None:
        return eta.vertex
    eu = eta.eu / eta.h_u
    ev = eta.ev / eta.h_v
    vu = np.empty((eu.shape[0] + 1,) + eu.shape[1:])
    vu[1:-1] = 0.5 * (eu[1:] + eu[:-1])
    vu[0], vu[-1] = 1.5 * eu[0] - 0.5 * eu[1], 1.5 * eu[-1] - 0.5 * eu[-2]
    vv = np.empty(ev.shape[:1] + (ev.shape[1] + 1,) + ev.shape[2:])
    vv[:, 1:-1] = 0.5 * (ev[:, 1:] + ev[:, :-1])
    vv[:, 0], vv[:, -1] = 1.5 * ev[:, 0] - 0.5 * ev[:, 1], 1.5 * ev[:, -1] - 0.5 * ev[:, -2]
    return np.stack([vu, vv])


def dual_frame(s1, s2, mask=None):
    """Vectors D1, D2 with (s_j, D_k) = delta_jk, for coordinates on the plane span(s1, s2)."""
    S = np.stack([s1, s2], axis=-1)
    gram = np.swapaxes(S, -1, -2) @ S
    det = np.linalg.det(gram)
    scale = np.sum(s1 * s1, -1) * np.sum(s2 * s2, -1)
    bad = det <= 1e-14 * scale
    if mask is not None:
        bad &= mask
    if np.any(bad):
        raise FrameDegenerate("curvature spheres are (nearly) parallel; no dual frame")
    gram = np.where((det <= 1e-14 * scale)[..., None, None], np.eye(2), gram)
    D = (S * mk.METRIC_DIAG[:, None]) @ np.linalg.inv(gram)
    return D[..., 0], D[..., 1]


def trace_form(L: LegendreGrid, eta_vertex, mask=None, t=None, dsig=None):
    """q(X, Y) = tr(sigma -> eta(X) d_Y sigma) on f, for X, Y in {u, v}.

    ``dsig[k][Y]`` is d_Y sigma_k modulo f; by default t_Y + k_k f_Y.
    """
    mask = L.mask if mask is None else mask
    s1, s2 = L.sigma1, L.sigma2
    D1, D2 = dual_frame(s1, s2, mask)
    if dsig is None:
        dsig = [
            [L.tu + L.k1[..., None] * L.fu, L.tv + L.k1[..., None] * L.fv],
            [L.tu + L.k2[..., None] * L.fu, L.tv + L.k2[..., None] * L.fv],
        ]
    D = (D1, D2)
    q = np.zeros((2, 2) + L.shape)
    for X in range(2):
        for Y in range(2):
            for k in range(2):
                w = mk.apply(eta_vertex[X], dsig[k][Y])
                q[X, Y] += mk.pair(w, D[k])
    q[:, :, ~mask] = np.nan
    return q


def quadratic_differential(L: LegendreGrid, eta: GaugeOneForm) -> QuadDiff:
    """Quadratic differential of the gauge orbit of eta, from vertex values."""
    q = trace_form(L, vertex_values(eta))
    return QuadDiff(quu=q[0, 0], quv=0.5 * (q[0, 1] + q[1, 0]), qvv=q[1, 1], mask=L.mask)


def lw_quadratic_form(L: LegendreGrid, a, b, c) -> QuadDiff:
    """Closed form -c(df, df) + 2b(df, dt) - a(dt, dt)."""

    def comp(fX, tX, fY, tY):
        return -c * mk.pair(fX, fY) + b * (mk.pair(fX, tY) + mk.pair(tX, fY)) - a * mk.pair(tX, tY)

    return QuadDiff(
        quu=comp(L.fu, L.tu, L.fu, L.tu),
        quv=comp(L.fu, L.tu, L.fv, L.tv),
        qvv=comp(L.fv, L.tv, L.fv, L.tv),
        mask=L.mask,
    )


def separability_check(q: QuadDiff, h_u, h_v):
    """Residuals of q = Q1(u) du^2 + Q2(v) dv^2 structure.

    Reports max |d_v q_uu| and |d_u q_vv| scaled by max|q|, the scaled
    off-diagonal part, and the sign of q_uu q_vv (sgn(ac - b^2) for
    linear Weingarten potentials).
    """
    m = q.mask
    scale = max(float(np.nanmax(np.abs(q.quu[m]))), float(np.nanmax(np.abs(q.qvv[m]))), 1e-300)
    dv_quu = np.gradient(q.quu, h_v, axis=1, edge_order=2)
    du_qvv = np.gradient(q.qvv, h_u, axis=0, edge_order=2)
    prod = q.quu * q.qvv
    pscale = scale * scale
    signs = np.where(np.abs(prod) <= 1e-10 * pscale, 0, np.sign(prod))
    uniq = np.unique(signs[m])
    return {
        "dv_quu": float(np.nanmax(np.abs(dv_quu[m]))) / scale,
        "du_qvv": float(np.nanmax(np.abs(du_qvv[m]))) / scale,
        "off_diagonal": float(np.nanmax(np.abs(q.quv[m]))) / scale,
        "sign": int(uniq[0]) if len(uniq) == 1 else None,
        "rank_one": bool(
            np.nanmax(np.abs(q.quu[m])) <= 1e-8 * scale or np.nanmax(np.abs(q.qvv[m])) <= 1e-8 * scale
        ),
        "scale": scale,
    }


def lw_discriminant_sign(a, b, c):
    """sgn(b^2 - ac): +1 indefinite q, -1 definite, 0 tubular."""
    d = b * b - a * c
    return int(np.sign(d)) if abs(d) > 1e-14 * max(a * a + b * b + c * c, 1e-300) else 0


@dataclass
class Associates:
    xD: np.ndarray
    xhat: np.ndarray
    rhoD: np.ndarray
    rhohat: np.ndarray
    kD: np.ndarray
    khat: np.ndarray
    residual: np.ndarray
    degenerate: np.ndarray


def combescure_associates(grid: SampledGrid, a, b, c) -> Associates:
    """The associate pair x^D = c x - b n, xhat = a n - b x and their curvature relation.

    Curvatures follow k^D = k / (c + b k) and khat = -k / (a k + b). The
    relation 1/(k1 k2^D) + 1/(k2 k1^D) - 1/khat1 - 1/khat2 only involves the
    radii 1/k^D = (c + b k)/k and 1/khat = -(a k + b)/k, so it is evaluated
    in radius form and stays finite where an associate curvature blows up
    (tubular surfaces); those vertices are flagged in ``degenerate``.
    Raises AssociateSingular where a principal curvature of x vanishes.
    """
    k1, k2 = grid.k1, grid.k2
    kmax = max(float(np.max(np.abs(k1))), float(np.max(np.abs(k2))), 1e-300)
    if np.any(np.abs(k1) <= 1e-12 * kmax) or np.any(np.abs(k2) <= 1e-12 * kmax):
        raise AssociateSingular("a principal curvature vanishes; the associate radii are undefined")
    x, n = grid.x, grid.n
    xD = c * x - b * n
    xhat = a * n - b * x
    rhoD = np.stack([(c + b * k1) / k1, (c + b * k2) / k2])
    rhohat = np.stack([-(a * k1 + b) / k1, -(a * k2 + b) / k2])
    coef = abs(a) + abs(b) + abs(c)
    tiny = 1e-12 * coef * (1.0 + kmax)
    with np.errstate(divide="ignore"):
        kD = np.where(np.abs(rhoD) > tiny / kmax, 1.0 / rhoD, np.inf)
        khat = np.where(np.abs(rhohat) > tiny / kmax, 1.0 / rhohat, np.inf)
    degenerate = np.any(np.isinf(kD) | np.isinf(khat), axis=0)
    # 1/(k1 k2^D) = rhoD2 / k1
    residual = rhoD[1] / k1 + rhoD[0] / k2 - rhohat[0] - rhohat[1]
    return Associates(xD=xD, xhat=xhat, rhoD=rhoD, rhohat=rhohat, kD=kD, khat=khat,
                      residual=residual, degenerate=degenerate)


def fit_lw_triple(k1, k2, mask=None, tol=1e-8):
    """Least-squares (a, b, c) with a K + 2b H + c = 0 on sampled curvatures.

    The triple is the right singular vector of the rows [K, 2H, 1] for the
    smallest singular value, scaled to max-norm 1 with a positive leading
    nonzero entry. Raises
    GeometryError when no triple fits within ``tol`` and BadParams when
    the fit is not unique (e.g. K and H both constant).
    """
    if mask is None:
        mask = np.ones(np.shape(k1), dtype=bool)
    K = (k1 * k2)[mask]
    H2 = (k1 + k2)[mask]
    M = np.stack([K, H2, np.ones_like(K)], axis=1)
    col = np.linalg.norm(M, axis=0)
    # a column at rounding level (e.g. H on a minimal surface) is exactly zero
    dead = col <= 1e-12 * np.max(col)
    M[:, dead] = 0.0
    col[dead] = 1.0
    _, s, Vt = np.linalg.svd(M / col, full_matrices=False)
    if s[1] <= tol * s[0]:
        raise BadParams("the linear Weingarten triple is not unique on this surface; pass it explicitly")
    if s[2] > tol * s[0]:
        raise GeometryError(f"no linear Weingarten triple fits (relative singular value {s[2] / s[0]:.2e})")
    abc = Vt[2] / col
    abc = abc / np.max(np.abs(abc))
    abc[np.abs(abc) < 1e-12] = 0.0
    if abc[np.flatnonzero(abc)[0]] < 0:
        abc = -abc
    return tuple(float(v) + 0.0 for v in abc)
