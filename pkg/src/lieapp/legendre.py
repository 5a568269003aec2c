"""Legendre lifts of sampled surfaces into the lightcone of R^{4,2}.

A point x with unit normal n lifts to the isotropic plane spanned by

    f = x + q0 + |x|^2/2 qinf        (point sphere)
    t = n + (n . x) qinf + p          (tangent plane)

and the curvature spheres are sigma_i = t + k_i f.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import minkowski as mk
from .catalog import SampledGrid
from .errors import GeometryError, ProjectionSingular

ISOTROPY_TOL = 1e-10
CONTACT_TOL = 1e-9


def _dot(a, b):
    return np.sum(a * b, axis=-1)


def lift_point(x, frame=mk.FRAME):
    """Point sphere of x: x + q0 + |x|^2/2 qinf."""
    x = np.asarray(x, dtype=float)
    return frame.embed(x) + frame.q0 + 0.5 * _dot(x, x)[..., None] * frame.qinf


def lift_fields(x, n, xu, xv, nu, nv, frame=mk.FRAME):
    """Lift position/normal data and their partials. Returns f, t, fu, fv, tu, tv."""
    qinf = frame.qinf
    f = lift_point(x, frame)
    t = frame.embed(n) + _dot(n, x)[..., None] * qinf + frame.p
    fu = frame.embed(xu) + _dot(xu, x)[..., None] * qinf
    fv = frame.embed(xv) + _dot(xv, x)[..., None] * qinf
    # d(n.x) = dn.x + n.dx
    tu = frame.embed(nu) + (_dot(nu, x) + _dot(n, xu))[..., None] * qinf
    tv = frame.embed(nv) + (_dot(nv, x) + _dot(n, xv))[..., None] * qinf
    return f, t, fu, fv, tu, tv


def grid_partials(grid: SampledGrid):
    """Analytic partials if present, otherwise second-order finite differences."""
    if grid.has_partials:
        return grid.xu, grid.xv, grid.nu_, grid.nv_
    xu, xv = np.gradient(grid.x, grid.u, grid.v, axis=(0, 1), edge_order=2)
    nu, nv = np.gradient(grid.n, grid.u, grid.v, axis=(0, 1), edge_order=2)
    return xu, xv, nu, nv


@dataclass
class LegendreGrid:
    """Lifted surface on a curvature-line grid. Vector fields have shape (nu, nv, 6)."""

    f: np.ndarray
    t: np.ndarray
    fu: np.ndarray
    fv: np.ndarray
    tu: np.ndarray
    tv: np.ndarray
    k1: np.ndarray
    k2: np.ndarray
    grid: SampledGrid
    frame: mk.Frame = mk.FRAME

    @property
    def sigma1(self):
        return self.t + self.k1[..., None] * self.f

    @property
    def sigma2(self):
        return self.t + self.k2[..., None] * self.f

    @property
    def shape(self):
        return self.f.shape[:2]

    @property
    def mask(self):
        """True at vertices used in residual statistics (umbilic-free)."""
        if self.grid.umbilic is None:
            return np.ones(self.shape, dtype=bool)
        return ~self.grid.umbilic

    def midpoints(self, direction):
        """Lifted data at the midpoints of u-edges (direction 0) or v-edges (direction 1).

        Charts are evaluated exactly; file grids fall back to averaging the
        two endpoint values, which keeps second-order accuracy.
        """
        g = self.grid
        if g.chart is not None:
            if direction == 0:
                um = 0.5 * (g.u[1:] + g.u[:-1])
                U, V = np.meshgrid(um, g.v, indexing="ij")
            else:
                vm = 0.5 * (g.v[1:] + g.v[:-1])
                U, V = np.meshgrid(g.u, vm, indexing="ij")
            d = g.chart.evaluate(U, V)
            f, t, fu, fv, tu, tv = lift_fields(d["x"], d["n"], d["xu"], d["xv"], d["nu"], d["nv"], self.frame)
            return dict(f=f, t=t, fu=fu, fv=fv, tu=tu, tv=tv, k1=d["k1"], k2=d["k2"])
        out = {}
        for key in ("f", "t", "fu", "fv", "tu", "tv", "k1", "k2"):
            a = getattr(self, key)
            out[key] = 0.5 * (a[1:] + a[:-1]) if direction == 0 else 0.5 * (a[:, 1:] + a[:, :-1])
        return out


def lift_euclidean(grid: SampledGrid, frame: mk.Frame = mk.FRAME, check=True) -> LegendreGrid:
    """Lift a sampled surface with the Euclidean symmetry breaking (qinf, p).

    With ``check`` the isotropy and normalization conditions are verified,
    and the contact condition too when the grid carries analytic partials.
    Differenced partials only satisfy contact to O(h^2), so for them the
    residual is left to ``check_legendre``.
    """
    xu, xv, nu, nv = grid_partials(grid)
    f, t, fu, fv, tu, tv = lift_fields(grid.x, grid.n, xu, xv, nu, nv, frame)
    L = LegendreGrid(f=f, t=t, fu=fu, fv=fv, tu=tu, tv=tv, k1=grid.k1, k2=grid.k2, grid=grid, frame=frame)
    if check:
        rep = check_legendre(L)
        scale = max(1.0, float(np.max(np.abs(f))))
        if rep["isotropy"] > ISOTROPY_TOL * scale**2 or rep["normalization"] > ISOTROPY_TOL * scale:
            raise GeometryError(f"lift is not isotropic (residual {rep['isotropy']:.3e})")
        if grid.has_partials and rep["contact"] > CONTACT_TOL * scale:
            raise GeometryError(f"contact condition violated (residual {rep['contact']:.3e})")
    return L


def space_form_projection(v1, v2, q, p):
    """Normalized lifts of the isotropic plane span(v1, v2) for the pair (q, p).

    With tau = v1 ^ v2 returns f' = -tau p / (tau p, q) and
    t' = -tau q / (tau q, p), so (f', q) = -1, (f', p) = 0, (t', p) = -1,
    (t', q) = 0. Broadcasts over leading axes.
    """
    v1 = np.asarray(v1, dtype=float)
    v2 = np.asarray(v2, dtype=float)
    q = np.broadcast_to(q, v1.shape)
    p = np.broadcast_to(p, v1.shape)
    # tau w = (v1, w) v2 - (v2, w) v1
    tp = mk.pair(v1, p)[..., None] * v2 - mk.pair(v2, p)[..., None] * v1
    tq = mk.pair(v1, q)[..., None] * v2 - mk.pair(v2, q)[..., None] * v1
    den_f = mk.pair(tp, q)
    den_t = mk.pair(tq, p)
    scale = np.linalg.norm(v1, axis=-1) * np.linalg.norm(v2, axis=-1) * np.linalg.norm(q, axis=-1) * np.linalg.norm(p, axis=-1)
    if np.any(np.abs(den_f) <= 1e-12 * scale):
        raise ProjectionSingular("(tau p, q) vanishes: the plane has no point sphere in this space form")
    return -tp / den_f[..., None], -tq / den_t[..., None]


def euclidean_point(fprime, tprime, frame=mk.FRAME):
    """Euclidean position and unit normal from normalized lifts (qinf, p)."""
    return frame.euclidean_part(fprime), frame.euclidean_part(tprime)


def recover_curvature(f_dir, t_dir):
    """Multiplier mu with t_dir + mu f_dir = 0 in the least-squares (Lie pairing) sense."""
    return -mk.pair(t_dir, f_dir) / mk.pair(f_dir, f_dir)


def check_legendre(L: LegendreGrid):
    """Residuals of the Legendre map conditions (max over umbilic-free vertices)."""
    m = L.mask
    fr = L.frame
    iso = np.maximum.reduce([np.abs(mk.pair(L.f, L.f)), np.abs(mk.pair(L.t, L.t)), np.abs(mk.pair(L.f, L.t))])
    norm = np.maximum.reduce([
        np.abs(mk.pair(L.f, fr.qinf) + 1), np.abs(mk.pair(L.f, fr.p)),
        np.abs(mk.pair(L.t, fr.p) + 1), np.abs(mk.pair(L.t, fr.qinf)),
    ])
    contact = np.maximum.reduce([
        np.abs(mk.pair(L.fu, L.t)), np.abs(mk.pair(L.fv, L.t)),
        np.abs(mk.pair(L.tu, L.f)), np.abs(mk.pair(L.tv, L.f)),
    ])
    # d_u sigma1 = d_u k1 f + (t_u + k1 f_u); the bracket must vanish
    curv = np.maximum(
        np.linalg.norm(L.tu + L.k1[..., None] * L.fu, axis=-1),
        np.linalg.norm(L.tv + L.k2[..., None] * L.fv, axis=-1),
    )
    null_spheres = np.maximum(np.abs(mk.pair(L.sigma1, L.sigma1)), np.abs(mk.pair(L.sigma2, L.sigma2)))
    # immersion proxy: second singular value of [f_u f_v t_u t_v]
    J = np.stack([L.fu, L.fv, L.tu, L.tv], axis=-1)
    sv = np.linalg.svd(J, compute_uv=False)
    mu1 = recover_curvature(L.fu, L.tu)
    mu2 = recover_curvature(L.fv, L.tv)
    kscale = np.maximum(np.abs(L.k1), np.abs(L.k2)) + 1.0
    krec = np.maximum(np.abs(mu1 - L.k1), np.abs(mu2 - L.k2)) / kscale

    def mx(a):
        return float(np.max(a[m])) if np.any(m) else 0.0

    return {
        "isotropy": mx(iso),
        "normalization": mx(norm),
        "contact": mx(contact),
        "curvature_sphere": mx(curv),
        "null_curvature_spheres": mx(null_spheres),
        "immersion_min_sv": float(np.min(sv[..., 1][m])) if np.any(m) else 0.0,
        "curvature_recovery": mx(krec),
        "umbilic_fraction": float(1.0 - np.mean(m)),
    }
