"""Analytic test surfaces in curvature-line coordinates.

Each chart supplies position, unit normal, principal curvatures and the
first partials of position and normal in closed form. The normal is
``x_u x x_v / |x_u x x_v|`` and the curvatures follow ``n_u = -k1 x_u``,
``n_v = -k2 x_v``. With these orientations the linear Weingarten triples
``(a, b, c)`` (``aK + 2bH + c = 0``) of the fixtures are

==============  ==========================  ===========================
surface         parameters                  (a, b, c)
==============  ==========================  ===========================
catenoid        --                          (0, 1, 0)
torus           R, r  (r < R)               (r^2, -r, 1)   tubular
cylinder        r                           (r^2, -r, 1)   tubular
pseudosphere    --                          (1, 0, 1)      K = -1
unduloid        H0, neck                    (0, 1, -2 H0)  CMC
sphere          r                           totally umbilic
==============  ==========================  ===========================
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import integrate

from .errors import BadParams, UmbilicEverywhere, UnknownSurface

UMBILIC_REL = 1e-6


@dataclass
class SurfaceChart:
    """A closed-form surface patch.

    ``evaluator(u, v)`` returns a dict with keys ``x, n, xu, xv, nu, nv``
    (arrays ending in 3) and ``k1, k2``.
    """

    name: str
    domain: tuple
    evaluator: Callable
    params: dict = field(default_factory=dict)
    lw: tuple | None = None

    def evaluate(self, u, v):
        u, v = np.broadcast_arrays(np.asarray(u, dtype=float), np.asarray(v, dtype=float))
        return self.evaluator(u, v)


@dataclass
class SampledGrid:
    """Surface data on a tensor grid; arrays are indexed ``[i, j]`` for ``(u_i, v_j)``."""

    u: np.ndarray
    v: np.ndarray
    x: np.ndarray
    n: np.ndarray
    k1: np.ndarray
    k2: np.ndarray
    xu: np.ndarray | None = None
    xv: np.ndarray | None = None
    nu_: np.ndarray | None = None
    nv_: np.ndarray | None = None
    provenance: str = "analytic"
    chart: SurfaceChart | None = None
    umbilic: np.ndarray | None = None
    checks: dict | None = None

    @property
    def shape(self):
        return self.x.shape[:2]

    @property
    def h_u(self):
        return (self.u[-1] - self.u[0]) / (len(self.u) - 1)

    @property
    def h_v(self):
        return (self.v[-1] - self.v[0]) / (len(self.v) - 1)

    @property
    def has_partials(self):
        return all(a is not None for a in (self.xu, self.xv, self.nu_, self.nv_))


def umbilic_mask(k1, k2):
    """True where the two principal curvatures agree up to 1e-6 * max|k|."""
    kmax = max(float(np.max(np.abs(k1))), float(np.max(np.abs(k2))), 1e-300)
    return np.abs(k1 - k2) <= UMBILIC_REL * kmax


def _revolution(r, z, dr, dz, ddr, ddz):
    """Evaluator for x = (r cos v, r sin v, z) with a profile given in u."""

    def ev(u, v):
        R, Z = r(u), z(u)
        R1, Z1, R2, Z2 = dr(u), dz(u), ddr(u), ddz(u)
        ell = np.sqrt(R1 * R1 + Z1 * Z1)
        cv, sv = np.cos(v), np.sin(v)
        x = np.stack([R * cv, R * sv, Z], axis=-1)
        xu = np.stack([R1 * cv, R1 * sv, Z1], axis=-1)
        xv = np.stack([-R * sv, R * cv, np.zeros_like(R)], axis=-1)
        n = np.stack([-Z1 * cv, -Z1 * sv, R1], axis=-1) / ell[..., None]
        k1 = (R1 * Z2 - Z1 * R2) / ell**3
        k2 = Z1 / (R * ell)
        nu = -k1[..., None] * xu
        nv = -k2[..., None] * xv
        return dict(x=x, n=n, xu=xu, xv=xv, nu=nu, nv=nv, k1=k1, k2=k2)

    return ev


def _catenoid(p):
    ev = _revolution(np.cosh, lambda u: u, np.sinh, np.ones_like, np.cosh, np.zeros_like)
    # a patch small enough that typical Darboux seeds stay regular on it
    return ev, (-0.5, 0.5, -0.5, 0.5), (0.0, 1.0, 0.0)


def _torus(p):
    R = float(p.get("R", 2.0))
    r = float(p.get("r", 1.0))
    if not (0 < r < R):
        raise BadParams(f"torus needs 0 < r < R, got R={R}, r={r}")
    ev = _revolution(
        lambda u: R + r * np.cos(u),
        lambda u: r * np.sin(u),
        lambda u: -r * np.sin(u),
        lambda u: r * np.cos(u),
        lambda u: -r * np.cos(u),
        lambda u: -r * np.sin(u),
    )
    return ev, (-1.2, 1.2, -1.0, 1.0), (r * r, -r, 1.0)


def _sphere(p):
    r = float(p.get("r", 1.0))
    if r <= 0:
        raise BadParams("sphere needs r > 0")
    ev = _revolution(
        lambda u: r * np.cos(u),
        lambda u: r * np.sin(u),
        lambda u: -r * np.sin(u),
        lambda u: r * np.cos(u),
        lambda u: -r * np.cos(u),
        lambda u: -r * np.sin(u),
    )
    return ev, (-1.0, 1.0, -1.0, 1.0), None


def _pseudosphere(p):
    sech = lambda u: 1.0 / np.cosh(u)  # noqa: E731
    ev = _revolution(
        sech,
        lambda u: u - np.tanh(u),
        lambda u: -sech(u) * np.tanh(u),
        lambda u: np.tanh(u) ** 2,
        lambda u: sech(u) * np.tanh(u) ** 2 - sech(u) ** 3,
        lambda u: 2.0 * np.tanh(u) * sech(u) ** 2,
    )
    return ev, (0.6, 1.6, -1.0, 1.0), (1.0, 0.0, 1.0)


def _cylinder(p):
    r = float(p.get("r", 1.0))
    if r <= 0:
        raise BadParams("cylinder needs r > 0")

    def ev(u, v):
        su, cu = np.sin(u), np.cos(u)
        zero = np.zeros_like(u)
        one = np.ones_like(u)
        x = np.stack([r * su, r * cu, v], axis=-1)
        xu = np.stack([r * cu, -r * su, zero], axis=-1)
        xv = np.stack([zero, zero, one], axis=-1)
        n = np.stack([-su, -cu, zero], axis=-1)
        k1 = np.full_like(u, 1.0 / r)
        k2 = np.zeros_like(u)
        return dict(x=x, n=n, xu=xu, xv=xv, nu=-xu / r, nv=np.zeros_like(xv), k1=k1, k2=k2)

    return ev, (-1.0, 1.0, -1.0, 1.0), (r * r, -r, 1.0)


def unduloid_profile(H0, neck):
    """Arclength profile of the Delaunay unduloid with mean curvature H0 and neck radius.

    r(s) = sqrt(1 + B^2 + 2B sin(2 H0 s)) / (2 H0) with B = 1 - 2 H0 neck;
    the height z(s) is the incomplete elliptic-type integral of
    (1 + B sin) / sqrt(1 + B^2 + 2B sin), evaluated by adaptive quadrature.
    """
    B = 1.0 - 2.0 * H0 * neck
    if not (H0 > 0 and 0 < B < 1):
        raise BadParams(f"unduloid needs H0 > 0 and 0 < neck < 1/(2 H0), got H0={H0}, neck={neck}")
    w = 2.0 * H0

    def D(s):
        return 1.0 + B * B + 2.0 * B * np.sin(w * s)

    def r(s):
        return np.sqrt(D(s)) / w

    def dz_scalar(s):
        return (1.0 + B * math.sin(w * s)) / math.sqrt(1.0 + B * B + 2.0 * B * math.sin(w * s))

    cache = {}

    def z(s):
        s = np.asarray(s, dtype=float)
        flat = s.ravel()
        out = np.empty_like(flat)
        for k, sk in enumerate(flat):
            key = float(sk)
            if key not in cache:
                cache[key] = integrate.quad(dz_scalar, 0.0, key, epsabs=1e-14, epsrel=1e-13, limit=200)[0]
            out[k] = cache[key]
        return out.reshape(s.shape)

    def dr(s):
        return B * np.cos(w * s) / np.sqrt(D(s))

    def dz(s):
        return (1.0 + B * np.sin(w * s)) / np.sqrt(D(s))

    def ddr(s):
        S, C, d = np.sin(w * s), np.cos(w * s), D(s)
        return -w * B * S / np.sqrt(d) - w * B * B * C * C / d**1.5

    def ddz(s):
        S, C, d = np.sin(w * s), np.cos(w * s), D(s)
        return w * B * B * C * (B + S) / d**1.5

    return r, z, dr, dz, ddr, ddz


def _unduloid(p):
    H0 = float(p.get("H0", 0.5))
    neck = float(p.get("neck", 0.5))
    prof = unduloid_profile(H0, neck)
    period = math.pi / H0
    return _revolution(*prof), (0.0, period, -1.0, 1.0), (0.0, 1.0, -2.0 * H0)


_CATALOG = {
    "catenoid": _catenoid,
    "torus": _torus,
    "cylinder": _cylinder,
    "pseudosphere": _pseudosphere,
    "unduloid": _unduloid,
    "sphere": _sphere,
}

NAMES = tuple(_CATALOG)


def catalog(name, params=None):
    """Build a named chart.

    ``params`` may include surface parameters (``R, r, H0, neck``) and a
    domain override ``u0, u1, v0, v1``.
    """
    params = dict(params or {})
    try:
        build = _CATALOG[name]
    except KeyError:
        raise UnknownSurface(f"unknown surface {name!r}; choose from {', '.join(NAMES)}") from None
    ev, dom, lw = build(params)
    dom = tuple(float(params.get(k, d)) for k, d in zip(("u0", "u1", "v0", "v1"), dom))
    if not (dom[0] < dom[1] and dom[2] < dom[3]):
        raise BadParams(f"empty domain {dom}")
    return SurfaceChart(name=name, domain=dom, evaluator=ev, params=params, lw=lw)


def sample(chart: SurfaceChart, nu: int, nv: int) -> SampledGrid:
    """Fill an ``nu x nv`` grid (endpoints included) from the analytic evaluators."""
    if nu < 8 or nv < 8:
        raise BadParams("grids must be at least 8 x 8")
    u0, u1, v0, v1 = chart.domain
    u = np.linspace(u0, u1, nu)
    v = np.linspace(v0, v1, nv)
    U, V = np.meshgrid(u, v, indexing="ij")
    d = chart.evaluate(U, V)
    umb = umbilic_mask(d["k1"], d["k2"])
    if np.all(umb):
        raise UmbilicEverywhere(f"{chart.name}: every vertex is umbilic")
    return SampledGrid(
        u=u, v=v, x=d["x"], n=d["n"], k1=d["k1"], k2=d["k2"],
        xu=d["xu"], xv=d["xv"], nu_=d["nu"], nv_=d["nv"],
        provenance="analytic", chart=chart, umbilic=umb,
    )


def check_chart(grid: SampledGrid):
    """Per-vertex residuals of the chart invariants (unit normal, tangency, Rodrigues)."""
    res = {"unit_normal": np.abs(np.linalg.norm(grid.n, axis=-1) - 1.0)}
    if grid.has_partials:
        res["tangency"] = np.maximum(
            np.abs(np.sum(grid.n * grid.xu, -1)), np.abs(np.sum(grid.n * grid.xv, -1))
        )
        res["rodrigues"] = np.maximum(
            np.linalg.norm(grid.nu_ + grid.k1[..., None] * grid.xu, axis=-1),
            np.linalg.norm(grid.nv_ + grid.k2[..., None] * grid.xv, axis=-1),
        )
    return res


def ingest(path) -> SampledGrid:
    """Load a grid from the JSON grid schema and run the chart invariant checks."""
    from .io import load_grid

    return load_grid(path)
