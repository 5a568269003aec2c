"""Linear algebra of R^{4,2}.

Vectors are arrays whose last axis has length 6, written in a fixed
orthonormal frame e1..e6 with metric G = diag(+1, +1, +1, +1, -1, -1).
Skew operators (elements of o(4,2)) are 6x6 matrices M with
M^T G + G M = 0; symmetric tensors are 6x6 symmetric matrices B acting as
the bilinear form (v, w) -> v^T B w.

Every function broadcasts over leading axes, so a whole grid of vectors
(shape ``(nu, nv, 6)``) or operators (``(nu, nv, 6, 6)``) can be passed.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DegeneratePair, NoNullVectors

METRIC_DIAG = np.array([1.0, 1.0, 1.0, 1.0, -1.0, -1.0])
G = np.diag(METRIC_DIAG)
BASIS = np.eye(6)

# structural tolerances
SKEW_TOL = 1e-12
ORTHO_TOL = 1e-10
NILPOTENT_TOL = 1e-14


@dataclass(frozen=True)
class Frame:
    """The fixed frame and the symmetry-breaking vectors derived from it.

    ``q0`` and ``qinf`` are null with ``(q0, qinf) = -1`` and span the
    (e4, e5) plane; ``p = e6`` is the unit timelike point sphere complex.
    The Euclidean subspace is span(e1, e2, e3).
    """

    basis: np.ndarray = field(default_factory=lambda: BASIS.copy())

    @property
    def q0(self) -> np.ndarray:
        return (self.basis[3] + self.basis[4]) / 2.0

    @property
    def qinf(self) -> np.ndarray:
        return self.basis[4] - self.basis[3]

    @property
    def p(self) -> np.ndarray:
        return self.basis[5]

    def embed(self, x):
        """Put R^3 vectors (last axis 3) into span(e1, e2, e3)."""
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape[:-1] + (6,))
        out[..., :3] = x
        return out

    def euclidean_part(self, v):
        """Coordinates along e1, e2, e3."""
        return np.asarray(v)[..., :3]


FRAME = Frame()
Q0 = FRAME.q0
QINF = FRAME.qinf
P = FRAME.p


def pair(v, w):
    """The (4,2) inner product, broadcasting over leading axes."""
    v = np.asarray(v, dtype=float)
    w = np.asarray(w, dtype=float)
    return np.sum(v * METRIC_DIAG * w, axis=-1)


def lower(v):
    """G v (index lowering)."""
    return np.asarray(v, dtype=float) * METRIC_DIAG


def wedge(a, b):
    """The skew operator a^b acting by c -> (a, c) b - (b, c) a."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return b[..., :, None] * lower(a)[..., None, :] - a[..., :, None] * lower(b)[..., None, :]


def sym(a, b):
    """Bilinear form matrix of the symmetric product a.b.

    ``v^T sym(a, b) w = ((a, v)(b, w) + (a, w)(b, v)) / 2``.
    """
    la = lower(a)
    lb = lower(b)
    return 0.5 * (la[..., :, None] * lb[..., None, :] + lb[..., :, None] * la[..., None, :])


def form(B, v, w):
    """Evaluate the bilinear form B on (v, w)."""
    return np.einsum("...i,...ij,...j->...", v, B, w)


def sym_apply(B, v):
    """The endomorphism of a symmetric tensor: v -> G B v, so (a.b)(v) = ((a,v)b + (b,v)a)/2."""
    return np.einsum("ij,...jk,...k->...i", G, B, v)


def apply(M, v):
    return np.einsum("...ij,...j->...i", M, v)


def adjoint(M):
    """Metric adjoint G M^T G; the inverse of an O(4,2) element."""
    return G @ np.swapaxes(M, -1, -2) @ G


def skewness_defect(M):
    """Frobenius norm of M^T G + G M."""
    D = np.swapaxes(M, -1, -2) @ G + G @ M
    return np.linalg.norm(D, axis=(-2, -1))


def orthogonality_defect(T):
    """Frobenius norm of T^T G T - G."""
    D = np.swapaxes(T, -1, -2) @ G @ T - G
    return np.linalg.norm(D, axis=(-2, -1))


def is_null(v, tol=1e-10):
    v = np.asarray(v, dtype=float)
    scale = np.sum(v * v, axis=-1)
    return np.abs(pair(v, v)) <= tol * np.maximum(scale, 1e-300)


def gamma_transform(L, Lhat, t):
    """Orthogonal map scaling ``Lhat`` by ``t``, ``L`` by ``1/t`` and fixing the rest.

    ``L`` and ``Lhat`` are null vectors (any representatives of their
    lines) with ``(L, Lhat) != 0``; ``t`` is nonzero. Broadcasts over
    leading axes of ``L``/``Lhat``.
    """
    L = np.asarray(L, dtype=float)
    Lhat = np.asarray(Lhat, dtype=float)
    if t == 0:
        raise ValueError("gamma_transform needs t != 0")
    c = pair(L, Lhat)
    scale = np.linalg.norm(L, axis=-1) * np.linalg.norm(Lhat, axis=-1)
    if np.any(np.abs(c) <= 1e-14 * scale):
        raise DegeneratePair("(L, Lhat) vanishes; the lines are orthogonal")
    c = np.asarray(c)[..., None, None]
    # [u]_L = (u, Lhat)/(L, Lhat) L,  [u]_Lhat = (u, L)/(L, Lhat) Lhat
    proj_L = L[..., :, None] * lower(Lhat)[..., None, :] / c
    proj_Lhat = Lhat[..., :, None] * lower(L)[..., None, :] / c
    eye = np.broadcast_to(np.eye(6), proj_L.shape)
    return eye + (1.0 / t - 1.0) * proj_L + (t - 1.0) * proj_Lhat


_TAYLOR_DEGREE = 12


def _expm_taylor_squaring(A):
    """Scaling and squaring with a degree-12 Taylor polynomial (single batch level s)."""
    norm1 = np.abs(A).sum(axis=-2).max(axis=-1)
    s = np.maximum(0, np.ceil(np.log2(np.maximum(norm1, 1e-300) / 0.25))).astype(int)
    out = np.empty_like(A)
    for level in np.unique(s):
        idx = s == level
        B = A[idx] / (2.0 ** level)
        term = np.broadcast_to(np.eye(6), B.shape).copy()
        acc = term.copy()
        for k in range(1, _TAYLOR_DEGREE + 1):
            term = term @ B / k
            acc = acc + term
        for _ in range(level):
            acc = acc @ acc
        out[idx] = acc
    return out


def exp_skew(tau, scale=1.0):
    """exp(scale * tau) for skew operators, batched over leading axes.

    Uses the exact form I + A whenever A^2 vanishes (below 1e-14 relative),
    which is the case for operators in the wedge square of an isotropic
    plane. Otherwise scaling and squaring with a Taylor polynomial.
    """
    tau = np.asarray(tau, dtype=float)
    A = scale * tau
    flat = A.reshape((-1, 6, 6))
    out = np.empty_like(flat)
    A2 = flat @ flat
    nA = np.linalg.norm(flat, axis=(-2, -1))
    nilpotent = np.linalg.norm(A2, axis=(-2, -1)) <= NILPOTENT_TOL * np.maximum(nA * nA, 1.0)
    out[nilpotent] = np.eye(6) + flat[nilpotent]
    if np.any(~nilpotent):
        out[~nilpotent] = _expm_taylor_squaring(flat[~nilpotent])
    return out.reshape(A.shape)


def reorthogonalize(T, threshold=1e-10):
    """Project near-O(4,2) matrices back onto the group (generalized polar factor).

    With A = adj(T) T (metric self-adjoint, close to I) the corrected matrix
    is T A^{-1/2}; the inverse square root is taken from its series, which is
    exact to rounding for defects near the threshold.
    """
    T = np.array(T, dtype=float, copy=True)
    defect = orthogonality_defect(T)
    bad = defect > threshold
    if not np.any(bad):
        return T
    Tb = T[bad]
    A = adjoint(Tb) @ Tb
    E = A - np.eye(6)
    E2 = E @ E
    inv_sqrt = np.eye(6) - 0.5 * E + 0.375 * E2 - 0.3125 * E2 @ E
    T[bad] = Tb @ inv_sqrt
    return T


def _sphere_point(dim, angles):
    """Unit vector in R^dim from (dim-1) spherical angles; dim=1 uses the sign of cos."""
    if dim == 1:
        a = angles[0] if len(angles) else 0.0
        return np.array([1.0 if math.cos(a) >= 0 else -1.0])
    angles = list(angles) + [0.0] * (dim - 1 - len(angles))
    out = np.ones(dim)
    for k in range(dim - 1):
        out[k] *= math.cos(angles[k])
        out[k + 1:] *= math.sin(angles[k])
    return out


def _orient(v):
    """Fix the sign of an eigenvector so its largest entry is positive."""
    k = np.argmax(np.abs(v))
    return v if v[k] >= 0 else -v


def null_directions_in(basis, angles=(0.0, 0.0)):
    """A null vector in the span of ``basis``, parametrized by angles.

    The induced metric on the span is diagonalized into ``k`` spacelike and
    ``l`` timelike unit directions; the null vector is
    ``w_time + w_space`` with each part a unit vector on its sphere, the
    angles taken first for the spacelike sphere (``k - 1`` of them) and then
    for the timelike one. Returned with unit Euclidean norm.

    Raises NoNullVectors if the induced metric is definite.
    """
    B = np.atleast_2d(np.asarray(basis, dtype=float))
    gram = B @ G @ B.T
    w, V = np.linalg.eigh(gram)
    scale = max(np.max(np.abs(w)), 1e-300)
    pos = [i for i in range(len(w)) if w[i] > 1e-12 * scale]
    neg = [i for i in range(len(w)) if w[i] < -1e-12 * scale]
    if not pos or not neg:
        raise NoNullVectors("induced metric on the subspace is semi-definite")
    # order spacelike by decreasing, timelike by increasing eigenvalue for determinism
    pos.sort(key=lambda i: -w[i])
    neg.sort(key=lambda i: w[i])
    space = [_orient(V[:, i]) @ B / math.sqrt(w[i]) for i in pos]
    time = [_orient(V[:, i]) @ B / math.sqrt(-w[i]) for i in neg]
    angles = list(angles)
    ks = len(space)
    a_space = angles[: max(ks - 1, 1)] if ks > 1 else angles[:1]
    a_time = angles[max(ks - 1, 1):]
    ws = _sphere_point(ks, a_space) @ np.array(space)
    wt = _sphere_point(len(time), a_time) @ np.array(time) if len(time) > 1 else time[0]
    n = ws + wt
    return n / np.linalg.norm(n)


def orthogonal_complement(vectors):
    """Basis (rows) of the G-orthogonal complement of the span of ``vectors``."""
    A = np.atleast_2d(np.asarray(vectors, dtype=float)) * METRIC_DIAG
    _, s, Vt = np.linalg.svd(A)
    rank = int(np.sum(s > 1e-12 * max(s[0], 1e-300)))
    return Vt[rank:]
