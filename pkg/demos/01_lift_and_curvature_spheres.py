"""Lift a catenoid into the lightcone and look at its curvature spheres.

Each vertex becomes an isotropic 2-plane spanned by the point sphere f and the
tangent plane t. The curvature spheres t + k_i f are null, and they are the
only null lines of the plane that differentiate back into it along a
curvature direction.
"""
import numpy as np

from lieapp import catalog as cat
from lieapp import legendre as lg
from lieapp import minkowski as mk

chart = cat.catalog("catenoid")
grid = cat.sample(chart, 48, 48)
L = lg.lift_euclidean(grid)

print("frame q0, qinf, p:")
print("  (q0, qinf) =", mk.pair(mk.Q0, mk.QINF), " (p, p) =", mk.pair(mk.P, mk.P))

rep = lg.check_legendre(L)
for key in ("isotropy", "normalization", "contact", "curvature_sphere", "null_curvature_spheres"):
    print(f"  {key:<24} {rep[key]:.2e}")

# squared distance between point spheres is -2 (f_i, f_j)
i, j = (5, 7), (30, 41)
d2 = -2 * mk.pair(L.f[i], L.f[j])
print("distance check:", d2, np.sum((grid.x[i] - grid.x[j]) ** 2))

# the curvature spheres are null and their radii are 1 / k_i
s1 = L.sigma1[i]
print("(sigma1, sigma1) =", mk.pair(s1, s1), " radius 1/k1 =", 1 / grid.k1[i])

# the plane projects back to the surface from any basis
f, t = lg.space_form_projection(L.sigma1 + 3 * L.f, L.sigma2, mk.QINF, mk.P)
x, n = lg.euclidean_point(f, t)
print("round trip error:", np.max(np.abs(x - grid.x)))
