"""Darboux transforms of a catenoid at m = 0.4.

A seed constrained by the conserved pair gives another minimal surface.
A free seed gives a Darboux transform that is not linear Weingarten, and the
conserved quantity p gains a degree.
"""
import math

import numpy as np

from lieapp import catalog as cat
from lieapp import conserved as cq
from lieapp import gauge as ga
from lieapp import legendre as lg
from lieapp import minkowski as mk
from lieapp import transforms as tr

m = 0.4
L = lg.lift_euclidean(cat.sample(cat.catalog("catenoid"), 96, 96))
eta = ga.middle_potential_lw(L, 0, 1, 0)
p, q = cq.lw_conserved_pair(L, 0, 1, 0)

for ang in [(math.pi / 3, 3 * math.pi / 4), (math.pi / 2, math.pi)]:
    R = tr.lw_preserving_darboux(L, eta, p, q, m, ang)
    print(f"seed {np.round(ang, 3)}: max |2H| = {np.max(np.abs(R.lw_residual)):.1e}, "
          f"degrees {[t.cq.degree for t in R.transported]}")

G = tr.integrate_gauge(eta, m)
D = tr.darboux_transform(L, eta, m, mk.null_directions_in(mk.BASIS, (1.3, 2.3, 1.3, 3 * math.pi / 4)), gauge=G)
S = tr.reproject(D)
moved = tr.darboux_cq_transport(D, p)
print(f"free seed: margin {D.margin:.2f}, max |2H| = {np.max(np.abs(2 * S.H[2:-2, 2:-2])):.2f}, "
      f"degree of p {moved.cq.degree}")
print("norm polynomial of p:", np.round(cq.norm_polynomial(p).coeffs, 12))
print("after transport     :", np.round(cq.norm_polynomial(moved.cq).coeffs, 12))
