"""The Calapso family of a catenoid.

T(t) trivializes d + t eta; the images T(t) f form a deformation that keeps
the quadratic differential q. Meshes of the family are written as OBJ files.
"""
import sys
import tempfile
from pathlib import Path

import numpy as np

from lieapp import catalog as cat
from lieapp import conserved as cq
from lieapp import gauge as ga
from lieapp import io
from lieapp import legendre as lg
from lieapp import minkowski as mk
from lieapp import transforms as tr

out = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(tempfile.mkdtemp(prefix="calapso_"))
out.mkdir(parents=True, exist_ok=True)

L = lg.lift_euclidean(cat.sample(cat.catalog("catenoid"), 64, 64))
eta = ga.middle_potential_lw(L, 0, 1, 0)
p, q = cq.lw_conserved_pair(L, 0, 1, 0)

for t in (0.1, 0.25, 0.5):
    res = tr.calapso_transform(L, eta, t, cqs=(p, q))
    drift = np.max(mk.orthogonality_defect(res.gauge.T))
    print(f"t={t}: q deviation {res.q_deviation:.2e}, orthogonality drift {drift:.1e}, "
          f"path disagreement {tr.path_disagreement(eta, t):.1e}")
    f, tt = lg.space_form_projection(res.f, res.t, mk.QINF, mk.P)
    x, n = lg.euclidean_point(f, tt)
    io.write_obj(out / f"calapso_t{t:g}.obj", x, n)

print("meshes in", out)
