"""
From atom spacing to couplings
==============================

The cooperation factor f and the dipole-dipole shift eta both follow from
the separation R (in units of c / omega0) and the angle theta between the
dipoles and the interatomic axis.  Close atoms share the bath fully, f -> 1,
while eta grows like 1 / R^3.
"""

import warnings

import numpy as np

from darkstate import model
from darkstate.model import Geometry

theta = np.pi / 2
print(f"{'x = w0 R / c':>14s} {'f':>14s} {'eta / Gamma0':>14s}")
for x in (1e-4, 1e-3, 1e-2, 0.1, 0.5, 1.0, 2.0):
    g = Geometry(R=x, theta=theta, omega0=1.0)
    print(f"{x:14.4g} {model.dipole_f(g):14.10f} {model.eta_from_geometry(g):14.4e}")

# %%
# Far apart the factor oscillates and can turn negative; a warning flags it.
with warnings.catch_warnings(record=True) as caught:
    warnings.simplefilter("always")
    f = model.dipole_f(Geometry(R=4.0, theta=theta, omega0=1.0))
print(f"x = 4: f = {f:.4f}, warnings: {[str(w.message) for w in caught]}")
