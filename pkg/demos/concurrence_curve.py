"""
Entanglement built by dissipation
=================================

Two atoms start with one shared excitation, half on each atom and no
coherence between them.  Cavity loss removes the symmetric part of that
excitation.  The antisymmetric part cannot radiate and ends up trapped, so
the atoms become entangled once no photon has leaked out.
"""

import numpy as np

from darkstate import SystemParams, analytic, entangle

p = SystemParams.figure1()  # eta = 0.5, kappa = 0.1, gamma = 0.01 (units of epsilon)
sol = analytic.solve_constants(p)
print(f"A+ = {sol.a_plus:.4f}  Omega1 = {sol.omega1:.6f}  Omega2 = {sol.omega2:.6f}")
print(f"fast period 2 pi / Omega2 = {2 * np.pi / sol.omega2:.4f}")
print(f"slowest decay of the transient A+ - Omega1 = {sol.a_plus - sol.omega1:.5f}")

t = np.linspace(0, 100, 2001)
c = np.array([entangle.conditional_concurrence(r) for r in sol.rho_tilde(t)])

# %%
# The concurrence oscillates at Omega2 while its envelope climbs to 1.
for ti in (0, 1, 5, 10, 20, 40, 60, 100):
    print(f"t = {ti:5.1f}   C = {c[np.searchsorted(t, ti)]:.6f}")

try:
    import matplotlib.pyplot as plt
except ImportError:
    plt = None

if plt is not None:
    plt.plot(t, c)
    plt.xlabel("t (1/epsilon)")
    plt.ylabel("conditional concurrence")
    plt.savefig("concurrence_curve.png", dpi=120)
    print("saved concurrence_curve.png")
