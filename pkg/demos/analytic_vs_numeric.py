"""
Closed form against brute force
===============================

Three independent ways to propagate the same state:

* the closed-form solution in the collective basis
* fourth-order Runge-Kutta on the vectorised master equation
* the exact matrix exponential of the Liouvillian
"""

import numpy as np

from darkstate import SystemParams, analytic, lindblad, model

p = SystemParams.figure1()
layout = p.layout
L = lindblad.assemble_liouvillian(model.build_hac(p), model.build_dissipators(p))
u = model.collective_unitary(layout)
rho0 = model.initial_state(layout)

times = np.linspace(0, 100, 201)
rk = lindblad.evolve_rk(L, rho0, times, h_max=1e-3)
closed = analytic.solve_constants(p).rho_tilde(times)

dev = max(np.abs(analytic.to_transformed(s, u) - r).max() for s, r in zip(rk.states, closed))
print(f"closed form vs RK4, worst entry over [0, 100]: {dev:.2e}")

for t in (1.0, 10.0, 100.0):
    exact = lindblad.evolve_expm(L, rho0, t)
    i = int(np.searchsorted(times, t))
    print(f"t = {t:5.1f}  RK4 vs expm: {np.abs(exact.data - rk.states[i].data).max():.2e}")

# %%
# Physical sanity of the numerical trajectory
rep = lindblad.conservation_report(rk, model.excitation_number(layout))
for key, value in rep.items():
    print(f"{key:16s} {value}")
