"""
Who survives at long times
==========================

With a common bath (f = 1) the Liouvillian has a two-dimensional kernel:
the vacuum and the antisymmetric dark state.  Independent baths (f = 0)
leave the vacuum alone.  Sweeping f shows where the trapped entanglement
goes.
"""

import numpy as np

from darkstate import SystemParams, analytic, entangle, lindblad, model

for f in (1.0, 0.99, 0.9, 0.5, 0.0):
    p = SystemParams.figure1(f=f)
    L = lindblad.assemble_liouvillian(model.build_hac(p), model.build_dissipators(p))
    ss = lindblad.steady_states(L)
    gap = lindblad.spectral_gap(L)
    print(f"f = {f:4.2f}  kernel dimension {ss.dimension}  gap {gap:.4e}")

# %%
# At f = 1 the state evolved from the mixed single excitation approaches
# one half vacuum plus one half singlet.
p = SystemParams.figure1()
layout = p.layout
L = lindblad.assemble_liouvillian(model.build_hac(p), model.build_dissipators(p))
late = lindblad.evolve_expm(L, model.initial_state(layout), 200.0)
print("fidelity to asymptotic state:", entangle.fidelity(late, analytic.asymptotic_state(layout)))
atoms, weight = entangle.conditional_state(late)
print(f"no-emission probability {weight:.6f}, conditional concurrence {entangle.wootters_concurrence(atoms):.9f}")

# %%
# For f slightly below 1 the dark state leaks slowly, at a rate of order gamma (1 - f).
for f in (0.999, 0.99, 0.9):
    p = SystemParams.figure1(f=f)
    L = lindblad.assemble_liouvillian(model.build_hac(p), model.build_dissipators(p))
    rho = lindblad.evolve_expm(L, model.initial_state(layout), 200.0)
    atoms, weight = entangle.conditional_state(rho)
    print(f"f = {f}: P(no emission) at t=200 is {weight:.4f}")
