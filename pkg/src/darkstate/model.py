"""
Physical model: two dipole-coupled two-level atoms inside a lossy
single-mode cavity.

All rates and couplings are expressed in units of the atom-cavity coupling
``epsilon`` and hbar = 1.  Dissipators use the convention

    rate * (2 L rho R^+ - R^+ L rho - rho R^+ L)

so an excited state population decays at ``2 * rate``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace

import numpy as np

from .qops import (
    SIGMA_MINUS,
    SIGMA_Z,
    DensityMatrix,
    HilbertLayout,
    Operator,
    cavity_layout,
    destroy,
    expm,
    ket,
    projector,
)

FRAMES = ("rotating", "lab")

# product-basis labels (photons, atom1, atom2) of the four states reachable
# from one injected excitation, in the canonical order
#   |0,-,->, |0,+,->, |0,-,+>, |1,-,->
EXCITATION_BASIS = ((0, 0, 0), (0, 1, 0), (0, 0, 1), (1, 0, 0))

# below this value of omega0*R/c the cooperation factor uses its Taylor series
F_SERIES_THRESHOLD = 1e-2


@dataclass(frozen=True)
class SystemParams:
    """Rates in units of ``epsilon``; ``f`` is the cross-damping ratio Gamma12/Gamma."""

    epsilon: float = 1.0
    eta: float = 0.0
    kappa: float = 0.0
    gamma: float = 0.0
    f: float = 1.0
    delta: float = 0.0
    omega0: float | None = None
    fock_cutoff: int = 1
    frame: str = "rotating"

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ValueError("epsilon must be positive")
        if self.kappa < 0 or self.gamma < 0:
            raise ValueError("decay rates must be non-negative")
        if abs(self.f) > 1:
            raise ValueError(f"|f| must not exceed 1, got {self.f}")
        if int(self.fock_cutoff) != self.fock_cutoff or self.fock_cutoff < 1:
            raise ValueError("fock_cutoff must be an integer >= 1")
        if self.frame not in FRAMES:
            raise ValueError(f"frame must be one of {FRAMES}, got {self.frame!r}")
        if self.frame == "lab" and self.omega0 is None:
            raise ValueError("lab frame requires omega0")

    @classmethod
    def figure1(cls, **overrides) -> SystemParams:
        """eta = 0.5, k = 0.1, Gamma = 0.01 (units of epsilon), point-like atoms."""
        base = cls(epsilon=1.0, eta=0.5, kappa=0.1, gamma=0.01, f=1.0)
        return replace(base, **overrides)

    @property
    def gamma12(self) -> float:
        return self.gamma * self.f

    @property
    def layout(self) -> HilbertLayout:
        return cavity_layout(self.fock_cutoff)

    def replace(self, **changes) -> SystemParams:
        return replace(self, **changes)


@dataclass(frozen=True)
class Geometry:
    R: float
    theta: float
    omega0: float
    c: float = 1.0
    Gamma0: float = 1.0

    def __post_init__(self):
        if self.R < 0:
            raise ValueError("R must be non-negative")
        if not 0 <= self.theta <= math.pi:
            raise ValueError("theta must lie in [0, pi]")
        if self.omega0 <= 0 or self.c <= 0:
            raise ValueError("omega0 and c must be positive")

    @property
    def x(self) -> float:
        """Dimensionless separation omega0 * R / c."""
        return self.omega0 * self.R / self.c


@dataclass
class DissipatorSpec:
    """Two equivalent encodings of the same dissipator.

    ``literal`` holds ``(rate, L, R)`` triples for terms
    ``rate*(2 L rho R^+ - R^+ L rho - rho R^+ L)``; ``collective`` holds
    ``(rate, J)`` pairs in diagonal form (L = R = J).
    """

    literal: list = field(default_factory=list)
    collective: list = field(default_factory=list)


# operators on the [cavity, atom1, atom2] space

def _embed(local: np.ndarray, slot: int, layout: HilbertLayout) -> Operator:
    mats = [np.eye(d, dtype=complex) for d in layout.factor_dims]
    mats[slot] = local
    out = mats[0]
    for m in mats[1:]:
        out = np.kron(out, m)
    return Operator(out, layout)


def cavity_annihilation(layout: HilbertLayout) -> Operator:
    return _embed(destroy(layout.factor_dims[0]), 0, layout)


def photon_number(layout: HilbertLayout) -> Operator:
    """a^+ a with exact integer diagonal (not formed as a product of square roots)."""
    return _embed(np.diag(np.arange(layout.factor_dims[0])).astype(complex), 0, layout)


def sigma_minus(atom: int, layout: HilbertLayout) -> Operator:
    """Lowering operator of atom 1 or 2."""
    if atom not in (1, 2):
        raise ValueError("atom must be 1 or 2")
    return _embed(SIGMA_MINUS, atom, layout)


def sigma_z(atom: int, layout: HilbertLayout) -> Operator:
    if atom not in (1, 2):
        raise ValueError("atom must be 1 or 2")
    return _embed(SIGMA_Z, atom, layout)


def _check_atoms(layout: HilbertLayout):
    if layout.n_factors != 3 or layout.factor_dims[1:] != (2, 2):
        raise ValueError(f"expected [cavity, 2, 2] layout, got {layout.factor_dims}")


def build_h12(p: SystemParams, layout: HilbertLayout | None = None) -> Operator:
    """Dipole-dipole exchange eta*(s+^(1) s-^(2) + h.c.)."""
    layout = layout or p.layout
    _check_atoms(layout)
    s1, s2 = sigma_minus(1, layout), sigma_minus(2, layout)
    hop = s1.dag() @ s2
    return p.eta * (hop + hop.dag())


def excitation_number(layout: HilbertLayout) -> Operator:
    """N = a^+ a + (sz1 + sz2)/2 + 1."""
    _check_atoms(layout)
    n_phot = photon_number(layout)
    n = n_phot + 0.5 * (sigma_z(1, layout) + sigma_z(2, layout))
    return Operator(n.data + np.eye(layout.dim), layout)


def build_hac(p: SystemParams, layout: HilbertLayout | None = None) -> Operator:
    """Atom-cavity Hamiltonian with dipole coupling.

    In the rotating frame (at the atomic frequency) only the detuning
    ``delta * a^+ a`` survives from the free part.
    """
    layout = layout or p.layout
    _check_atoms(layout)
    a = cavity_annihilation(layout)
    s1, s2 = sigma_minus(1, layout), sigma_minus(2, layout)
    n_phot = photon_number(layout)
    jc = a @ s1.dag() + a @ s2.dag()
    h = p.epsilon * (jc + jc.dag()) + build_h12(p, layout)
    if p.frame == "lab":
        omega = p.omega0 + p.delta
        h = h + omega * n_phot + (p.omega0 / 2) * (sigma_z(1, layout) + sigma_z(2, layout))
    elif p.delta != 0:
        h = h + p.delta * n_phot
    return h


def eta_from_geometry(g: Geometry) -> float:
    """Dipole-dipole strength (3/4) Gamma0 (c/omega0 R)^3 (1 - 3 cos^2 theta)."""
    if g.R == 0:
        raise ValueError("eta diverges at R = 0")
    return 0.75 * g.Gamma0 / g.x**3 * (1 - 3 * math.cos(g.theta) ** 2)


def _f_direct(x: float, cos2: float) -> float:
    sinc = math.sin(x) / x
    # cos x / x^2 - sin x / x^3 with a single division
    bracket = (x * math.cos(x) - math.sin(x)) / x**3
    return 1.5 * ((1 - cos2) * sinc + (1 - 3 * cos2) * bracket)


def _f_series(x: float, cos2: float) -> float:
    x2 = x * x
    sinc = 1 - x2 / 6 + x2 * x2 / 120
    bracket = -1 / 3 + x2 / 30 - x2 * x2 / 840
    return 1.5 * ((1 - cos2) * sinc + (1 - 3 * cos2) * bracket)


def dipole_f(g: Geometry) -> float:
    """Cooperation factor f(R) = Gamma12 / Gamma of two dipoles sharing a bath.

    Tends to 1 as omega0*R/c -> 0 and returns exactly 1 at R = 0.  Negative
    values (possible in the oscillating far-field tail) trigger a warning.
    """
    if g.R == 0:
        return 1.0
    x = g.x
    cos2 = math.cos(g.theta) ** 2
    val = _f_series(x, cos2) if x < F_SERIES_THRESHOLD else _f_direct(x, cos2)
    if val < 0:
        warnings.warn(f"cooperation factor f = {val:.4g} is negative", RuntimeWarning, stacklevel=2)
    return val


def build_dissipators(p: SystemParams, layout: HilbertLayout | None = None) -> DissipatorSpec:
    layout = layout or p.layout
    if abs(p.f) > 1:
        raise ValueError("|f| must not exceed 1")
    a = cavity_annihilation(layout)
    s1, s2 = sigma_minus(1, layout), sigma_minus(2, layout)
    literal = [
        (p.kappa, a, a),
        (p.gamma, s1, s1),
        (p.gamma, s2, s2),
        (p.gamma12, s1, s2),
        (p.gamma12, s2, s1),
    ]
    sym = (s1 + s2) / math.sqrt(2)
    anti = (s1 - s2) / math.sqrt(2)
    collective = [
        (p.kappa, a),
        (p.gamma * (1 + p.f), sym),
        (p.gamma * (1 - p.f), anti),
    ]
    return DissipatorSpec(literal=literal, collective=collective)


def collective_unitary(layout: HilbertLayout) -> Operator:
    """U = exp[-(pi/4)(s+^(1) s-^(2) - s-^(1) s+^(2))], rotating |+-> into the symmetric state."""
    _check_atoms(layout)
    s1, s2 = sigma_minus(1, layout), sigma_minus(2, layout)
    gen = s1.dag() @ s2 - s1 @ s2.dag()
    return expm(gen, -math.pi / 4)


def transformed_hamiltonian(p: SystemParams, layout: HilbertLayout | None = None) -> Operator:
    """U^+ H_AC U, computed by conjugation."""
    layout = layout or p.layout
    u = collective_unitary(layout)
    return u.dag() @ build_hac(p, layout) @ u


def textbook_transformed_hamiltonian(p: SystemParams, layout: HilbertLayout | None = None) -> Operator:
    """The collective-frame Hamiltonian exactly as it is usually written down.

    omega a^+a + omega0 (sz1 + sz2) + eps_eff (a s+^(1) + h.c.) - (eta/2)(sz2 - sz1),
    with eps_eff = sqrt(2) eps.  Note the free atomic term carries no 1/2
    here; compare with :func:`transformed_hamiltonian` through
    :func:`transformed_hamiltonian_discrepancy`.
    """
    layout = layout or p.layout
    a = cavity_annihilation(layout)
    s1 = sigma_minus(1, layout)
    sz1, sz2 = sigma_z(1, layout), sigma_z(2, layout)
    jc = a @ s1.dag()
    h = math.sqrt(2) * p.epsilon * (jc + jc.dag()) - (p.eta / 2) * (sz2 - sz1)
    if p.frame == "lab":
        h = h + (p.omega0 + p.delta) * (a.dag() @ a) + p.omega0 * (sz1 + sz2)
    elif p.delta != 0:
        h = h + p.delta * (a.dag() @ a)
    return h


def transformed_hamiltonian_discrepancy(p: SystemParams) -> float:
    """Largest entrywise gap between U^+ H_AC U and the textbook form on the N <= 1 block."""
    layout = p.layout
    idx = excitation_basis_indices(layout)
    exact = transformed_hamiltonian(p, layout).data[np.ix_(idx, idx)]
    textbook = textbook_transformed_hamiltonian(p, layout).data[np.ix_(idx, idx)]
    return float(np.max(np.abs(exact - textbook)))


def build_transformed_dissipators(p: SystemParams, layout: HilbertLayout | None = None) -> DissipatorSpec:
    """Collective-frame dissipator for point-like atoms: cavity loss plus one 2*Gamma channel on atom 1."""
    if p.f != 1:
        raise ValueError("the single-channel collective form needs f = 1")
    layout = layout or p.layout
    a = cavity_annihilation(layout)
    s1 = sigma_minus(1, layout)
    literal = [(p.kappa, a, a), (2 * p.gamma, s1, s1)]
    collective = [(p.kappa, a), (2 * p.gamma, s1)]
    return DissipatorSpec(literal=literal, collective=collective)


def excitation_basis_indices(layout: HilbertLayout) -> list[int]:
    """Flat indices of |0,-,->, |0,+,->, |0,-,+>, |1,-,->."""
    return [layout.index(*lab) for lab in EXCITATION_BASIS]


def excitation_block(op: Operator | np.ndarray, layout: HilbertLayout | None = None) -> np.ndarray:
    """4x4 restriction of an operator to the canonical one-excitation basis."""
    if isinstance(op, Operator):
        layout = op.layout
        op = op.data
    idx = excitation_basis_indices(layout)
    return np.asarray(op)[np.ix_(idx, idx)]


def embed_excitation_block(block, layout: HilbertLayout) -> Operator:
    """Inverse of :func:`excitation_block`: zero-pad a 4x4 matrix into the full space."""
    block = np.asarray(block, dtype=complex)
    if block.shape != (4, 4):
        raise ValueError("expected a 4x4 block")
    idx = excitation_basis_indices(layout)
    full = np.zeros((layout.dim, layout.dim), dtype=complex)
    full[np.ix_(idx, idx)] = block
    return Operator(full, layout)


def initial_state(layout: HilbertLayout) -> DensityMatrix:
    """One excitation shared incoherently by the atoms, cavity in vacuum."""
    _check_atoms(layout)
    plus_minus = projector(ket(layout, 0, 1, 0), layout)
    minus_plus = projector(ket(layout, 0, 0, 1), layout)
    return DensityMatrix(0.5 * (plus_minus + minus_plus))
