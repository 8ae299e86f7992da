"""Entanglement measures for the atomic pair."""

from __future__ import annotations

import numpy as np

from .errors import NoSupportError
from .qops import SIGMA_Y, DensityMatrix, HilbertLayout, Operator, ket, partial_trace

_YY = np.kron(SIGMA_Y, SIGMA_Y)
NO_SUPPORT_TOL = 1e-14


def _psd_sqrt(m: np.ndarray) -> np.ndarray:
    lam, v = np.linalg.eigh((m + m.conj().T) / 2)
    # eigenvalues below the rounding floor are zero; their square roots would be ~1e-8 noise
    floor = len(lam) * np.finfo(float).eps * max(lam[-1], 0.0)
    lam = np.where(lam > floor, lam, 0.0)
    return (v * np.sqrt(lam)) @ v.conj().T


def wootters_concurrence(rho) -> float:
    """Concurrence max(0, l1 - l2 - l3 - l4) of a two-qubit density matrix.

    The l_i are the square roots of the eigenvalues of rho (Y.Y) rho* (Y.Y).
    They are obtained as singular values of sqrt(rho) (Y.Y) sqrt(rho)*,
    which avoids taking square roots of near-zero eigenvalues.
    """
    m = rho.data if isinstance(rho, Operator) else np.asarray(rho, dtype=complex)
    if m.shape != (4, 4):
        raise ValueError("concurrence needs a 4x4 two-qubit state")
    root = _psd_sqrt(m)
    lam = np.linalg.svd(root @ _YY @ root.conj(), compute_uv=False)
    c = lam[0] - lam[1] - lam[2] - lam[3]
    return float(min(1.0, max(0.0, c)))


def conditional_state(rho: Operator) -> tuple[DensityMatrix, float]:
    """Atomic state given that no photon has escaped the system.

    Projects out the ground state |0,-,->, renormalises, and traces over
    the cavity.  The cavity-photon component is kept before the trace.
    Returns the two-qubit state and the probability of the no-emission
    record.
    """
    layout = rho.layout
    vac = ket(layout, 0, 0, 0)
    proj = np.eye(layout.dim) - np.outer(vac, vac.conj())
    kept = proj @ rho.data @ proj
    norm = float(np.trace(kept).real)
    if norm <= NO_SUPPORT_TOL:
        raise NoSupportError("state has no weight outside the ground state")
    cond = Operator(kept / norm, layout)
    atoms = partial_trace(cond, keep=[1, 2])
    return DensityMatrix(atoms, validate=False), norm


def conditional_concurrence(rt) -> float:
    """|r22 - r33| / (r22 + r33 + r44) for a 4x4 transformed density matrix."""
    rt = np.asarray(rt)
    r22, r33, r44 = rt[1, 1].real, rt[2, 2].real, rt[3, 3].real
    denom = r22 + r33 + r44
    if denom <= NO_SUPPORT_TOL:
        raise NoSupportError("no weight outside the ground state")
    return float(min(1.0, abs(r22 - r33) / denom))


def fidelity(a, b) -> float:
    """Uhlmann fidelity (tr sqrt(sqrt(a) b sqrt(a)))^2.

    Evaluated as the squared sum of singular values of sqrt(a) sqrt(b).
    """
    ma = a.data if isinstance(a, Operator) else np.asarray(a, dtype=complex)
    mb = b.data if isinstance(b, Operator) else np.asarray(b, dtype=complex)
    if ma.shape != mb.shape:
        raise ValueError("states live on different spaces")
    sv = np.linalg.svd(_psd_sqrt(ma) @ _psd_sqrt(mb), compute_uv=False)
    f = np.sum(sv) ** 2
    return float(min(1.0, f))


def bell_singlet(layout: HilbertLayout | None = None) -> DensityMatrix:
    """(|-+> - |+->)/sqrt(2) projector on two qubits."""
    layout = layout or HilbertLayout((2, 2))
    psi = (ket(layout, 0, 1) - ket(layout, 1, 0)) / np.sqrt(2)
    return DensityMatrix(np.outer(psi, psi.conj()), layout)
