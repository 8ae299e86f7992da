"""
Closed-form solution in the collective (transformed) representation.

Valid at resonance with point-like atoms (f = 1) for the initial state
with one excitation shared incoherently by the two atoms.  In the ordered
basis |0,-,->, |0,+,->, |0,-,+>, |1,-,-> the transformed density matrix has
the block structure

    [[r11, 0,    0,   0  ],
     [0,   r22,  0,   r24],
     [0,   0,    1/2, 0  ],
     [0,   r24*, 0,   r44]]

and r22, r44, r24 are damped combinations of cosh/sinh(Omega1 t) and
cos/sin(Omega2 t).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import UnsupportedRegimeError
from .model import SystemParams, collective_unitary, embed_excitation_block, excitation_block
from .qops import DensityMatrix, HilbertLayout, Operator, cavity_layout, ket, projector


@dataclass(frozen=True)
class AnalyticSolution:
    a_plus: float
    a_minus: float
    delta_c: complex
    eps_eff: float
    omega1: float
    omega2: float
    p_poly: float
    v_poly: float
    eta: float
    # sign of eta*A_minus; the closed form needs Omega1 with this sign
    branch: int = 1

    @property
    def norm(self) -> float:
        return self.omega1**2 + self.omega2**2

    def _damped(self, t):
        t = np.asarray(t, dtype=float)
        w1 = self.branch * self.omega1
        ap = self.a_plus
        # exp(-A+ t) * (cosh, sinh, cos, sin), written to avoid overflow
        e_hi = np.exp((abs(w1) - ap) * t)
        e_lo = np.exp(-(abs(w1) + ap) * t)
        ch = 0.5 * (e_hi + e_lo)
        sh = math.copysign(1.0, w1) * 0.5 * (e_hi - e_lo) if w1 != 0 else np.zeros_like(t)
        damp = np.exp(-ap * t)
        return w1, ch, sh, damp * np.cos(self.omega2 * t), damp * np.sin(self.omega2 * t)

    def rho22(self, t):
        w1, ch, sh, c, s = self._damped(t)
        w2, am, eta = self.omega2, self.a_minus, self.eta
        d2 = abs(self.delta_c) ** 2
        q = self.norm / 4
        val = (d2 + q) * ch + (q - d2) * c + (w2 * am / 2 - w1 * eta / 2) * s + (w2 * eta / 2 + w1 * am / 2) * sh
        return val / self.norm

    def rho44(self, t):
        _, ch, _, c, _ = self._damped(t)
        return self.eps_eff**2 / self.norm * (ch - c)

    def rho24(self, t):
        w1, ch, sh, c, s = self._damped(t)
        w2, ee = self.omega2, self.eps_eff
        osc = 0.5j * ee * (w2 + 1j * w1) * (s - 1j * sh)
        return (osc + self.delta_c * ee * (ch - c)) / self.norm

    def rho_tilde(self, t) -> np.ndarray:
        """4x4 transformed density matrix at time ``t`` (or stack for an array of times)."""
        t_arr = np.asarray(t, dtype=float)
        r22, r44, r24 = self.rho22(t_arr), self.rho44(t_arr), self.rho24(t_arr)
        out = np.zeros(t_arr.shape + (4, 4), dtype=complex)
        out[..., 1, 1] = r22
        out[..., 2, 2] = 0.5
        out[..., 3, 3] = r44
        out[..., 1, 3] = r24
        out[..., 3, 1] = np.conj(r24)
        out[..., 0, 0] = 1 - (r22 + 0.5 + r44)
        return out


def _omegas(p_poly, v_poly):
    root = math.sqrt(p_poly * p_poly - 4 * v_poly)
    if root == 0:
        raise UnsupportedRegimeError("degenerate point P = V = 0: closed form is singular")
    # the product of the squared roots is -V; use it to avoid cancellation
    if p_poly >= 0:
        w2sq = p_poly / 2 + root / 2
        w1sq = -v_poly / w2sq
    else:
        w1sq = -p_poly / 2 + root / 2
        w2sq = -v_poly / w1sq
    return math.sqrt(max(w1sq, 0.0)), math.sqrt(max(w2sq, 0.0))


def solve_constants(p: SystemParams) -> AnalyticSolution:
    if p.delta != 0:
        raise UnsupportedRegimeError("closed form requires resonance (delta = 0); use the numerical path")
    if p.f != 1:
        raise UnsupportedRegimeError("closed form requires point-like atoms (f = 1)")
    a_plus = p.kappa + 2 * p.gamma
    a_minus = p.kappa - 2 * p.gamma
    eps_eff = math.sqrt(2) * p.epsilon
    p_poly = p.eta**2 + 4 * eps_eff**2 - a_minus**2
    v_poly = -(a_minus**2) * p.eta**2
    w1, w2 = _omegas(p_poly, v_poly)
    return AnalyticSolution(
        a_plus=a_plus,
        a_minus=a_minus,
        delta_c=complex(p.eta, a_minus) / 2,
        eps_eff=eps_eff,
        omega1=w1,
        omega2=w2,
        p_poly=p_poly,
        v_poly=v_poly,
        eta=p.eta,
        branch=-1 if p.eta * a_minus < 0 else 1,
    )


def rho_tilde(t, s: AnalyticSolution) -> np.ndarray:
    return s.rho_tilde(t)


def back_transform(rt, u: Operator) -> DensityMatrix:
    """rho = U rho~ U^+ with the 4x4 block embedded on the canonical basis."""
    full = embed_excitation_block(rt, u.layout)
    return DensityMatrix(u @ full @ u.dag(), validate=False)


def to_transformed(rho: Operator, u: Operator | None = None) -> np.ndarray:
    """4x4 block of U^+ rho U on the canonical basis."""
    u = collective_unitary(rho.layout) if u is None else u
    return excitation_block(u.dag() @ rho @ u)


def psi_t(layout: HilbertLayout) -> np.ndarray:
    """(|0,-,+> - |0,+,->)/sqrt(2), the atomic singlet with an empty cavity."""
    return (ket(layout, 0, 0, 1) - ket(layout, 0, 1, 0)) / math.sqrt(2)


def asymptotic_state(layout: HilbertLayout | None = None) -> DensityMatrix:
    """Half ground state, half atomic singlet (cavity empty)."""
    layout = layout or cavity_layout(1)
    vac = ket(layout, 0, 0, 0)
    rho = 0.5 * projector(vac, layout) + 0.5 * projector(psi_t(layout), layout)
    return DensityMatrix(rho)
