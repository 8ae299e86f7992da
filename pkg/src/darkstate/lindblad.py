"""
Liouvillian assembly and propagation of the master equation.

Density matrices are vectorised by column stacking, for which
``vec(A X B) = (B^T kron A) vec(X)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .errors import IntegrationError, NumericalRankError
from .model import DissipatorSpec, excitation_basis_indices
from .qops import POS_TOL, DensityMatrix, HilbertLayout, Operator

DEFAULT_STEP = 1e-3
NULL_TOL = 1e-10
RENORM_THRESHOLD = 1e-12
MAX_TRACE_DRIFT = 1e-6


def vec(x) -> np.ndarray:
    return np.asarray(x, dtype=complex).reshape(-1, order="F")


def unvec(v, dim: int) -> np.ndarray:
    return np.asarray(v).reshape(dim, dim, order="F")


@dataclass(frozen=True)
class Superoperator:
    matrix: np.ndarray
    layout: HilbertLayout

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        d = self.layout.dim
        if m.shape != (d * d, d * d):
            raise ValueError(f"superoperator shape {m.shape} does not fit dimension {d}")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    def __call__(self, rho) -> Operator:
        data = rho.data if isinstance(rho, Operator) else rho
        return Operator(unvec(self.matrix @ vec(data), self.layout.dim), self.layout)

    def residual(self, rho) -> float:
        """max |L(rho)| entrywise."""
        data = rho.data if isinstance(rho, Operator) else rho
        return float(np.max(np.abs(self.matrix @ vec(data))))


def _dissipator_matrix(rate, left, right, eye):
    l, r = left.data, right.data
    rl = r.conj().T @ l
    return rate * (2 * np.kron(r.conj(), l) - np.kron(eye, rl) - np.kron(rl.T, eye))


def assemble_liouvillian(h: Operator, d: DissipatorSpec | None = None, encoding: str = "literal") -> Superoperator:
    """Matrix of rho -> -i[H, rho] + sum rate (2 L rho R^+ - R^+ L rho - rho R^+ L).

    ``encoding`` selects which representation of ``d`` is used
    (``"literal"`` or ``"collective"``); both describe the same generator.
    """
    herm = h.hermiticity_error()
    if herm > 1e-10:
        raise ValueError(f"Hamiltonian is not Hermitian (error {herm:.3g})")
    dim = h.dim
    eye = np.eye(dim)
    mat = -1j * (np.kron(eye, h.data) - np.kron(h.data.T, eye))
    if d is not None:
        if encoding == "literal":
            terms = d.literal
        elif encoding == "collective":
            terms = [(rate, j, j) for rate, j in d.collective]
        else:
            raise ValueError(f"unknown encoding {encoding!r}")
        for rate, left, right in terms:
            if left.dim != dim or right.dim != dim:
                raise ValueError("jump operator dimension does not match the Hamiltonian")
            if rate != 0:
                mat = mat + _dissipator_matrix(rate, left, right, eye)
    return Superoperator(mat, h.layout)


@dataclass
class Trajectory:
    times: np.ndarray
    states: list
    observables: dict = field(default_factory=dict)
    max_trace_drift: float = 0.0
    renormalized: bool = False

    def __len__(self):
        return len(self.times)

    @property
    def layout(self) -> HilbertLayout:
        return self.states[0].layout

    def observe(self, name: str, fn) -> np.ndarray:
        """Evaluate ``fn(state)`` along the trajectory and store it under ``name``."""
        vals = np.array([fn(s) for s in self.states])
        self.observables[name] = vals
        return vals


def rk4_step_matrix(lmat: np.ndarray, h: float) -> np.ndarray:
    """One classical RK4 step for dv/dt = L v, written as a matrix.

    For a linear autonomous system the four stages collapse exactly to
    ``I + hL + (hL)^2/2 + (hL)^3/6 + (hL)^4/24``.
    """
    n = lmat.shape[0]
    z = h * lmat
    out = np.eye(n, dtype=complex)
    term = np.eye(n, dtype=complex)
    for k in range(1, 5):
        term = term @ z / k
        out = out + term
    return out


def rk4_step(lmat: np.ndarray, v: np.ndarray, h: float) -> np.ndarray:
    """Textbook four-stage step, kept as a reference for :func:`rk4_step_matrix`."""
    k1 = lmat @ v
    k2 = lmat @ (v + 0.5 * h * k1)
    k3 = lmat @ (v + 0.5 * h * k2)
    k4 = lmat @ (v + h * k3)
    return v + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)


def evolve_rk(L: Superoperator, rho0: Operator, t_grid, h_max: float = DEFAULT_STEP) -> Trajectory:
    """Fixed-step RK4 integration sampled on ``t_grid``.

    Each output interval is split into ``ceil(dt / h_max)`` equal steps.
    If the trace drifts by more than 1e-12 the state is rescaled (and the
    drift recorded); drift above 1e-6 raises :class:`IntegrationError`.
    """
    times = np.asarray(t_grid, dtype=float)
    if times.ndim != 1 or len(times) == 0:
        raise ValueError("t_grid must be a non-empty 1-d sequence")
    if times[0] != 0 or np.any(np.diff(times) <= 0):
        raise ValueError("t_grid must start at 0 and increase strictly")
    if not h_max > 0:
        raise ValueError("h_max must be positive")

    dim = L.layout.dim
    v = vec(rho0.data)
    states = [DensityMatrix(rho0.data, L.layout, validate=False)]
    cache = {}
    max_drift = 0.0
    renormalized = False
    diag = np.arange(dim) * (dim + 1)

    for dt in np.diff(times):
        n = max(1, math.ceil(dt / h_max - 1e-9))
        key = (n, float(dt))
        if key not in cache:
            cache[key] = np.linalg.matrix_power(rk4_step_matrix(L.matrix, dt / n), n)
        v = cache[key] @ v
        tr = v[diag].sum()
        drift = abs(tr - 1)
        max_drift = max(max_drift, drift)
        if drift > MAX_TRACE_DRIFT:
            raise IntegrationError(
                f"trace drifted by {drift:.3g}; reduce the integration step (h = {dt / n:.3g})"
            )
        if drift > RENORM_THRESHOLD:
            v = v / tr
            renormalized = True
        states.append(DensityMatrix(unvec(v, dim), L.layout, validate=False))

    return Trajectory(times, states, max_trace_drift=max_drift, renormalized=renormalized)


def evolve_expm(L: Superoperator, rho0: Operator, t: float) -> DensityMatrix:
    """Exact propagation vec(rho(t)) = exp(L t) vec(rho0)."""
    if t < 0:
        raise ValueError("t must be non-negative")
    dim = L.layout.dim
    if t == 0:
        return DensityMatrix(rho0.data, L.layout, validate=False)
    v = scipy.linalg.expm(t * L.matrix) @ vec(rho0.data)
    return DensityMatrix(unvec(v, dim), L.layout, validate=False)


def evolve_expm_grid(L: Superoperator, rho0: Operator, t_grid) -> Trajectory:
    """:func:`evolve_expm` at every time of ``t_grid`` (each computed independently)."""
    times = np.asarray(t_grid, dtype=float)
    states = [evolve_expm(L, rho0, t) for t in times]
    return Trajectory(times, states)


@dataclass
class SteadyStates:
    states: list
    dimension: int
    singular_values: np.ndarray


def _hermitian_null_basis(null_vecs, dim):
    # real-linear basis of the Hermitian matrices in the (dagger-closed) null space
    reals = []
    for v in null_vecs:
        x = unvec(v, dim)
        for h in ((x + x.conj().T) / 2, (x - x.conj().T) / 2j):
            reals.append(np.concatenate([h.real.ravel(), h.imag.ravel()]))
    reals = np.array(reals)
    u, s, vh = np.linalg.svd(reals, full_matrices=False)
    rank = int(np.sum(s > 1e-8 * s[0]))
    out = []
    for row in vh[:rank]:
        re, im = row[: dim * dim], row[dim * dim :]
        out.append((re + 1j * im).reshape(dim, dim))
    return out


def steady_states(L: Superoperator, tol: float = NULL_TOL) -> SteadyStates:
    """Basis of stationary density matrices of ``L``.

    The null space is read off from the singular values of L that are
    ``<= tol``.  Each Hermitian null element is split into its positive and
    negative parts; those that are themselves stationary are normalised and
    kept if linearly independent of the ones found so far.
    """
    dim = L.layout.dim
    _, s, vh = np.linalg.svd(L.matrix)
    null = vh[s <= tol].conj()
    if len(null) == 0:
        raise NumericalRankError(f"no singular value below {tol:.1e} (smallest {s[-1]:.3g})")

    states = []
    flat = []
    for h in _hermitian_null_basis(null, dim):
        lam, vecs = np.linalg.eigh(h)
        for sel in (lam > 1e-10, lam < -1e-10):
            if not sel.any():
                continue
            part = (vecs[:, sel] * np.abs(lam[sel])) @ vecs[:, sel].conj().T
            part = part / np.trace(part).real
            if L.residual(part) > 1e-8:
                continue
            cand = flat + [vec(part)]
            if np.linalg.matrix_rank(np.array(cand), tol=1e-8) == len(cand):
                flat.append(vec(part))
                states.append(DensityMatrix(part, L.layout, validate=False))
        if len(states) == len(null):
            break
    states = _shrink_supports(states, L)
    return SteadyStates(states=states, dimension=len(null), singular_values=s)


def _shrink_supports(states, L, max_passes=10):
    # replace a by normalise(a - t b) with the largest t keeping it positive;
    # the span is unchanged and the rank of a drops
    mats = [s.data for s in states]
    for _ in range(max_passes):
        changed = False
        for i, a in enumerate(mats):
            lam, v = np.linalg.eigh(a)
            sup = lam > 1e-10
            w = v[:, sup] / np.sqrt(lam[sup])
            for j, b in enumerate(mats):
                if i == j:
                    continue
                inside = np.trace(v[:, sup].conj().T @ b @ v[:, sup]).real
                if abs(inside - np.trace(b).real) > 1e-9:
                    continue
                mu = np.linalg.eigvalsh(w.conj().T @ b @ w)[-1]
                if mu <= 1e-12:
                    continue
                new = a - b / mu
                tr = np.trace(new).real
                if tr < 1e-8:
                    continue
                new = new / tr
                if np.linalg.matrix_rank(new, tol=1e-9) < int(sup.sum()) and L.residual(new) < 1e-8:
                    mats[i] = (new + new.conj().T) / 2
                    changed = True
                    break
        if not changed:
            break
    return [DensityMatrix(m, L.layout, validate=False) for m in mats]


def spectral_gap(L: Superoperator, tol: float = NULL_TOL):
    """Smallest decay rate -Re(lambda) > tol of the Liouvillian, or None without dissipation."""
    lam = np.linalg.eigvals(L.matrix)
    rates = -lam.real[lam.real < -tol]
    return float(rates.min()) if len(rates) else None


def leaked_population(rho: Operator) -> float:
    """Population outside the four-state one-excitation basis."""
    idx = set(excitation_basis_indices(rho.layout))
    diag = np.real(np.diag(rho.data))
    return float(sum(diag[i] for i in range(len(diag)) if i not in idx))


def confinement_check(traj: Trajectory) -> float:
    """Maximum over the trajectory of the population outside the four-state basis."""
    return max(abs(leaked_population(s)) for s in traj.states)


def conservation_report(traj: Trajectory, number_op: Operator | None = None) -> dict:
    """Worst-case violations of density-matrix properties along a trajectory.

    Keys: ``trace_drift``, ``hermiticity``, ``min_eigenvalue``,
    ``number_increase`` (largest step-to-step rise of <N>, needs
    ``number_op``) and ``leakage``.
    """
    trace_drift = max(abs(np.trace(s.data) - 1) for s in traj.states)
    herm = max(s.hermiticity_error() for s in traj.states)
    min_eig = min(np.linalg.eigvalsh((s.data + s.data.conj().T) / 2)[0] for s in traj.states)
    report = {
        "trace_drift": float(trace_drift),
        "hermiticity": float(herm),
        "min_eigenvalue": float(min_eig),
        "leakage": confinement_check(traj),
    }
    if number_op is not None:
        n = np.array([np.trace(number_op.data @ s.data).real for s in traj.states])
        report["number_increase"] = float(max(0.0, np.max(np.diff(n)))) if len(n) > 1 else 0.0
    report["positive"] = report["min_eigenvalue"] >= -POS_TOL
    return report
