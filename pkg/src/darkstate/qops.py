"""
Small dense operator kernel for the cavity + two-atom Hilbert space.

Operators carry their tensor-factor layout so that tensor products and
partial traces know how to reshape.  The project-wide factor order is
``[cavity, atom1, atom2]``.  For each two-level atom index 0 is the ground
state |-> and index 1 the excited state |+>, so that the atomic index and
the photon number behave the same way.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce

import numpy as np
import scipy.linalg

from .errors import ContractError

# Centralised tolerances.
HERM_TOL = 1e-12
POS_TOL = 1e-9
TRACE_TOL = 1e-10


@dataclass(frozen=True)
class HilbertLayout:
    factor_dims: tuple[int, ...]

    def __post_init__(self):
        dims = tuple(int(d) for d in self.factor_dims)
        if not dims or any(d < 1 for d in dims):
            raise ValueError(f"invalid factor dimensions {self.factor_dims!r}")
        object.__setattr__(self, "factor_dims", dims)

    @property
    def dim(self) -> int:
        return int(np.prod(self.factor_dims))

    @property
    def n_factors(self) -> int:
        return len(self.factor_dims)

    def __add__(self, other: HilbertLayout) -> HilbertLayout:
        return HilbertLayout(self.factor_dims + other.factor_dims)

    def index(self, *labels: int) -> int:
        """Flat index of the product basis state with the given factor labels."""
        if len(labels) != self.n_factors:
            raise ValueError("one label per factor required")
        return int(np.ravel_multi_index(labels, self.factor_dims))


def cavity_layout(fock_cutoff: int = 1) -> HilbertLayout:
    """Layout ``[cavity, atom1, atom2]`` with photon numbers 0..fock_cutoff."""
    if fock_cutoff < 1:
        raise ValueError("fock_cutoff must be >= 1")
    return HilbertLayout((fock_cutoff + 1, 2, 2))


class Operator:
    """Dense complex matrix tagged with a :class:`HilbertLayout`.

    The wrapped array is copied and made read-only, so instances can be
    shared freely.
    """

    __array_priority__ = 1000

    def __init__(self, data, layout: HilbertLayout | tuple[int, ...] | None = None):
        data = np.array(data, dtype=complex)
        if data.ndim != 2 or data.shape[0] != data.shape[1]:
            raise ValueError(f"operator must be square, got shape {data.shape}")
        if layout is None:
            layout = HilbertLayout((data.shape[0],))
        elif not isinstance(layout, HilbertLayout):
            layout = HilbertLayout(tuple(layout))
        if layout.dim != data.shape[0]:
            raise ValueError(
                f"layout {layout.factor_dims} does not match dimension {data.shape[0]}"
            )
        data.setflags(write=False)
        self._data = data
        self._layout = layout

    @property
    def data(self) -> np.ndarray:
        return self._data

    @property
    def layout(self) -> HilbertLayout:
        return self._layout

    @property
    def dim(self) -> int:
        return self._data.shape[0]

    def __array__(self, dtype=None, copy=None):
        return self._data if dtype is None else self._data.astype(dtype)

    def __repr__(self):
        return f"{type(self).__name__}(dims={list(self.layout.factor_dims)})\n{self._data!r}"

    def dag(self) -> Operator:
        return Operator(self._data.conj().T, self._layout)

    def tr(self) -> complex:
        return complex(np.trace(self._data))

    def hermiticity_error(self) -> float:
        return float(np.max(np.abs(self._data - self._data.conj().T)))

    def _coerce(self, other):
        if isinstance(other, Operator):
            if other.dim != self.dim:
                raise ValueError("operator dimensions differ")
            return other._data
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return Operator(self._data + o, self._layout)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return Operator(self._data - o, self._layout)

    def __neg__(self):
        return Operator(-self._data, self._layout)

    def __mul__(self, scalar):
        if isinstance(scalar, Operator) or not np.isscalar(scalar):
            return NotImplemented
        return Operator(scalar * self._data, self._layout)

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return Operator(self._data / scalar, self._layout)

    def __matmul__(self, other):
        if isinstance(other, Operator):
            return Operator(self._data @ other._data, self._layout)
        return self._data @ np.asarray(other)

    def __eq__(self, other):
        if not isinstance(other, Operator):
            return NotImplemented
        return self._layout == other._layout and np.array_equal(self._data, other._data)

    __hash__ = None


class DensityMatrix(Operator):
    """Operator validated as a density matrix (unit trace, Hermitian, PSD)."""

    def __init__(self, data, layout=None, *, validate: bool = True):
        if isinstance(data, Operator):
            layout = data.layout if layout is None else layout
            data = data.data
        super().__init__(data, layout)
        if validate:
            check_density(self)


def check_density(rho: Operator, trace_tol=TRACE_TOL, herm_tol=HERM_TOL, pos_tol=POS_TOL):
    """Raise :class:`ContractError` unless ``rho`` is a valid density matrix."""
    tr = rho.tr()
    if abs(tr - 1) > trace_tol:
        raise ContractError(f"trace {tr} differs from 1 by more than {trace_tol}")
    herm = rho.hermiticity_error()
    if herm > herm_tol:
        raise ContractError(f"density matrix not Hermitian (error {herm:.3g})")
    lam = np.linalg.eigvalsh(rho.data)
    if lam[0] < -pos_tol:
        raise ContractError(f"density matrix has eigenvalue {lam[0]:.3g}")
    return rho


def identity(layout: HilbertLayout | int) -> Operator:
    if not isinstance(layout, HilbertLayout):
        layout = HilbertLayout((int(layout),))
    return Operator(np.eye(layout.dim), layout)


def tensor(*ops: Operator) -> Operator:
    """Kronecker product with the leftmost factor outermost."""
    if not ops:
        raise ValueError("tensor needs at least one operand")
    data = reduce(np.kron, (o.data for o in ops))
    layout = reduce(lambda a, b: a + b, (o.layout for o in ops))
    return Operator(data, layout)


def ket(layout: HilbertLayout, *labels: int) -> np.ndarray:
    v = np.zeros(layout.dim, dtype=complex)
    v[layout.index(*labels)] = 1.0
    return v


def projector(vec, layout: HilbertLayout) -> Operator:
    vec = np.asarray(vec, dtype=complex)
    return Operator(np.outer(vec, vec.conj()), layout)


def partial_trace(rho: Operator, keep) -> Operator:
    """Trace out every factor not listed in ``keep``.

    The kept factors appear in their original relative order.  Returns a
    :class:`DensityMatrix` (unvalidated) when given one, else an Operator.
    """
    dims = rho.layout.factor_dims
    n = len(dims)
    keep = sorted(set(int(k) for k in keep))
    if not keep:
        raise ValueError("keep must name at least one factor")
    if any(k < 0 or k >= n for k in keep):
        raise ValueError(f"factor index out of range for layout {dims}")
    traced = [i for i in range(n) if i not in keep]

    t = rho.data.reshape(dims + dims)
    # einsum subscripts: row labels a.., column labels for kept factors get new letters
    letters = "abcdefghijklmnopqrstuvwxyz"
    row = letters[:n]
    col = "".join(row[i] if i in traced else letters[n + i] for i in range(n))
    out = "".join(row[i] for i in keep) + "".join(col[i] for i in keep)
    reduced = np.einsum(f"{row}{col}->{out}", t)
    kdims = tuple(dims[i] for i in keep)
    d = int(np.prod(kdims))
    layout = HilbertLayout(kdims)
    if isinstance(rho, DensityMatrix):
        return DensityMatrix(reduced.reshape(d, d), layout, validate=False)
    return Operator(reduced.reshape(d, d), layout)


def herm_eigs(a: Operator, tol: float = 1e-10):
    """Eigenvalues (ascending, real) and unitary eigenvector matrix of a Hermitian operator."""
    m = a.data if isinstance(a, Operator) else np.asarray(a, dtype=complex)
    err = float(np.max(np.abs(m - m.conj().T)))
    if err > tol:
        raise ContractError(f"operator is not Hermitian (error {err:.3g})")
    return np.linalg.eigh(m)


def expm(a, t: float = 1.0):
    """``exp(t * a)`` for an Operator or a plain square array.

    Delegates to scipy's Pade scaling-and-squaring; the kind of ``a`` is
    preserved.
    """
    if isinstance(a, Operator):
        return Operator(scipy.linalg.expm(t * a.data), a.layout)
    return scipy.linalg.expm(t * np.asarray(a, dtype=complex))


# single-mode / single-qubit building blocks

def destroy(n: int) -> np.ndarray:
    """Truncated annihilation operator on photon numbers 0..n-1."""
    return np.diag(np.sqrt(np.arange(1, n)), 1).astype(complex)


SIGMA_MINUS = np.array([[0, 1], [0, 0]], dtype=complex)  # |-><+|
SIGMA_PLUS = SIGMA_MINUS.T.copy()
SIGMA_Z = np.diag([-1.0, 1.0]).astype(complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
