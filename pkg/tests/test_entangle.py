import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from darkstate import analytic, entangle, lindblad, model
from darkstate.errors import NoSupportError
from darkstate.qops import HilbertLayout, ket, projector

from conftest import random_density, random_unitary

QQ = HilbertLayout((2, 2))


def x_state_concurrence(rho):
    """Closed form for states with only the X-shaped entries populated."""
    a, b, c, d = np.real(np.diag(rho))
    z, w = abs(rho[1, 2]), abs(rho[0, 3])
    return 2 * max(0.0, z - np.sqrt(a * d), w - np.sqrt(b * c))


def test_singlet_is_maximal():
    assert entangle.wootters_concurrence(entangle.bell_singlet()) == pytest.approx(1, abs=1e-12)


def test_product_states_are_zero():
    rng = np.random.default_rng(0)
    for _ in range(10):
        rho = np.kron(random_density(rng, 2), random_density(rng, 2))
        assert entangle.wootters_concurrence(rho) <= 1e-12


@pytest.mark.parametrize("p", [0.0, 0.2, 1 / 3, 0.5, 0.8, 1.0])
def test_werner(p):
    phi = (ket(QQ, 0, 0) + ket(QQ, 1, 1)) / np.sqrt(2)
    rho = p * np.outer(phi, phi.conj()) + (1 - p) * np.eye(4) / 4
    assert entangle.wootters_concurrence(rho) == pytest.approx(max(0, (3 * p - 1) / 2), abs=1e-12)


def test_werner_half():
    phi = (ket(QQ, 0, 0) + ket(QQ, 1, 1)) / np.sqrt(2)
    rho = 0.5 * np.outer(phi, phi.conj()) + 0.5 * np.eye(4) / 4
    assert entangle.wootters_concurrence(rho) == pytest.approx(0.25, abs=1e-12)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_local_unitary_invariance(seed):
    rng = np.random.default_rng(seed)
    rho = random_density(rng, 4, rank=2)
    u = np.kron(random_unitary(rng, 2), random_unitary(rng, 2))
    c0 = entangle.wootters_concurrence(rho)
    c1 = entangle.wootters_concurrence(u @ rho @ u.conj().T)
    assert abs(c0 - c1) <= 1e-10


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_x_states(seed):
    rng = np.random.default_rng(seed)
    full = random_density(rng, 4)
    mask = np.eye(4) + np.fliplr(np.eye(4))
    rho = full * mask  # an X-pattern compression of a PSD matrix stays PSD
    assert entangle.wootters_concurrence(rho) == pytest.approx(x_state_concurrence(rho), abs=1e-10)


def test_conditional_state_initial(layout):
    atoms, norm = entangle.conditional_state(model.initial_state(layout))
    assert norm == pytest.approx(1)
    expected = 0.5 * (projector(ket(QQ, 1, 0), QQ).data + projector(ket(QQ, 0, 1), QQ).data)
    assert np.max(np.abs(atoms.data - expected)) <= 1e-15


def test_conditional_state_asymptotic(layout):
    atoms, norm = entangle.conditional_state(analytic.asymptotic_state(layout))
    assert norm == pytest.approx(0.5, abs=1e-15)
    assert np.max(np.abs(atoms.data - entangle.bell_singlet().data)) <= 1e-15


def test_conditional_state_needs_support(layout):
    with pytest.raises(NoSupportError):
        entangle.conditional_state(projector(ket(layout, 0, 0, 0), layout))


def test_conditional_state_keeps_photon(layout):
    rho = projector(ket(layout, 1, 0, 0), layout)
    atoms, norm = entangle.conditional_state(rho)
    assert norm == 1 and atoms.data[0, 0] == 1


def test_conditional_concurrence_values():
    assert entangle.conditional_concurrence(np.diag([0, 0.5, 0.5, 0])) == 0
    assert entangle.conditional_concurrence(np.diag([0.5, 0, 0.5, 0])) == 1
    with pytest.raises(NoSupportError):
        entangle.conditional_concurrence(np.diag([1.0, 0, 0, 0]))


def test_conditional_concurrence_is_wootters_of_conditional_state(fig1, unitary):
    s = analytic.solve_constants(fig1)
    for t in np.linspace(0.01, 100, 60):
        rt = s.rho_tilde(t)
        atoms, norm = entangle.conditional_state(analytic.back_transform(rt, unitary))
        assert norm == pytest.approx(rt[1, 1].real + rt[2, 2].real + rt[3, 3].real, abs=1e-14)
        assert entangle.conditional_concurrence(rt) == pytest.approx(entangle.wootters_concurrence(atoms), abs=1e-10)


def test_fidelity():
    rng = np.random.default_rng(3)
    a, b = random_density(rng, 4), random_density(rng, 4, rank=2)
    assert entangle.fidelity(a, a) == pytest.approx(1, abs=1e-12)
    assert entangle.fidelity(a, b) == pytest.approx(entangle.fidelity(b, a), abs=1e-10)
    p0, p1 = projector(ket(QQ, 0, 0), QQ), projector(ket(QQ, 0, 1), QQ)
    assert entangle.fidelity(p0, p1) <= 1e-15
    # pure-state overlap
    psi = random_unitary(rng, 4)[:, 0]
    assert entangle.fidelity(np.outer(psi, psi.conj()), a) == pytest.approx((psi.conj() @ a @ psi).real, abs=1e-12)


def test_fidelity_to_asymptotic_state(liouvillian, layout):
    late = lindblad.evolve_expm(liouvillian, model.initial_state(layout), 200.0)
    assert entangle.fidelity(late, analytic.asymptotic_state(layout)) >= 1 - 1e-6


def test_concurrence_trace_reference_parameters(fig1):
    s = analytic.solve_constants(fig1)
    times = np.linspace(0, 100, 4001)
    c = np.array([entangle.conditional_concurrence(r) for r in s.rho_tilde(times)])
    assert c[0] == 0
    early = c[times <= 60]
    peaks = np.sum((early[1:-1] > early[:-2]) & (early[1:-1] > early[2:]))
    assert peaks >= 10
    assert c[-1] >= 0.999
