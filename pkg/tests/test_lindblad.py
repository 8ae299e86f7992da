import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from darkstate import analytic, lindblad, model
from darkstate.errors import IntegrationError
from darkstate.lindblad import Superoperator, vec
from darkstate.model import SystemParams
from darkstate.qops import Operator, cavity_layout, ket, projector

from conftest import random_hermitian

LAY = cavity_layout(1)
ZERO_H = Operator(np.zeros((8, 8)), LAY)


def build_L(p, layout=None):
    layout = layout or p.layout
    return lindblad.assemble_liouvillian(model.build_hac(p, layout), model.build_dissipators(p, layout))


def test_zero_generator():
    L = lindblad.assemble_liouvillian(ZERO_H)
    assert np.count_nonzero(L.matrix) == 0


def test_column_stacking_convention():
    rng = np.random.default_rng(0)
    a, x, b = (rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3)) for _ in range(3))
    assert np.allclose(np.kron(b.T, a) @ vec(x), vec(a @ x @ b), atol=1e-13)


def test_matches_direct_rhs(liouvillian, fig1, layout):
    rng = np.random.default_rng(1)
    rho = random_hermitian(rng, 8)
    h = model.build_hac(fig1).data
    direct = -1j * (h @ rho - rho @ h)
    for rate, l, r in model.build_dissipators(fig1).literal:
        l, r = l.data, r.data
        rd = r.conj().T
        direct += rate * (2 * l @ rho @ rd - rd @ l @ rho - rho @ rd @ l)
    assert np.max(np.abs(liouvillian(rho).data - direct)) <= 1e-13


def test_trace_and_hermiticity_preservation(liouvillian):
    assert np.max(np.abs(vec(np.eye(8)).conj() @ liouvillian.matrix)) <= 1e-12
    rng = np.random.default_rng(2)
    for _ in range(5):
        rho = random_hermitian(rng, 8)
        out = liouvillian(rho).data
        assert np.max(np.abs(out - out.conj().T)) <= 1e-12


def test_asymptotic_state_is_stationary(liouvillian, layout):
    assert liouvillian.residual(analytic.asymptotic_state(layout)) <= 1e-10


def test_dimension_mismatch():
    with pytest.raises(ValueError):
        lindblad.assemble_liouvillian(ZERO_H, model.build_dissipators(SystemParams(kappa=1), cavity_layout(2)))
    with pytest.raises(ValueError):
        lindblad.assemble_liouvillian(Operator(np.array([[0, 1], [0, 0]])))
    with pytest.raises(ValueError):
        Superoperator(np.zeros((4, 4)), LAY)


def test_rk4_step_matrix_matches_stages():
    rng = np.random.default_rng(3)
    lmat = rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6))
    v = rng.normal(size=6) + 0j
    assert np.max(np.abs(lindblad.rk4_step_matrix(lmat, 0.07) @ v - lindblad.rk4_step(lmat, v, 0.07))) <= 1e-14


def test_constant_trajectory():
    L = lindblad.assemble_liouvillian(ZERO_H)
    rho0 = model.initial_state(LAY)
    traj = lindblad.evolve_rk(L, rho0, np.linspace(0, 5, 11))
    assert all(np.array_equal(s.data, rho0.data) for s in traj.states)


def test_pure_cavity_decay():
    k = 0.3
    L = lindblad.assemble_liouvillian(ZERO_H, model.build_dissipators(SystemParams(kappa=k), LAY))
    rho0 = projector(ket(LAY, 1, 0, 0), LAY)
    times = np.linspace(0, 10, 21)
    traj = lindblad.evolve_rk(L, rho0, times)
    pop = np.array([s.data[4, 4].real for s in traj.states])
    assert np.max(np.abs(pop - np.exp(-2 * k * times))) <= 1e-8


def test_bad_grids():
    L = lindblad.assemble_liouvillian(ZERO_H)
    rho0 = model.initial_state(LAY)
    for grid in ([0.5, 1.0], [0, 1, 1], [0, 2, 1], []):
        with pytest.raises(ValueError):
            lindblad.evolve_rk(L, rho0, grid)


def test_trace_drift_raises():
    # a deliberately non-trace-preserving generator
    L = Superoperator(-0.1 * np.eye(64), LAY)
    with pytest.raises(IntegrationError):
        lindblad.evolve_rk(L, model.initial_state(LAY), [0, 1.0])


def test_small_trace_drift_is_renormalised_and_recorded():
    L = Superoperator(-1e-9 * np.eye(64), LAY)
    traj = lindblad.evolve_rk(L, model.initial_state(LAY), [0, 0.5, 1.0])
    assert traj.renormalized
    assert 1e-12 < traj.max_trace_drift < 1e-6
    assert abs(traj.states[-1].tr() - 1) <= 1e-15


def test_evolve_expm_basics(liouvillian, layout):
    rho0 = model.initial_state(layout)
    assert np.array_equal(lindblad.evolve_expm(liouvillian, rho0, 0).data, rho0.data)
    with pytest.raises(ValueError):
        lindblad.evolve_expm(liouvillian, rho0, -1)


def test_expm_matches_rk_at_10(liouvillian, rk_trajectory, layout):
    ref = lindblad.evolve_expm(liouvillian, model.initial_state(layout), 10.0)
    assert np.max(np.abs(ref.data - rk_trajectory.states[200].data)) <= 1e-8


@settings(max_examples=10, deadline=None)
@given(st.floats(0, 20), st.floats(0, 20))
def test_expm_semigroup(t1, t2):
    L = build_L(SystemParams.figure1())
    rho0 = model.initial_state(LAY)
    once = lindblad.evolve_expm(L, rho0, t1 + t2)
    twice = lindblad.evolve_expm(L, lindblad.evolve_expm(L, rho0, t1), t2)
    assert np.max(np.abs(once.data - twice.data)) <= 1e-9


def test_steady_states_cavity_only():
    L = lindblad.assemble_liouvillian(
        Operator(np.zeros((2, 2))), model.DissipatorSpec([(0.5, Operator(np.array([[0, 1], [0, 0]])), Operator(np.array([[0, 1], [0, 0]])))])
    )
    ss = lindblad.steady_states(L)
    assert ss.dimension == 1
    assert np.allclose(ss.states[0].data, np.diag([1, 0]), atol=1e-12)


def test_steady_states_dark_manifold(liouvillian, layout):
    ss = lindblad.steady_states(liouvillian)
    assert ss.dimension == 2
    targets = [projector(ket(layout, 0, 0, 0), layout), projector(analytic.psi_t(layout), layout)]
    basis = np.array([vec(s.data) for s in ss.states]).T
    for target in targets:
        coef, *_ = np.linalg.lstsq(basis, vec(target.data), rcond=None)
        assert np.max(np.abs(basis @ coef - vec(target.data))) <= 1e-9
    # supports are shrunk to the extremal states themselves
    found = sorted(ss.states, key=lambda s: -s.data[0, 0].real)
    for s, t in zip(found, targets):
        assert np.max(np.abs(s.data - t.data)) <= 1e-9
    for s in ss.states:
        assert abs(s.tr() - 1) <= 1e-12
        assert np.linalg.eigvalsh(s.data)[0] >= -1e-9
        assert liouvillian.residual(s) <= 1e-9


def test_steady_states_independent_baths():
    L = build_L(SystemParams.figure1(f=0))
    ss = lindblad.steady_states(L)
    assert ss.dimension == 1
    assert np.allclose(ss.states[0].data, projector(ket(LAY, 0, 0, 0), LAY).data, atol=1e-10)


def test_spectral_gap(liouvillian, fig1):
    sol = analytic.solve_constants(fig1)
    gap = lindblad.spectral_gap(liouvillian)
    # slowest mode: vacuum / one-excitation coherence, half the slowest population rate
    assert gap == pytest.approx((sol.a_plus - sol.omega1) / 2, rel=1e-8)
    assert lindblad.spectral_gap(build_L(SystemParams(eta=0.5))) is None


def test_confinement(rk_trajectory):
    assert lindblad.confinement_check(rk_trajectory) <= 1e-12


def test_confinement_control_two_excitations(liouvillian, layout):
    rho0 = projector(ket(layout, 1, 1, 0), layout)
    traj = lindblad.evolve_rk(liouvillian, rho0, np.linspace(0, 1, 3))
    assert lindblad.confinement_check(traj) > 0.5


def test_confinement_higher_cutoff():
    p = SystemParams.figure1(fock_cutoff=2)
    traj = lindblad.evolve_rk(build_L(p), model.initial_state(p.layout), np.linspace(0, 20, 41))
    assert lindblad.confinement_check(traj) <= 1e-12


def test_conservation_report(rk_trajectory, layout):
    rep = lindblad.conservation_report(rk_trajectory, model.excitation_number(layout))
    assert rep["trace_drift"] <= 1e-10
    assert rep["hermiticity"] <= 1e-12
    assert rep["min_eigenvalue"] >= -1e-9
    assert rep["number_increase"] <= 1e-10
    assert rep["leakage"] <= 1e-12


def test_rho33_constant(rk_trajectory, unitary):
    r33 = [analytic.to_transformed(s, unitary)[2, 2].real for s in rk_trajectory.states]
    assert np.max(np.abs(np.array(r33) - 0.5)) <= 1e-9


def test_lab_frame_populations_agree():
    rot = SystemParams.figure1()
    lab = rot.replace(frame="lab", omega0=5.0)
    times = np.linspace(0, 4, 9)
    rho0 = model.initial_state(LAY)
    u = model.collective_unitary(LAY)
    a = lindblad.evolve_rk(build_L(rot), rho0, times, h_max=1e-3)
    b = lindblad.evolve_rk(build_L(lab), rho0, times, h_max=1e-3)
    for x, y in zip(a.states, b.states):
        # no coherences between excitation sectors, so the one-excitation block is frame independent
        assert np.max(np.abs(analytic.to_transformed(x, u) - analytic.to_transformed(y, u))) <= 1e-9


def test_trajectory_observe(rk_trajectory):
    vals = rk_trajectory.observe("trace", lambda s: s.tr().real)
    assert len(vals) == len(rk_trajectory)
    assert "trace" in rk_trajectory.observables
