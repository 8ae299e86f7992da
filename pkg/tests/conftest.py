import numpy as np
import pytest

from darkstate import lindblad, model

ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def fig1():
    return model.SystemParams.figure1()


@pytest.fixture(scope="session")
def layout(fig1):
    return fig1.layout


@pytest.fixture(scope="session")
def liouvillian(fig1):
    return lindblad.assemble_liouvillian(model.build_hac(fig1), model.build_dissipators(fig1))


@pytest.fixture(scope="session")
def transformed_liouvillian(fig1):
    return lindblad.assemble_liouvillian(
        model.transformed_hamiltonian(fig1), model.build_transformed_dissipators(fig1)
    )


@pytest.fixture(scope="session")
def unitary(layout):
    return model.collective_unitary(layout)


@pytest.fixture(scope="session")
def rk_trajectory(liouvillian, layout):
    """Original-frame RK4 run, t in [0, 100], output every 0.05, step 1e-3."""
    times = np.linspace(0, 100, 2001)
    return lindblad.evolve_rk(liouvillian, model.initial_state(layout), times, h_max=1e-3)


def random_hermitian(rng, n):
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return (a + a.conj().T) / 2


def random_density(rng, n, rank=None):
    rank = rank or n
    a = rng.normal(size=(n, rank)) + 1j * rng.normal(size=(n, rank))
    rho = a @ a.conj().T
    return rho / np.trace(rho).real


def random_unitary(rng, n):
    q, r = np.linalg.qr(rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n)))
    return q * (np.diag(r) / np.abs(np.diag(r)))


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
