import math

import numpy as np
import pytest
import scipy.linalg as sla
from hypothesis import given, strategies as st

from cavityqc.dynamics import (
    check_density, evolve_lindblad, evolve_lindblad_exact, evolve_unitary, gate_time, lindblad_superoperator,
    propagator, pure_density, trace_distance,
)
from cavityqc.errors import InvalidParameterError, NumericalFailureError
from cavityqc.jch_model import SystemParams, collapse_operators, photon_numbers
from cavityqc.operators import LocalSpace


def _random_hermitian(rng, d):
    m = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return (m + m.conj().T) / 2


def _random_density(rng, d):
    m = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    r = m @ m.conj().T
    return r / np.trace(r)


def test_gate_time():
    assert gate_time(1.0) == pytest.approx(math.pi / (2 * math.sqrt(2)))
    with pytest.raises(InvalidParameterError):
        gate_time(0.0)


def test_propagator_matches_expm(rng):
    H = _random_hermitian(rng, 5)
    assert np.allclose(propagator(H, 0.7), sla.expm(-0.7j * H), atol=1e-12)


@given(st.integers(0, 2**32 - 1), st.floats(0.0, 5.0))
def test_unitary_evolution_preserves_norm(seed, t):
    rng = np.random.default_rng(seed)
    H = _random_hermitian(rng, 4)
    psi = rng.normal(size=4) + 1j * rng.normal(size=4)
    psi /= np.linalg.norm(psi)
    assert np.linalg.norm(evolve_unitary(H, psi, t)) == pytest.approx(1.0, abs=1e-12)


def test_trace_distance_and_density_checks(rng):
    r = _random_density(rng, 3)
    assert trace_distance(r, r) < 1e-14
    a, b = pure_density([1, 0]), pure_density([0, 1])
    assert trace_distance(a, b) == pytest.approx(1.0)
    check_density(r)
    with pytest.raises(InvalidParameterError):
        check_density(2 * r)
    with pytest.raises(InvalidParameterError):
        check_density(np.diag([1.5, -0.5]))


def test_zero_rate_lindblad_is_unitary(rng):
    H = _random_hermitian(rng, 4)
    psi = rng.normal(size=4) + 0j
    psi /= np.linalg.norm(psi)
    rho = evolve_lindblad(H, [], pure_density(psi), 2.0, 0.5)
    out = evolve_unitary(H, psi, 2.0)
    assert np.allclose(rho, np.outer(out, out.conj()), atol=1e-12)


def test_rk4_agrees_with_krylov(rng):
    H = _random_hermitian(rng, 4)
    L1 = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    L2 = np.diag(rng.normal(size=4))
    cops = [(0.3, L1), (0.7, L2)]
    rho0 = _random_density(rng, 4)
    a = evolve_lindblad(H, cops, rho0, 1.5, 0.1, tol=1e-10)
    b = evolve_lindblad_exact(H, cops, rho0, 1.5)
    assert trace_distance(a, b) < 1e-8
    check_density(a)


def test_batch_evolution_is_linear(rng):
    H = _random_hermitian(rng, 3)
    cops = [(0.5, np.diag([0, 1, 0]).astype(complex))]
    r1, r2 = _random_density(rng, 3), _random_density(rng, 3)
    batch = evolve_lindblad(H, cops, np.array([r1, r2, 0.3 * r1 + 0.7 * r2]), 1.0, 0.25)
    assert np.allclose(batch[2], 0.3 * batch[0] + 0.7 * batch[1], atol=1e-9)


def test_superoperator_annihilates_steady_state():
    # single decaying level: the ground state is stationary
    L = lindblad_superoperator(np.zeros((2, 2)), [(1.0, np.array([[0, 1], [0, 0]]))])
    g = np.array([[1, 0], [0, 0]], dtype=complex).reshape(-1)
    assert np.allclose(L @ g, 0)


@pytest.mark.parametrize("kappa", [0.5, 1.0, 2.0])
def test_damped_cavity_mean_photon_number(kappa):
    p = SystemParams(N=1, g=0.0, n_max=4, kappa=kappa)
    s = LocalSpace(p.n_max)
    psi = np.zeros(p.dim, dtype=complex)
    psi[s.index(0, 3)] = 1.0
    n_op = np.diag(photon_numbers(p))
    for t in (0.3, 1.0, 2.5):
        rho, info = evolve_lindblad(np.zeros((p.dim, p.dim)), collapse_operators(p), pure_density(psi), t, t / 4,
                                    return_info=True)
        assert np.trace(n_op @ rho).real == pytest.approx(3 * math.exp(-kappa * t), abs=1e-6)
        check_density(rho)
        assert info["steps"] >= 4


def test_lindblad_argument_errors(rng):
    H = _random_hermitian(rng, 2)
    rho = pure_density([1, 0])
    with pytest.raises(InvalidParameterError):
        evolve_lindblad(H, [], rho, 1.0, 2.0)
    with pytest.raises(InvalidParameterError):
        evolve_lindblad(H, [], np.eye(3) / 3, 1.0, 0.1)
    assert np.array_equal(evolve_lindblad(H, [], rho, 0.0, 0.1), rho)


def test_lindblad_refinement_failure_is_reported(rng):
    H = 50 * _random_hermitian(rng, 3)
    cops = [(40.0, rng.normal(size=(3, 3)))]
    with pytest.raises(NumericalFailureError):
        evolve_lindblad(H, cops, _random_density(rng, 3), 5.0, 5.0, tol=1e-14, max_halvings=1)
