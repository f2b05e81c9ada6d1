import math

import numpy as np
import pytest

from cavityqc.errors import InvalidParameterError, UnsupportedConfigurationError
from cavityqc.jch_model import SystemParams, build_jch_hamiltonian
from cavityqc.polariton import (
    build_polariton_map, effective_xy_hamiltonian, fit_effective_coupling, polariton_frame_hamiltonian,
    polariton_state, reduction_infidelity, vacuum_state,
)


def _basis(bits):
    v = np.zeros(1 << len(bits), dtype=complex)
    v[int(bits, 2)] = 1
    return v


def test_polariton_states_are_jc_eigenstates():
    p = SystemParams(N=1, g=2.0, n_max=3)
    H = build_jch_hamiltonian(p).matrix
    for n in (1, 2, 3):
        for sign, s in (("+", 1), ("-", -1)):
            v = polariton_state(n, sign, 3)
            assert np.linalg.norm(v) == pytest.approx(1.0)
            assert np.allclose(H @ v, s * 2.0 * math.sqrt(n) * v, atol=1e-12)
    assert abs(np.vdot(polariton_state(1, "+", 3), polariton_state(1, "-", 3))) < 1e-15
    assert np.allclose(H @ vacuum_state(3), 0)


def test_polariton_state_errors():
    with pytest.raises(InvalidParameterError):
        polariton_state(0, "+", 2)
    with pytest.raises(InvalidParameterError):
        polariton_state(1, "x", 2)


def test_map_is_isometry():
    pm = build_polariton_map(SystemParams(N=3, n_max=2))
    W = pm.isometry
    assert W.shape == (216, 8)
    assert np.allclose(W.conj().T @ W, np.eye(8))
    psi = _basis("101")
    assert pm.leakage(pm.embed_state(psi)) < 1e-14
    assert np.allclose(pm.project(pm.embed_state(psi)), psi)


def test_map_needs_resonance():
    with pytest.raises(UnsupportedConfigurationError):
        build_polariton_map(SystemParams(N=2, omega_d=1.0, omega_0=1.1))


def test_polariton_frame_removes_lower_polariton_energy():
    p = SystemParams(N=1, g=5.0, n_max=2)
    Hp = polariton_frame_hamiltonian(p).matrix
    v = polariton_state(1, "-", 2)
    assert np.allclose(Hp @ v, 0, atol=1e-12)


def test_effective_xy_two_site_splitting():
    H = effective_xy_hamiltonian(0.25, 2).matrix
    one = H[np.ix_([1, 2], [1, 2])]
    assert np.allclose(np.linalg.eigvalsh(one), [-0.5, 0.5])
    with pytest.raises(InvalidParameterError):
        effective_xy_hamiltonian(1.0, 1)


@pytest.mark.parametrize("g", [10.0, 30.0, 100.0, 300.0])
def test_fitted_coupling_is_half_hopping(g):
    c = fit_effective_coupling(SystemParams(N=2, g=g, A=1.0, n_max=2))
    assert c.t_eff == pytest.approx(0.5, abs=1e-9)
    assert c.J_xy == pytest.approx(0.25, abs=1e-9)


def test_fitted_coupling_scales_with_A():
    c = fit_effective_coupling(SystemParams(N=2, g=100.0, A=0.2, n_max=2))
    assert c.t_eff == pytest.approx(0.1, abs=1e-9)


def test_fitted_coupling_zero_hopping():
    assert fit_effective_coupling(SystemParams(N=2, g=10.0, A=0.0)).t_eff == 0.0


def test_fit_requires_two_photon_cutoff():
    with pytest.raises(InvalidParameterError):
        fit_effective_coupling(SystemParams(N=2, n_max=1))


# frozen from exact diagonalization of the three-site lattice
REDUCTION_ORACLE = {10.0: (0.0037060292917905358, 0.0006962202978177956),
                    100.0: (5.4441825320439285e-05, 2.3632536731321707e-05)}


@pytest.mark.parametrize("g", sorted(REDUCTION_ORACLE))
def test_reduction_infidelity_oracle(g):
    p = SystemParams(N=3, g=g)
    t = math.pi / (math.sqrt(2) * fit_effective_coupling(p).t_eff)
    infid, leak = reduction_infidelity(p, t, _basis("100"))
    assert infid == pytest.approx(REDUCTION_ORACLE[g][0], rel=1e-6)
    assert leak == pytest.approx(REDUCTION_ORACLE[g][1], rel=1e-6)
    assert leak <= infid


def test_reduction_trivial_at_time_zero():
    infid, leak = reduction_infidelity(SystemParams(N=3, g=10.0), 0.0, _basis("010"))
    assert infid < 1e-14 and leak < 1e-14


def test_reduction_rejects_bad_state():
    with pytest.raises(InvalidParameterError):
        reduction_infidelity(SystemParams(N=3), 1.0, _basis("10"))
