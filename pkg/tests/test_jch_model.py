import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from cavityqc.errors import InvalidParameterError, ResourceLimitError, UnsupportedConfigurationError
from cavityqc.jch_model import (
    SystemParams, bloch_transform, build_jch_hamiltonian, check_dimension, collapse_operators,
    dispersion, excitation_numbers, excitation_operator, hopping_matrix, jc_single_site_spectrum,
)


def test_params_validation():
    with pytest.raises(InvalidParameterError):
        SystemParams(N=0)
    with pytest.raises(InvalidParameterError):
        SystemParams(kappa=-1)
    with pytest.raises(InvalidParameterError):
        SystemParams(boundary="twisted")
    with pytest.raises(InvalidParameterError):
        SystemParams(g=float("nan"))


def test_dimensions_and_bonds():
    p = SystemParams(N=3, n_max=2)
    assert p.site_dim == 6 and p.dim == 216
    assert p.bonds() == [(0, 1), (1, 2)]
    assert p.replace(boundary="periodic").bonds() == [(0, 1), (1, 2), (2, 0)]


def test_dispersion_examples():
    p = SystemParams(N=8, omega_d=1.0, A=0.01, boundary="periodic")
    assert dispersion(2, p) == 1.0
    assert dispersion(0, p) == pytest.approx(1.02)
    with pytest.raises(UnsupportedConfigurationError):
        dispersion(0, p.replace(boundary="open"))
    with pytest.raises(InvalidParameterError):
        dispersion(8, p)


@given(st.integers(2, 12))
def test_bloch_diagonalizes_ring(N):
    p = SystemParams(N=N, omega_d=0.3, A=0.7, g=0.0, boundary="periodic")
    F = bloch_transform(N).matrix
    assert np.allclose(F.conj().T @ F, np.eye(N), atol=1e-12)
    D = F @ hopping_matrix(p) @ F.conj().T
    assert np.allclose(D, np.diag([dispersion(k, p) for k in range(N)]), atol=1e-12)


def test_dimension_cap():
    check_dimension(SystemParams(N=3, n_max=2), 216)
    with pytest.raises(ResourceLimitError):
        check_dimension(SystemParams(N=3, n_max=2), 215)
    with pytest.raises(ResourceLimitError):
        build_jch_hamiltonian(SystemParams(N=5, n_max=2), cap_dim=1000)


@pytest.mark.parametrize("boundary", ["open", "periodic"])
def test_hamiltonian_hermitian_and_conserves_excitations(boundary):
    p = SystemParams(N=3, n_max=2, omega_d=1.3, omega_0=0.9, g=0.4, A=0.2, boundary=boundary)
    H = build_jch_hamiltonian(p)
    assert H.is_hermitian()
    Nx = excitation_operator(p).matrix
    assert np.max(np.abs(H.matrix @ Nx - Nx @ H.matrix)) < 1e-12


def test_single_site_spectrum_resonant():
    p = SystemParams(N=1, omega_d=1.0, omega_0=1.0, g=0.1, n_max=2)
    levels = jc_single_site_spectrum(p)
    by_n = {n: sorted(e for e, k in levels if k == n) for n in (0, 1, 2)}
    assert by_n[0] == [0.0]
    for n in (1, 2):
        assert by_n[n] == pytest.approx([n - 0.1 * math.sqrt(n), n + 0.1 * math.sqrt(n)], abs=1e-12)


def test_single_site_spectrum_detuned():
    wd, w0, g = 1.0, 1.2, 0.1
    levels = jc_single_site_spectrum(SystemParams(N=1, omega_d=wd, omega_0=w0, g=g, n_max=2))
    ones = sorted(e for e, k in levels if k == 1)
    delta = wd - w0
    r = math.sqrt(delta**2 / 4 + g**2)
    assert ones == pytest.approx([wd - delta / 2 - r, wd - delta / 2 + r], abs=1e-12)


def test_single_site_spectrum_requires_one_site():
    with pytest.raises(InvalidParameterError):
        jc_single_site_spectrum(SystemParams(N=2))


def test_excitation_numbers_site_ordering():
    p = SystemParams(N=2, n_max=1)
    exc = excitation_numbers(p)
    # site 0 is the slowest index; |g0,g1> with one photon on site 1 is index 1
    assert exc[0] == 0 and exc[1] == 1 and exc[p.site_dim] == 1


def test_collapse_operators_rates():
    p = SystemParams(N=2, n_max=1, kappa=0.3, gamma=0.2)
    ops = collapse_operators(p)
    assert [r for r, _ in ops] == [0.3, 0.3, 0.2, 0.2]
    assert all(op.shape == (p.dim, p.dim) for _, op in ops)
