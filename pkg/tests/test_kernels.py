import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.stats import unitary_group

from cavityqc import kernels

BACKENDS = kernels.available_backends()


def _state(rng, n):
    v = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
    return v / np.linalg.norm(v)


def _dense_1q(u, q, n):
    return np.kron(np.kron(np.eye(1 << q), u), np.eye(1 << (n - q - 1)))


def test_compiled_backend_built():
    # the editable install builds the extension; the fallback must exist regardless
    assert "python" in BACKENDS
    assert kernels.BACKEND in BACKENDS


@pytest.mark.parametrize("name", BACKENDS)
def test_apply_1q_matches_dense(name, rng):
    k = kernels.get_backend(name)
    for n in (1, 3, 5):
        psi = _state(rng, n)
        u = unitary_group.rvs(2, random_state=rng)
        for q in range(n):
            assert np.allclose(k.apply_1q(psi, n, q, u), _dense_1q(u, q, n) @ psi, atol=1e-13)


@pytest.mark.parametrize("name", BACKENDS)
def test_apply_3q_matches_dense(name, rng):
    k = kernels.get_backend(name)
    n = 5
    psi = _state(rng, n)
    u = unitary_group.rvs(8, random_state=rng)
    for first in range(n - 2):
        dense = np.kron(np.kron(np.eye(1 << first), u), np.eye(1 << (n - first - 3)))
        assert np.allclose(k.apply_3q(psi, n, first, u), dense @ psi, atol=1e-13)


@pytest.mark.parametrize("name", BACKENDS)
def test_measurement_kernels(name, rng):
    k = kernels.get_backend(name)
    n = 4
    psi = _state(rng, n)
    for q in range(n):
        p1 = k.prob_one(psi, n, q)
        proj1 = _dense_1q(np.diag([0, 1]), q, n) @ psi
        assert p1 == pytest.approx(np.linalg.norm(proj1) ** 2, abs=1e-14)
        assert np.allclose(k.project(psi, n, q, 1), proj1)
        assert np.allclose(k.project(psi, n, q, 0) + k.project(psi, n, q, 1), psi)


@pytest.mark.parametrize("name", BACKENDS)
def test_kernel_argument_errors(name):
    k = kernels.get_backend(name)
    psi = np.ones(8, dtype=complex) / np.sqrt(8)
    with pytest.raises(ValueError):
        k.apply_1q(psi, 3, 3, np.eye(2))
    with pytest.raises(ValueError):
        k.apply_3q(psi, 3, 1, np.eye(8))
    with pytest.raises(ValueError):
        k.prob_one(psi[:7], 3, 0)
    with pytest.raises(ValueError):
        k.project(psi, 3, 0, 2)


def test_inputs_are_not_modified(rng):
    psi = _state(rng, 3)
    ro = psi.copy()
    ro.setflags(write=False)
    for name in BACKENDS:
        out = kernels.get_backend(name).apply_1q(ro, 3, 1, np.eye(2))
        assert out is not ro and np.array_equal(out, psi)


@pytest.mark.skipif("compiled" not in BACKENDS, reason="extension not built")
@given(st.integers(1, 6), st.integers(0, 2**32 - 1))
def test_backend_parity(n, seed):
    rng = np.random.default_rng(seed)
    c, p = kernels.get_backend("compiled"), kernels.get_backend("python")
    psi = _state(rng, n)
    q = int(rng.integers(n))
    u = unitary_group.rvs(2, random_state=rng)
    assert np.allclose(c.apply_1q(psi, n, q, u), p.apply_1q(psi, n, q, u), atol=1e-14)
    assert c.prob_one(psi, n, q) == pytest.approx(p.prob_one(psi, n, q), abs=1e-14)
    assert np.array_equal(c.project(psi, n, q, 0), p.project(psi, n, q, 0))
    if n >= 3:
        f = int(rng.integers(n - 2))
        u8 = unitary_group.rvs(8, random_state=rng)
        assert np.allclose(c.apply_3q(psi, n, f, u8), p.apply_3q(psi, n, f, u8), atol=1e-13)


def test_env_var_forces_fallback():
    env = dict(os.environ, CAVITYQC_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", "import cavityqc.kernels as k; print(k.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"


def test_unknown_backend():
    with pytest.raises(ValueError):
        kernels.get_backend("gpu")
