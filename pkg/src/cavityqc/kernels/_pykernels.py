"""Numpy implementations of the state-vector kernels.

Qubit 0 is the most significant bit of the basis index. All functions return
new arrays and never modify their inputs.
"""

import numpy as np


def _check(psi, n_qubits, qubit, width=1):
    if psi.shape != (1 << n_qubits,):
        raise ValueError(f"state of shape {psi.shape} is not a {n_qubits}-qubit vector")
    if not 0 <= qubit <= n_qubits - width:
        raise ValueError(f"qubit {qubit} (width {width}) out of range for {n_qubits} qubits")


def apply_1q(psi, n_qubits, qubit, u):
    psi = np.ascontiguousarray(psi, dtype=complex)
    _check(psi, n_qubits, qubit)
    u = np.asarray(u, dtype=complex)
    t = psi.reshape(1 << qubit, 2, -1)
    return np.einsum("ab,ibj->iaj", u, t).reshape(-1)


def apply_3q(psi, n_qubits, first, u):
    psi = np.ascontiguousarray(psi, dtype=complex)
    _check(psi, n_qubits, first, 3)
    u = np.asarray(u, dtype=complex)
    t = psi.reshape(1 << first, 8, -1)
    return np.einsum("ab,ibj->iaj", u, t).reshape(-1)


def prob_one(psi, n_qubits, qubit):
    psi = np.ascontiguousarray(psi, dtype=complex)
    _check(psi, n_qubits, qubit)
    t = psi.reshape(1 << qubit, 2, -1)[:, 1, :]
    return float(np.vdot(t, t).real)


def project(psi, n_qubits, qubit, bit):
    if bit not in (0, 1):
        raise ValueError(f"bit must be 0 or 1, got {bit}")
    psi = np.array(psi, dtype=complex)
    _check(psi, n_qubits, qubit)
    t = psi.reshape(1 << qubit, 2, -1)
    t[:, 1 - bit, :] = 0
    return psi
