"""Lower-polariton qubits and their effective XY description.

Logical ``|0>_k`` is the empty site ``|g, 0>`` and logical ``|1>_k`` is the
lower polariton ``|1->_k = (|g, 1> - |e, 0>) / sqrt(2)``. Inside the
one-excitation-per-site manifold the lattice behaves like an XY chain

    H_eff = J sum_k (X_k X_{k+1} + Y_k Y_{k+1}) = t_eff sum_k (s+_k s-_{k+1} + h.c.)

with ``J = t_eff / 2``. ``t_eff`` is obtained from an exact two-site
diagonalization instead of being assumed.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce

import numpy as np

from .dynamics import evolve_unitary
from .errors import FitFailureError, InvalidParameterError, UnsupportedConfigurationError
from .jch_model import (
    DEFAULT_CAP_DIM,
    SystemParams,
    build_jch_hamiltonian,
    excitation_numbers,
    excitation_operator,
)
from .operators import LocalSpace, Operator, embed, pauli


def polariton_state(n: int, sign: str, n_max: int) -> np.ndarray:
    """Single-site polariton ``(|g, n> +/- |e, n-1>) / sqrt(2)``."""
    if sign not in ("+", "-"):
        raise InvalidParameterError(f"sign must be '+' or '-', got {sign!r}")
    if int(n) != n or not 1 <= n <= n_max:
        raise InvalidParameterError(f"polariton number n={n} outside [1, {n_max}]")
    space = LocalSpace(n_max)
    v = np.zeros(space.dim, dtype=complex)
    v[space.index(0, n)] = 1 / np.sqrt(2)
    v[space.index(1, n - 1)] = (1 if sign == "+" else -1) / np.sqrt(2)
    return v


def vacuum_state(n_max: int) -> np.ndarray:
    space = LocalSpace(n_max)
    v = np.zeros(space.dim, dtype=complex)
    v[space.index(0, 0)] = 1.0
    return v


@dataclass(frozen=True)
class PolaritonMap:
    """Isometry from ``2^N`` logical states into the lattice Hilbert space."""

    params: SystemParams
    isometry: np.ndarray  # shape (dim, 2**N), columns in logical binary order

    def embed_state(self, logical) -> np.ndarray:
        return self.isometry @ np.asarray(logical, dtype=complex)

    def project(self, full) -> np.ndarray:
        """Logical amplitudes ``isometry^dag @ full`` (not renormalized)."""
        return self.isometry.conj().T @ np.asarray(full, dtype=complex)

    def leakage(self, full) -> float:
        full = np.asarray(full, dtype=complex)
        return float(max(0.0, np.vdot(full, full).real - np.linalg.norm(self.project(full)) ** 2))


def _require_resonance(params: SystemParams):
    if not params.resonant:
        raise UnsupportedConfigurationError(
            f"polariton qubits need omega_0 == omega_d (got {params.omega_0} vs {params.omega_d})"
        )


def build_polariton_map(params: SystemParams) -> PolaritonMap:
    _require_resonance(params)
    site = np.stack([vacuum_state(params.n_max), polariton_state(1, "-", params.n_max)], axis=1)
    iso = reduce(np.kron, [site] * params.N)
    return PolaritonMap(params, iso)


def polariton_frame_hamiltonian(params: SystemParams, cap_dim: int | None = DEFAULT_CAP_DIM) -> Operator:
    """Lattice Hamiltonian minus ``E_1^- N_exc``.

    Subtracting the single lower-polariton energy ``omega_d - g`` per
    excitation is exact (``N_exc`` is conserved) and makes the qubit manifold
    nearly static, which is the frame the XY model lives in.
    """
    _require_resonance(params)
    h = build_jch_hamiltonian(params, cap_dim)
    shift = params.omega_d - params.g
    return h - excitation_operator(params, cap_dim) * shift


def effective_xy_hamiltonian(J: float, N: int, boundary: str = "open") -> Operator:
    """``J sum_k (X_k X_{k+1} + Y_k Y_{k+1})`` on ``N`` qubits."""
    if int(N) != N or N < 2:
        raise InvalidParameterError(f"XY chain needs N >= 2, got {N}")
    if boundary not in ("open", "periodic"):
        raise InvalidParameterError(f"unknown boundary {boundary!r}")
    dims = [2] * N
    X, Y = pauli("X"), pauli("Y")
    xs = [embed(X, k, dims).matrix for k in range(N)]
    ys = [embed(Y, k, dims).matrix for k in range(N)]
    bonds = [(k, k + 1) for k in range(N - 1)]
    if boundary == "periodic":
        bonds.append((N - 1, 0))
    h = np.zeros((2**N, 2**N), dtype=complex)
    for i, j in bonds:
        h += J * (xs[i] @ xs[j] + ys[i] @ ys[j])
    return Operator(h, dims, hermitian=True)


@dataclass(frozen=True)
class EffectiveCoupling:
    t_eff: float

    @property
    def J_xy(self) -> float:
        return self.t_eff / 2


def fit_effective_coupling(params: SystemParams) -> EffectiveCoupling:
    """Polariton hopping from the two-site one-excitation spectrum.

    The two lowest one-excitation eigenstates are matched to the symmetric and
    antisymmetric lower-polariton combinations by overlap, and
    ``t_eff = (E_sym - E_anti) / 2`` so that ``t_eff > 0`` for ``A > 0``.
    """
    _require_resonance(params)
    if params.n_max < 2:
        raise InvalidParameterError("effective-coupling fit needs n_max >= 2")
    p2 = params.replace(N=2, boundary="open", kappa=0.0, gamma=0.0)
    h = build_jch_hamiltonian(p2).matrix
    sector = np.flatnonzero(excitation_numbers(p2) == 1)
    energies, vecs = np.linalg.eigh(h[np.ix_(sector, sector)])
    if np.isclose(energies[1], energies[0], rtol=0, atol=1e-13 * max(1.0, abs(energies[0]))):
        return EffectiveCoupling(0.0)

    iso = build_polariton_map(p2).isometry[sector]
    sym = (iso[:, 1] + iso[:, 2]) / np.sqrt(2)   # logical |01> + |10>
    anti = (iso[:, 2] - iso[:, 1]) / np.sqrt(2)
    found = {}
    for e, v in zip(energies[:2], vecs[:, :2].T):
        ov = {"sym": abs(np.vdot(sym, v)) ** 2, "anti": abs(np.vdot(anti, v)) ** 2}
        best = max(ov, key=ov.get)
        if ov[best] < 0.5 or best in found:
            raise FitFailureError(f"cannot identify polariton eigenstate (overlaps {ov})")
        found[best] = e
    return EffectiveCoupling(float((found["sym"] - found["anti"]) / 2))


def reduction_infidelity(params: SystemParams, t: float, logical_state,
                         cap_dim: int | None = DEFAULT_CAP_DIM) -> tuple[float, float]:
    """Compare full lattice dynamics against the fitted XY chain.

    Returns ``(infidelity, leakage)`` where
    ``infidelity = 1 - |<psi_eff(t)| P^dag psi_full(t)>|^2`` (leakage counts
    against it) and ``leakage = 1 - ||P^dag psi_full(t)||^2``.
    """
    pmap = build_polariton_map(params)
    psi0 = np.asarray(logical_state, dtype=complex)
    if psi0.shape != (2**params.N,):
        raise InvalidParameterError(f"logical state must have length {2**params.N}")
    psi0 = psi0 / np.linalg.norm(psi0)
    full = evolve_unitary(polariton_frame_hamiltonian(params, cap_dim), pmap.embed_state(psi0), t)
    if params.N >= 2:
        J = fit_effective_coupling(params).J_xy
        eff = evolve_unitary(effective_xy_hamiltonian(J, params.N, params.boundary), psi0, t)
    else:
        eff = psi0
    proj = pmap.project(full)
    infid = 1.0 - abs(np.vdot(eff, proj)) ** 2
    leak = 1.0 - np.linalg.norm(proj) ** 2
    return float(min(max(infid, 0.0), 1.0)), float(min(max(leak, 0.0), 1.0))
