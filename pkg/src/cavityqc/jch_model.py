"""Jaynes-Cummings-Hubbard lattice: dispersion, Bloch transform, Hamiltonians.

Energies are in angular-frequency units with hbar = 1. The hopping amplitude
``A`` is an energy: a single photon on a periodic ring has the band
``omega_d + 2 A cos(2 pi k / N)``.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from functools import reduce

import numpy as np
import scipy.sparse as sp

from .errors import InvalidParameterError, ResourceLimitError, UnsupportedConfigurationError
from .operators import LocalSpace, Operator

DEFAULT_CAP_DIM = 20_000
BOUNDARIES = ("open", "periodic")


@dataclass(frozen=True)
class SystemParams:
    """Physical parameters of a uniform chain of doped cavities.

    Setting ``omega_d = omega_0 = 0`` selects the resonant rotating frame.
    """

    N: int = 3
    omega_d: float = 0.0
    omega_0: float = 0.0
    g: float = 100.0
    A: float = 1.0
    n_max: int = 2
    kappa: float = 0.0
    gamma: float = 0.0
    boundary: str = "open"

    def __post_init__(self):
        if int(self.N) != self.N or self.N < 1:
            raise InvalidParameterError(f"N must be an integer >= 1, got {self.N}")
        if int(self.n_max) != self.n_max or self.n_max < 1:
            raise InvalidParameterError(f"n_max must be an integer >= 1, got {self.n_max}")
        for name in ("g", "A", "kappa", "gamma"):
            v = getattr(self, name)
            if not np.isfinite(v) or v < 0:
                raise InvalidParameterError(f"{name} must be finite and >= 0, got {v}")
        for name in ("omega_d", "omega_0"):
            v = getattr(self, name)
            if not np.isfinite(v) or v < 0:
                raise InvalidParameterError(f"{name} must be finite and >= 0, got {v}")
        if self.boundary not in BOUNDARIES:
            raise InvalidParameterError(f"boundary must be one of {BOUNDARIES}, got {self.boundary!r}")

    def replace(self, **changes) -> "SystemParams":
        return dataclasses.replace(self, **changes)

    @property
    def resonant(self) -> bool:
        return self.omega_d == self.omega_0

    @property
    def site_dim(self) -> int:
        return 2 * (self.n_max + 1)

    @property
    def dim(self) -> int:
        return self.site_dim**self.N

    def bonds(self) -> list[tuple[int, int]]:
        """Nearest-neighbour pairs; a periodic ring adds the wrap-around bond."""
        if self.boundary == "periodic":
            return [(k, (k + 1) % self.N) for k in range(self.N)]
        return [(k, k + 1) for k in range(self.N - 1)]

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


def dispersion(k: int, params: SystemParams) -> float:
    """Single-photon band energy ``omega_d + 2 A cos(2 pi k / N)`` of a ring."""
    if params.boundary != "periodic":
        raise UnsupportedConfigurationError("dispersion is defined for periodic boundary only")
    if int(k) != k or not 0 <= k < params.N:
        raise InvalidParameterError(f"mode index k={k} outside [0, {params.N})")
    return float(params.omega_d + 2.0 * params.A * np.cos(2.0 * np.pi * k / params.N))


def hopping_matrix(params: SystemParams) -> np.ndarray:
    """One-photon tight-binding matrix in the localized (Wannier) basis."""
    h = np.eye(params.N) * params.omega_d
    for i, j in params.bonds():
        h[i, j] += params.A
        h[j, i] += params.A
    return h


def bloch_transform(N: int) -> Operator:
    """Unitary discrete Fourier matrix ``U[k, m] = exp(-2 pi i k m / N) / sqrt(N)``.

    ``U @ hopping_matrix(p) @ U.conj().T`` is diagonal with entries
    ``dispersion(k, p)`` for a periodic chain.
    """
    if int(N) != N or N < 1:
        raise InvalidParameterError(f"N must be an integer >= 1, got {N}")
    k = np.arange(N)
    return Operator(np.exp(-2j * np.pi * np.outer(k, k) / N) / np.sqrt(N))


def check_dimension(params: SystemParams, cap_dim: int | None = DEFAULT_CAP_DIM):
    if cap_dim is not None and params.dim > cap_dim:
        raise ResourceLimitError(
            f"Hilbert space dimension {params.dim} = {params.site_dim}^{params.N} exceeds cap {cap_dim}"
        )


def _embed_sparse(op, site: int, params: SystemParams) -> sp.csr_matrix:
    d = params.site_dim
    factors = [sp.identity(d, format="csr", dtype=complex)] * params.N
    factors = list(factors)
    factors[site] = sp.csr_matrix(op, dtype=complex)
    return reduce(lambda x, y: sp.kron(x, y, format="csr"), factors)


def site_operators(params: SystemParams) -> tuple[list[sp.csr_matrix], list[sp.csr_matrix]]:
    """Sparse photon annihilators ``a_k`` and atomic lowering ``sigma-_k`` per site."""
    space = LocalSpace(params.n_max)
    a = space.annihilator().matrix
    s = space.atom_lowering().matrix
    return ([_embed_sparse(a, k, params) for k in range(params.N)],
            [_embed_sparse(s, k, params) for k in range(params.N)])


def excitation_numbers(params: SystemParams) -> np.ndarray:
    """Total excitation number of every product basis state."""
    local = LocalSpace(params.n_max).excitation_numbers()
    out = np.zeros(1, dtype=int)
    for _ in range(params.N):
        out = (out[:, None] + local[None, :]).ravel()
    return out


def photon_numbers(params: SystemParams) -> np.ndarray:
    local = np.tile(np.arange(params.n_max + 1), 2)
    out = np.zeros(1, dtype=int)
    for _ in range(params.N):
        out = (out[:, None] + local[None, :]).ravel()
    return out


def excitation_operator(params: SystemParams, cap_dim: int | None = DEFAULT_CAP_DIM) -> Operator:
    """``N_exc = sum_k (a_k^dag a_k + |e><e|_k)``, diagonal in the product basis."""
    check_dimension(params, cap_dim)
    return Operator(np.diag(excitation_numbers(params).astype(float)),
                    [params.site_dim] * params.N, hermitian=True)


def jch_hamiltonian_sparse(params: SystemParams, cap_dim: int | None = DEFAULT_CAP_DIM) -> sp.csr_matrix:
    """Sparse form of :func:`build_jch_hamiltonian`."""
    check_dimension(params, cap_dim)
    aa, ss = site_operators(params)
    h = sp.csr_matrix((params.dim, params.dim), dtype=complex)
    for a, s in zip(aa, ss):
        h = h + params.omega_d * (a.conj().T @ a) + params.omega_0 * (s.conj().T @ s)
        h = h + params.g * (a.conj().T @ s + s.conj().T @ a)
    for i, j in params.bonds():
        hop = aa[i].conj().T @ aa[j]
        h = h + params.A * (hop + hop.conj().T)
    return h.tocsr()


def build_jch_hamiltonian(params: SystemParams, cap_dim: int | None = DEFAULT_CAP_DIM) -> Operator:
    """Full coupled-cavity Hamiltonian on ``(2 (n_max + 1))^N`` states.

    ``H = sum_k [omega_d a_k^dag a_k + omega_0 |e><e|_k + g (a_k^dag sigma-_k + h.c.)]
    + A sum_<kl> (a_k^dag a_l + h.c.)`` with bosonic hopping at every photon
    number. Raises ``ResourceLimitError`` when the dimension exceeds ``cap_dim``.
    """
    h = jch_hamiltonian_sparse(params, cap_dim).toarray()
    h = 0.5 * (h + h.conj().T)
    return Operator(h, [params.site_dim] * params.N, hermitian=True)


def jc_single_site_spectrum(params: SystemParams) -> list[tuple[float, int]]:
    """Sorted ``(energy, excitation number)`` pairs of a single doped cavity."""
    if params.N != 1:
        raise InvalidParameterError(f"single-site spectrum needs N = 1, got N = {params.N}")
    h = build_jch_hamiltonian(params).matrix
    exc = excitation_numbers(params)
    levels = []
    for n in np.unique(exc):
        idx = np.flatnonzero(exc == n)
        for e in np.linalg.eigvalsh(h[np.ix_(idx, idx)]):
            levels.append((float(e), int(n)))
    return sorted(levels)


def collapse_operators(params: SystemParams, cap_dim: int | None = DEFAULT_CAP_DIM) -> list[tuple[float, sp.csr_matrix]]:
    """``(kappa, a_k)`` and ``(gamma, sigma-_k)`` for every site, bare-operator convention."""
    check_dimension(params, cap_dim)
    aa, ss = site_operators(params)
    return [(params.kappa, a) for a in aa] + [(params.gamma, s) for s in ss]
