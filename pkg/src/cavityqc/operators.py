"""Operator algebra for truncated boson modes coupled to two-level dopants.

Basis conventions
-----------------
A single cavity site is ``atom ⊗ photon`` with the atom index slow and the
photon index fast, i.e. the basis index of ``|s, n>`` is ``s * (n_max + 1) + n``
with ``s = 0`` for the ground state ``|g>`` and ``s = 1`` for ``|e>``.
Composite lattices are ordered with site 0 slowest.

Qubits use ``|0>`` = no polariton (``Z|0> = +|0>``) and ``|1>`` = one lower
polariton. ``pauli("plus")`` is the excitation creator ``|1><0|``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import reduce

import numpy as np

from .errors import InvalidParameterError

HERMITIAN_TOL = 1e-12


@dataclass(frozen=True)
class LocalSpace:
    """One cavity with photon cutoff ``photon_cutoff`` and a two-level dopant."""

    photon_cutoff: int
    atom_levels: int = field(default=2, init=False)

    def __post_init__(self):
        if int(self.photon_cutoff) != self.photon_cutoff or self.photon_cutoff < 0:
            raise InvalidParameterError(f"photon_cutoff must be a non-negative integer, got {self.photon_cutoff}")

    @property
    def n_fock(self) -> int:
        return self.photon_cutoff + 1

    @property
    def dim(self) -> int:
        return self.atom_levels * self.n_fock

    def index(self, atom: int, photons: int) -> int:
        """Basis index of ``|atom, photons>`` (atom 0 = ground)."""
        if atom not in (0, 1) or not 0 <= photons <= self.photon_cutoff:
            raise InvalidParameterError(f"no basis state |{atom},{photons}> with n_max={self.photon_cutoff}")
        return atom * self.n_fock + photons

    def basis_labels(self) -> list[str]:
        return [f"{'ge'[s]},{n}" for s in range(2) for n in range(self.n_fock)]

    def annihilator(self) -> "Operator":
        """Photon annihilator ``a`` acting on the site."""
        a = np.diag(np.sqrt(np.arange(1, self.n_fock, dtype=float)), 1) if self.n_fock > 1 else np.zeros((1, 1))
        return Operator(np.kron(np.eye(2), a))

    def atom_lowering(self) -> "Operator":
        """``|g><e|`` tensored with the photon identity."""
        return Operator(np.kron(np.array([[0.0, 1.0], [0.0, 0.0]]), np.eye(self.n_fock)))

    def photon_number(self) -> "Operator":
        return Operator(np.kron(np.eye(2), np.diag(np.arange(self.n_fock, dtype=float))), hermitian=True)

    def excited_projector(self) -> "Operator":
        return Operator(np.kron(np.diag([0.0, 1.0]), np.eye(self.n_fock)), hermitian=True)

    def excitation_numbers(self) -> np.ndarray:
        """Excitation number ``n + s`` of every basis state."""
        return np.array([s + n for s in range(2) for n in range(self.n_fock)])


class Operator:
    """Dense complex matrix tagged with the site dimensions it acts on.

    Operators are treated as immutable values: the wrapped array is marked
    read-only and arithmetic always returns new instances.
    """

    __slots__ = ("matrix", "dims", "hermitian")

    def __init__(self, matrix, dims=None, hermitian: bool = False):
        m = np.array(matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise InvalidParameterError(f"operator matrix must be square, got shape {m.shape}")
        dims = (m.shape[0],) if dims is None else tuple(int(d) for d in dims)
        if int(np.prod(dims)) != m.shape[0]:
            raise InvalidParameterError(f"site dims {dims} do not multiply to {m.shape[0]}")
        if hermitian and np.max(np.abs(m - m.conj().T), initial=0.0) > HERMITIAN_TOL:
            raise InvalidParameterError("matrix tagged hermitian is not Hermitian to 1e-12")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "hermitian", bool(hermitian))

    def __setattr__(self, name, value):
        raise AttributeError("Operator is immutable")

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def dag(self) -> "Operator":
        return Operator(self.matrix.conj().T, self.dims, self.hermitian)

    def is_hermitian(self, tol: float = HERMITIAN_TOL) -> bool:
        return bool(np.max(np.abs(self.matrix - self.matrix.conj().T), initial=0.0) <= tol)

    def _check(self, other: "Operator"):
        if self.dims != other.dims:
            raise InvalidParameterError(f"site structure mismatch: {self.dims} vs {other.dims}")

    def __add__(self, other):
        if isinstance(other, Operator):
            self._check(other)
            return Operator(self.matrix + other.matrix, self.dims, self.hermitian and other.hermitian)
        return NotImplemented

    def __sub__(self, other):
        if isinstance(other, Operator):
            self._check(other)
            return Operator(self.matrix - other.matrix, self.dims, self.hermitian and other.hermitian)
        return NotImplemented

    def __neg__(self):
        return Operator(-self.matrix, self.dims, self.hermitian)

    def __mul__(self, scalar):
        if np.isscalar(scalar):
            herm = self.hermitian and np.isreal(scalar)
            return Operator(self.matrix * scalar, self.dims, herm)
        return NotImplemented

    __rmul__ = __mul__

    def __matmul__(self, other):
        if isinstance(other, Operator):
            self._check(other)
            return Operator(self.matrix @ other.matrix, self.dims)
        return self.matrix @ np.asarray(other)

    def __array__(self, dtype=None, copy=None):
        return self.matrix if dtype is None else self.matrix.astype(dtype)

    def __repr__(self):
        return f"Operator(dim={self.dim}, dims={self.dims}, hermitian={self.hermitian})"


def as_matrix(op) -> np.ndarray:
    """Return the raw complex matrix of an ``Operator`` or array-like."""
    return op.matrix if isinstance(op, Operator) else np.asarray(op, dtype=complex)


def fock_ladder(n_max: int) -> tuple[Operator, Operator]:
    """Truncated bosonic annihilator and creator on ``|0>..|n_max>``."""
    if int(n_max) != n_max or n_max < 1:
        raise InvalidParameterError(f"n_max must be an integer >= 1, got {n_max}")
    a = np.diag(np.sqrt(np.arange(1, n_max + 1, dtype=float)), 1)
    return Operator(a), Operator(a.T)


_PAULI = {
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
    "I": np.eye(2, dtype=complex),
    # |1><0|: adds a polariton to the vacuum-label state
    "plus": np.array([[0, 0], [1, 0]], dtype=complex),
    "minus": np.array([[0, 1], [0, 0]], dtype=complex),
}


def pauli(label: str) -> Operator:
    """Single-qubit Pauli or ladder operator.

    ``label`` is one of ``X, Y, Z, I, plus, minus``. The ladder operators are
    normalized (``plus + minus = X``) and ``plus`` maps ``|0>`` to ``|1>``.
    """
    try:
        m = _PAULI[label]
    except (KeyError, TypeError):
        raise InvalidParameterError(f"unknown Pauli label {label!r}") from None
    return Operator(m, hermitian=label in ("X", "Y", "Z", "I"))


def embed(op, site: int, site_dims) -> Operator:
    """Tensor ``op`` into position ``site`` of a lattice with ``site_dims``."""
    site_dims = [int(d) for d in site_dims]
    if not 0 <= site < len(site_dims):
        raise InvalidParameterError(f"site {site} out of range for {len(site_dims)} sites")
    m = as_matrix(op)
    if m.shape != (site_dims[site], site_dims[site]):
        raise InvalidParameterError(f"operator of dim {m.shape[0]} cannot act on site of dim {site_dims[site]}")
    left = int(np.prod(site_dims[:site], dtype=int))
    right = int(np.prod(site_dims[site + 1:], dtype=int))
    full = np.kron(np.kron(np.eye(left), m), np.eye(right))
    herm = op.hermitian if isinstance(op, Operator) else False
    return Operator(full, site_dims, herm)


def tensor(*ops) -> Operator:
    """Kronecker product, site 0 first."""
    mats = [as_matrix(o) for o in ops]
    dims = []
    for o, m in zip(ops, mats):
        dims.extend(o.dims if isinstance(o, Operator) else (m.shape[0],))
    return Operator(reduce(np.kron, mats), dims)


def commutator(x, y) -> np.ndarray:
    x, y = as_matrix(x), as_matrix(y)
    return x @ y - y @ x
