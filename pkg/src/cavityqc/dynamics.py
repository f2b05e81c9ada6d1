"""Closed- and open-system time evolution at desk scale.

Two Lindblad routes are provided and are independent of each other:

* :func:`evolve_lindblad` integrates the master equation with fixed-step RK4
  in the interaction picture of ``H`` and halves the step until two
  successive refinements agree in trace distance.
* :func:`evolve_lindblad_exact` applies ``exp(L t)`` of the sparse Liouvillian
  with a truncated-Taylor Krylov scheme (``scipy.sparse.linalg.expm_multiply``).
"""

from __future__ import annotations

import math

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import expm_multiply

from .errors import InvalidParameterError, NumericalFailureError
from .operators import HERMITIAN_TOL, Operator, as_matrix

NORM_TOL = 1e-10


def _dense(op) -> np.ndarray:
    if sp.issparse(op):
        return op.toarray().astype(complex)
    return as_matrix(op)


def _hermitian_matrix(H) -> np.ndarray:
    h = _dense(H)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise InvalidParameterError(f"Hamiltonian must be square, got shape {h.shape}")
    if np.max(np.abs(h - h.conj().T), initial=0.0) > HERMITIAN_TOL * max(1.0, np.max(np.abs(h), initial=0.0)):
        raise InvalidParameterError("Hamiltonian is not Hermitian")
    return h


def normalize(psi) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    n = np.linalg.norm(psi)
    if n == 0:
        raise InvalidParameterError("cannot normalize the zero vector")
    return psi / n


def pure_density(psi) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    return np.outer(psi, psi.conj())


def trace_distance(rho, sigma) -> float:
    """Half the trace norm of ``rho - sigma`` (maximum over a leading batch axis)."""
    diff = np.asarray(rho) - np.asarray(sigma)
    if diff.ndim == 2:
        diff = diff[None]
    return float(max(0.5 * np.linalg.svd(d, compute_uv=False).sum() for d in diff))


def check_density(rho, trace_tol: float = 1e-8, herm_tol: float = 1e-10, pos_tol: float = 1e-8):
    """Raise ``InvalidParameterError`` unless ``rho`` is a valid density matrix."""
    rho = np.asarray(rho)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise InvalidParameterError(f"density matrix must be square, got shape {rho.shape}")
    if np.max(np.abs(rho - rho.conj().T), initial=0.0) > herm_tol:
        raise InvalidParameterError("density matrix is not Hermitian")
    if abs(np.trace(rho) - 1) > trace_tol:
        raise InvalidParameterError(f"density matrix trace {np.trace(rho).real:.3g} != 1")
    if np.linalg.eigvalsh(0.5 * (rho + rho.conj().T)).min() < -pos_tol:
        raise InvalidParameterError("density matrix has negative eigenvalues")


def gate_time(A_coeff: float) -> float:
    """Duration ``pi / (2 sqrt(2) A)`` of the three-site mediated gate."""
    if not np.isfinite(A_coeff) or A_coeff <= 0:
        raise InvalidParameterError(f"coupling must be > 0, got {A_coeff}")
    return math.pi / (2.0 * math.sqrt(2.0) * A_coeff)


def propagator(H, t: float) -> np.ndarray:
    """``exp(-i H t)`` by full eigendecomposition."""
    E, V = np.linalg.eigh(_hermitian_matrix(H))
    return (V * np.exp(-1j * E * t)) @ V.conj().T


def evolve_unitary(H, psi, t: float) -> np.ndarray:
    """Return ``exp(-i H t) psi``; ``psi`` may hold several states as columns."""
    h = _hermitian_matrix(H)
    psi = np.asarray(psi, dtype=complex)
    if psi.shape[0] != h.shape[0]:
        raise InvalidParameterError(f"state dimension {psi.shape[0]} != Hamiltonian dimension {h.shape[0]}")
    if t == 0:
        return psi.copy()
    E, V = np.linalg.eigh(h)
    phases = np.exp(-1j * E * t)
    coeff = V.conj().T @ psi
    coeff = coeff * (phases if psi.ndim == 1 else phases[:, None])
    return V @ coeff


def _collapse_list(collapse_ops, dim: int) -> list[np.ndarray]:
    out = []
    for rate, op in collapse_ops:
        if not np.isfinite(rate) or rate < 0:
            raise InvalidParameterError(f"collapse rate must be >= 0, got {rate}")
        m = _dense(op)
        if m.shape != (dim, dim):
            raise InvalidParameterError(f"collapse operator shape {m.shape} != ({dim}, {dim})")
        if rate > 0:
            out.append(math.sqrt(rate) * m)
    return out


def _rk4_interaction(X0, W, Ls, LsH, K, T, n):
    """Integrate dX/dt = conj(F) * D(F * X) with F = exp(-i W t), n fixed steps."""
    dt = T / n
    X = X0
    if len(Ls) == 0:
        return X
    step = np.exp(-1j * W * (dt / 2))

    def rhs(ph, Y):
        Y = ph * Y
        jump = (Ls[None] @ Y[:, None] @ LsH[None]).sum(axis=1)
        out = jump - 0.5 * (K @ Y + Y @ K)
        return np.conj(ph) * out

    ph = np.ones_like(W)
    for _ in range(n):
        ph_half = ph * step
        ph_full = ph_half * step
        k1 = rhs(ph, X)
        k2 = rhs(ph_half, X + (dt / 2) * k1)
        k3 = rhs(ph_half, X + (dt / 2) * k2)
        k4 = rhs(ph_full, X + dt * k3)
        X = X + (dt / 6) * (k1 + 2 * k2 + 2 * k3 + k4)
        ph = ph_full
    return X


def evolve_lindblad(H, collapse_ops, rho0, t: float, dt: float, tol: float = 1e-6,
                    max_halvings: int = 12, return_info: bool = False):
    """Solve ``drho/dt = -i[H, rho] + sum_j (L rho L^dag - {L^dag L, rho}/2)``.

    Parameters
    ----------
    H : Operator or array
        Hermitian Hamiltonian.
    collapse_ops : list of (rate, operator)
        Each entry contributes ``L = sqrt(rate) * operator``.
    rho0 : array, shape (d, d) or (batch, d, d)
        Initial density matrix. A batch of arbitrary operators is evolved
        linearly, which is how channels are tomographed.
    t, dt : float
        Final time and initial step. The step is halved until two successive
        solutions agree to ``tol`` in trace distance.

    The coherent part is handled exactly through the eigendecomposition of
    ``H``; RK4 only sees the dissipator, so with no collapse operators the
    result equals unitary evolution to working precision.
    """
    h = _hermitian_matrix(H)
    d = h.shape[0]
    rho0 = np.asarray(rho0, dtype=complex)
    batched = rho0.ndim == 3
    R = rho0 if batched else rho0[None]
    if R.shape[1:] != (d, d):
        raise InvalidParameterError(f"rho0 shape {rho0.shape} does not match dimension {d}")
    if t < 0 or not np.isfinite(t):
        raise InvalidParameterError(f"t must be finite and >= 0, got {t}")
    if t == 0:
        return (rho0.copy(), {"steps": 0, "dt": 0.0}) if return_info else rho0.copy()
    if not dt > 0 or dt > t:
        raise InvalidParameterError(f"need 0 < dt <= t, got dt={dt}, t={t}")

    E, V = np.linalg.eigh(h)
    VH = V.conj().T
    W = E[:, None] - E[None, :]
    Ls = _collapse_list(collapse_ops, d)
    if Ls:
        Ls = np.array([VH @ L @ V for L in Ls])
        LsH = np.conj(np.transpose(Ls, (0, 2, 1)))
        K = (LsH @ Ls).sum(axis=0)
    else:
        Ls, LsH, K = [], None, None
    X0 = VH[None] @ R @ V[None]

    n = max(1, math.ceil(t / dt - 1e-12))
    prev = _rk4_interaction(X0, W, Ls, LsH, K, t, n)
    for _ in range(max_halvings):
        n *= 2
        cur = _rk4_interaction(X0, W, Ls, LsH, K, t, n)
        if trace_distance(cur, prev) <= tol:
            break
        prev = cur
    else:
        raise NumericalFailureError(f"Lindblad step refinement did not converge after {max_halvings} halvings")

    phase = np.exp(-1j * W * t)
    out = V[None] @ (phase * cur) @ VH[None]
    out = out if batched else out[0]
    if return_info:
        return out, {"steps": n, "dt": t / n}
    return out


def lindblad_superoperator(H, collapse_ops) -> sp.csr_matrix:
    """Sparse Liouvillian acting on row-major ``vec(rho)``."""
    h = sp.csr_matrix(H.matrix if isinstance(H, Operator) else H, dtype=complex)
    d = h.shape[0]
    eye = sp.identity(d, dtype=complex, format="csr")
    L = -1j * (sp.kron(h, eye) - sp.kron(eye, h.T))
    for rate, op in collapse_ops:
        if rate < 0:
            raise InvalidParameterError(f"collapse rate must be >= 0, got {rate}")
        if rate == 0:
            continue
        c = math.sqrt(rate) * sp.csr_matrix(op.matrix if isinstance(op, Operator) else op, dtype=complex)
        cdc = c.conj().T @ c
        L = L + sp.kron(c, c.conj()) - 0.5 * (sp.kron(cdc, eye) + sp.kron(eye, cdc.T))
    return L.tocsr()


def evolve_lindblad_exact(H, collapse_ops, rho0, t: float) -> np.ndarray:
    """Apply ``exp(L t)`` to ``rho0`` (single matrix or batch) without time stepping."""
    rho0 = np.asarray(rho0, dtype=complex)
    batched = rho0.ndim == 3
    R = rho0 if batched else rho0[None]
    b, d, _ = R.shape
    if t == 0:
        return rho0.copy()
    sup = lindblad_superoperator(H, collapse_ops)
    if sup.shape[0] != d * d:
        raise InvalidParameterError(f"rho0 dimension {d} does not match Hamiltonian")
    vecs = R.reshape(b, d * d).T
    out = expm_multiply(sup * t, vecs)
    out = np.asarray(out).T.reshape(b, d, d)
    return out if batched else out[0]
