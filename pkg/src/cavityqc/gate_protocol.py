"""Measurement-mediated two-qubit gate on a three-site XY segment.

Evolving ``H3 = A (X1 X2 + Y1 Y2 + X2 X3 + Y2 Y3)`` for ``t* = pi / (2 sqrt(2) A)``
and measuring the middle (mediator) qubit in the Z basis leaves the outer
qubits acted on by ``SWAP (Z x Z) CP`` (outcome 0) or ``-SWAP CP`` (outcome 1).
"""

from __future__ import annotations

import enum
import math
from dataclasses import asdict, dataclass

import numpy as np

from . import kernels
from .dynamics import evolve_lindblad, evolve_lindblad_exact, gate_time, propagator
from .errors import DegenerateBranchError, InvalidParameterError
from .jch_model import DEFAULT_CAP_DIM, SystemParams, collapse_operators, excitation_numbers
from .operators import Operator, as_matrix
from .polariton import (
    build_polariton_map,
    effective_xy_hamiltonian,
    fit_effective_coupling,
    polariton_frame_hamiltonian,
    polariton_state,
    vacuum_state,
)

CP = np.diag([1, 1, 1, -1]).astype(complex)
SWAP = np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex)
ZZ = np.diag([1, -1, -1, 1]).astype(complex)
DEGENERATE_TOL = 1e-14


class GateLabel(enum.IntEnum):
    """Two-qubit action selected by the mediator outcome."""

    SWAP_ZZ_CP = 0
    SWAP_CP = 1


@dataclass(frozen=True)
class ProtocolReport:
    outcome: int
    outcome_probability: float
    two_qubit_fidelity: float
    leakage: float
    elapsed_model_time: float
    label: str = ""
    t_eff: float = 0.0
    method: str = "unitary"

    def to_dict(self) -> dict:
        return asdict(self)


def three_site_hamiltonian(A_coeff: float) -> Operator:
    return effective_xy_hamiltonian(A_coeff, 3)


def mediated_gate_unitary(A_coeff: float) -> Operator:
    """``exp(-i H3 t*)``; the product ``A t*`` is fixed so the result is A-independent."""
    t = gate_time(A_coeff)
    return Operator(propagator(three_site_hamiltonian(A_coeff), t), [2, 2, 2])


def extremal_block(u3, mediator: int) -> np.ndarray:
    """4x4 action on qubits (1, 3) with the mediator held in ``|mediator>``."""
    u = as_matrix(u3)
    idx = [(a << 2) | (mediator << 1) | b for a in (0, 1) for b in (0, 1)]
    return u[np.ix_(idx, idx)]


def measure_mediator(psi, seed: int | None = None, forced_outcome: int | None = None):
    """Z-basis measurement of the middle qubit of a 3-qubit state.

    Returns ``(outcome, post_state, probability)``. Sampling uses
    ``numpy.random.default_rng(seed)``; ``forced_outcome`` post-selects.
    """
    psi = np.asarray(psi, dtype=complex)
    if psi.shape != (8,):
        raise InvalidParameterError(f"expected a 3-qubit state, got shape {psi.shape}")
    norm = np.linalg.norm(psi)
    if abs(norm - 1) > 1e-10:
        raise InvalidParameterError(f"state is not normalized (norm {norm})")
    p1 = kernels.prob_one(psi, 3, 1)
    probs = (max(0.0, 1.0 - p1), p1)
    if forced_outcome is None:
        outcome = int(np.random.default_rng(seed).random() >= probs[0])
    elif forced_outcome in (0, 1):
        outcome = int(forced_outcome)
    else:
        raise InvalidParameterError(f"forced outcome must be 0 or 1, got {forced_outcome}")
    p = probs[outcome]
    if p < DEGENERATE_TOL:
        raise DegenerateBranchError(f"mediator outcome {outcome} has probability {p:.3g}")
    post = kernels.project(psi, 3, 1, outcome)
    return outcome, post / np.linalg.norm(post), float(p)


def classify_two_qubit_action(outcome: int) -> tuple[GateLabel, Operator]:
    """Ideal outer-qubit unitary for a mediator outcome, global phase included."""
    if outcome == 0:
        return GateLabel.SWAP_ZZ_CP, Operator(SWAP @ ZZ @ CP, [2, 2])
    if outcome == 1:
        return GateLabel.SWAP_CP, Operator(-(SWAP @ CP), [2, 2])
    raise InvalidParameterError(f"outcome must be 0 or 1, got {outcome}")


def choi_matrix(outputs: np.ndarray) -> np.ndarray:
    """Normalized Choi matrix from ``outputs[x, y] = E(|x><y|)``."""
    d = outputs.shape[0]
    J = np.zeros((d * d, d * d), dtype=complex)
    for x in range(d):
        for y in range(d):
            J += np.kron(outputs[x, y], np.outer(np.eye(d)[x], np.eye(d)[y]))
    return J / d


def average_gate_fidelity(achieved, ideal, representation: str = "unitary") -> float:
    """Average gate fidelity of ``achieved`` against the unitary ``ideal``.

    ``representation`` is ``"unitary"`` (any single Kraus operator, possibly
    trace-decreasing), ``"kraus"`` (a list of Kraus operators) or ``"choi"``
    (normalized Choi matrix, ``J = (E x I)(|Phi><Phi|)``). For a single Kraus
    operator ``M`` this is ``(|tr(U^dag M)|^2 + tr(M^dag M)) / (d^2 + d)``.
    """
    U = as_matrix(ideal)
    d = U.shape[0]
    if U.shape != (d, d):
        raise InvalidParameterError("ideal gate must be square")
    if representation == "unitary":
        kraus = [as_matrix(achieved)]
    elif representation == "kraus":
        kraus = [as_matrix(k) for k in achieved]
    elif representation == "choi":
        J = np.asarray(achieved, dtype=complex)
        if J.shape != (d * d, d * d):
            raise InvalidParameterError(f"Choi matrix must be {d * d}x{d * d}, got {J.shape}")
        # |Phi_U> = (U x I)|Phi>, |Phi> = sum_x |x>|x> / sqrt(d)
        phi_u = (np.kron(U, np.eye(d)) @ np.eye(d).reshape(-1)) / math.sqrt(d)
        f_pro = np.vdot(phi_u, J @ phi_u).real
        return float((d * f_pro + np.trace(J).real) / (d + 1))
    else:
        raise InvalidParameterError(f"unknown representation {representation!r}")
    for k in kraus:
        if k.shape != (d, d):
            raise InvalidParameterError(f"dimension mismatch: {k.shape} vs ideal {U.shape}")
    overlap = sum(abs(np.trace(U.conj().T @ k)) ** 2 for k in kraus)
    norm = sum(np.trace(k.conj().T @ k).real for k in kraus)
    return float((overlap + norm) / (d * d + d))


def _logical_input(logical) -> np.ndarray:
    psi = np.asarray(logical, dtype=complex).reshape(-1)
    if psi.shape != (8,):
        raise InvalidParameterError(f"logical input must be a 3-qubit state, got length {psi.size}")
    n = np.linalg.norm(psi)
    if n == 0:
        raise InvalidParameterError("logical input is the zero vector")
    return psi / n


def _site_basis(n_max: int) -> np.ndarray:
    return np.stack([vacuum_state(n_max), polariton_state(1, "-", n_max)], axis=1)


def full_stack_gate(params: SystemParams, logical_input, forced_outcome: int | None = None,
                    seed: int | None = 0, method: str = "auto", reference=None,
                    cap_dim: int | None = DEFAULT_CAP_DIM, solver: str = "rk4",
                    dt: float | None = None) -> ProtocolReport:
    """Run the mediated gate on the full three-cavity lattice model.

    The logical state is embedded in the polariton qubit manifold, evolved
    under the lattice Hamiltonian (polariton frame) for ``pi / (sqrt(2) t_eff)``
    and the middle site is projected on ``|g,0>`` / ``|1->``. Population in
    neither state is leakage, not an outcome.

    ``two_qubit_fidelity`` is the average gate fidelity of the outer-qubit map
    conditioned on the outcome (mediator prepared in the matching state)
    against ``classify_two_qubit_action`` or ``reference`` when given. With
    dissipation the map is tomographed by evolving all 16 operator inputs.
    ``solver`` selects the Lindblad route: ``"rk4"`` (:func:`evolve_lindblad`
    with initial step ``dt``) or ``"krylov"`` (exact exponential, faster in the
    three-excitation sector).
    """
    if params.N != 3:
        raise InvalidParameterError(f"the mediated gate acts on N = 3 sites, got N = {params.N}")
    if params.n_max < 2:
        raise InvalidParameterError("full-stack simulation needs n_max >= 2")
    dissipative = params.kappa > 0 or params.gamma > 0
    if method == "auto":
        method = "lindblad" if dissipative else "unitary"
    if method not in ("unitary", "lindblad"):
        raise InvalidParameterError(f"unknown method {method!r}")
    if method == "unitary" and dissipative:
        raise InvalidParameterError("unitary method requested with nonzero decay rates")
    if solver not in ("krylov", "rk4"):
        raise InvalidParameterError(f"unknown Lindblad solver {solver!r}")

    psi = _logical_input(logical_input)
    coupling = fit_effective_coupling(params)
    T = 0.0 if coupling.t_eff == 0 else math.pi / (math.sqrt(2.0) * coupling.t_eff)

    pmap = build_polariton_map(params)
    H = polariton_frame_hamiltonian(params, cap_dim).matrix
    exc = excitation_numbers(params)
    site = _site_basis(params.n_max)
    d_site = params.site_dim

    # outer-qubit embeddings with the mediator in |g,0> or |1->
    W = [np.kron(np.kron(site, site[:, [m]]), site) for m in (0, 1)]
    proj = [np.kron(np.kron(np.eye(d_site), np.outer(site[:, m], site[:, m].conj())), np.eye(d_site))
            for m in (0, 1)]
    full_in = pmap.embed_state(psi)

    if method == "unitary":
        keep = np.flatnonzero(exc <= 3)
        Hk = H[np.ix_(keep, keep)]
        U = propagator(Hk, T)

        def run(vecs):
            out = np.zeros((H.shape[0],) + vecs.shape[1:], dtype=complex)
            out[keep] = U @ vecs[keep]
            return out

        final = run(full_in)
        probs = [float(np.linalg.norm(proj[m] @ final) ** 2) for m in (0, 1)]
        leakage = pmap.leakage(final)

        def outcome_map(m):
            return W[m].conj().T @ run(W[m])
    else:
        rates = collapse_operators(params, cap_dim)

        def run(rhos, k_max):
            keep = np.flatnonzero(exc <= k_max)
            Hk = H[np.ix_(keep, keep)]
            cops = [(r, op[keep][:, keep]) for r, op in rates]
            sub = rhos[:, keep][:, :, keep]
            if solver == "krylov":
                res = evolve_lindblad_exact(Hk, cops, sub, T)
            else:
                step = dt if dt is not None else T / 64
                res = evolve_lindblad(Hk, cops, sub, T, min(step, T)) if T > 0 else sub
            out = np.zeros(rhos.shape, dtype=complex)
            out[np.ix_(np.arange(len(rhos)), keep, keep)] = res
            return out

        support = [bin(i).count("1") for i in range(8) if abs(psi[i]) > 0]
        rho_in = np.outer(full_in, full_in.conj())[None]
        final = run(rho_in, max(support))[0]
        probs = [float(np.trace(proj[m] @ final).real) for m in (0, 1)]
        leakage = float(max(0.0, np.trace(final).real - np.trace(pmap.isometry.conj().T @ final @ pmap.isometry).real))

        def outcome_map(m):
            basis = [np.outer(W[m][:, x], W[m][:, y].conj()) for x in range(4) for y in range(4)]
            evolved = run(np.array(basis), 2 + m)
            outputs = np.array([W[m].conj().T @ r @ W[m] for r in evolved]).reshape(4, 4, 4, 4)
            return choi_matrix(outputs)

    if forced_outcome is None:
        total = probs[0] + probs[1]
        if total < DEGENERATE_TOL:
            raise DegenerateBranchError("mediator left the polariton qubit manifold")
        outcome = int(np.random.default_rng(seed).random() * total >= probs[0])
    elif forced_outcome in (0, 1):
        outcome = int(forced_outcome)
    else:
        raise InvalidParameterError(f"forced outcome must be 0 or 1, got {forced_outcome}")
    if probs[outcome] < DEGENERATE_TOL:
        raise DegenerateBranchError(f"mediator outcome {outcome} has probability {probs[outcome]:.3g}")

    label, ideal = classify_two_qubit_action(outcome)
    target = ideal if reference is None else reference
    rep = "unitary" if method == "unitary" else "choi"
    fid = average_gate_fidelity(outcome_map(outcome), target, rep)
    return ProtocolReport(
        outcome=outcome,
        outcome_probability=probs[outcome],
        two_qubit_fidelity=min(1.0, max(0.0, fid)),
        leakage=min(1.0, max(0.0, leakage)),
        elapsed_model_time=T,
        label=label.name,
        t_eff=coupling.t_eff,
        method=method,
    )


def decay_estimate(params: SystemParams, t: float) -> float:
    """Survival ``exp(-(kappa + gamma) t / 2)`` of a half-photon, half-atom polariton."""
    return math.exp(-(params.kappa + params.gamma) * t / 2)


def polariton_survival(params: SystemParams, t: float, site: int = 0, dt: float | None = None,
                       cap_dim: int | None = DEFAULT_CAP_DIM) -> float:
    """Population left in the single-polariton manifold after time ``t``.

    One lower polariton is placed on ``site`` and evolved with
    :func:`evolve_lindblad` under cavity and atomic decay.
    """
    if not 0 <= site < params.N:
        raise InvalidParameterError(f"site {site} out of range")
    pmap = build_polariton_map(params)
    H = polariton_frame_hamiltonian(params, cap_dim).matrix
    keep = np.flatnonzero(excitation_numbers(params) <= 1)
    one = [1 << (params.N - 1 - k) for k in range(params.N)]
    iso1 = pmap.isometry[np.ix_(keep, one)]
    psi0 = iso1[:, site]
    cops = [(r, op[keep][:, keep]) for r, op in collapse_operators(params, cap_dim)]
    step = dt if dt is not None else t / 32
    rho = evolve_lindblad(H[np.ix_(keep, keep)], cops, np.outer(psi0, psi0.conj()), t, min(step, t)) if t > 0 \
        else np.outer(psi0, psi0.conj())
    return float(np.trace(iso1.conj().T @ rho @ iso1).real)
