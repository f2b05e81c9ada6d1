"""Acceptance checks shared by the ``selftest`` subcommand and the test suite.

Each check returns a :class:`CheckResult` whose ``detail`` string is formatted
with fixed precision so repeated runs produce identical reports.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from . import compiler
from .dynamics import evolve_lindblad, gate_time, trace_distance
from .gate_protocol import (
    CP, SWAP, ZZ, classify_two_qubit_action, decay_estimate, extremal_block, full_stack_gate,
    mediated_gate_unitary, polariton_survival,
)
from .jch_model import (
    SystemParams, bloch_transform, collapse_operators, dispersion, excitation_numbers,
    jc_single_site_spectrum, jch_hamiltonian_sparse, photon_numbers,
)
from .operators import LocalSpace
from .polariton import fit_effective_coupling, reduction_infidelity


@dataclass(frozen=True)
class CheckResult:
    number: int
    name: str
    passed: bool
    detail: str

    def __post_init__(self):
        object.__setattr__(self, "passed", bool(self.passed))

    def to_dict(self) -> dict:
        return asdict(self)

    def line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.number:2d} {self.name}: {self.detail}"


def _basis(bits: str) -> np.ndarray:
    v = np.zeros(1 << len(bits), dtype=complex)
    v[int(bits, 2)] = 1
    return v


def _phase_aligned_error(a, b) -> float:
    """Max-norm distance after removing the best global phase."""
    ov = np.vdot(b.reshape(-1), a.reshape(-1))
    ph = ov / abs(ov) if abs(ov) > 0 else 1.0
    return float(np.max(np.abs(a - ph * b)))


GATE_TABLE = [
    ("000", 1, "000"), ("001", -1, "100"), ("100", -1, "001"), ("101", -1, "101"),
    ("010", -1, "010"), ("110", -1, "011"), ("011", -1, "110"), ("111", 1, "111"),
]


def check_gate_identities(seed: int = 0) -> CheckResult:
    U = mediated_gate_unitary(1.0).matrix
    err = max(np.max(np.abs(U @ _basis(i) - s * _basis(o))) for i, s, o in GATE_TABLE)
    return CheckResult(1, "mediated gate identities", err <= 1e-10, f"max error {err:.2e} (tol 1e-10)")


def check_polariton_spectrum(seed: int = 0) -> CheckResult:
    p = SystemParams(N=1, omega_d=1.0, omega_0=1.0, g=0.1, n_max=2)
    levels = jc_single_site_spectrum(p)
    err = 0.0
    for n in (1, 2):
        got = sorted(e for e, k in levels if k == n)
        want = sorted(n * p.omega_d + s * p.g * math.sqrt(n) for s in (-1, 1))
        err = max(err, max(abs(a - b) for a, b in zip(got, want)))
    return CheckResult(2, "single-site polariton spectrum", err <= 1e-10, f"max error {err:.2e} (tol 1e-10)")


def check_dispersion(seed: int = 0) -> CheckResult:
    p = SystemParams(N=8, omega_d=1.0, omega_0=1.0, g=0.0, A=0.1, n_max=1, boundary="periodic")
    H = jch_hamiltonian_sparse(p, cap_dim=None)
    sector = np.flatnonzero((photon_numbers(p) == 1) & (excitation_numbers(p) == 1))
    got = np.linalg.eigvalsh(H[sector][:, sector].toarray())
    want = np.sort([dispersion(k, p) for k in range(p.N)])
    err = float(np.max(np.abs(got - want)))
    F = bloch_transform(p.N).matrix
    unit = float(np.max(np.abs(F.conj().T @ F - np.eye(p.N))))
    ok = err <= 1e-10 and unit <= 1e-12
    return CheckResult(3, "dispersion and Bloch transform", ok,
                       f"band error {err:.2e} (tol 1e-10), unitarity {unit:.2e} (tol 1e-12)")


def check_gate_classification(seed: int = 0) -> CheckResult:
    U = mediated_gate_unitary(1.0).matrix
    raw = [extremal_block(U, m) for m in (0, 1)]
    err_raw = max(float(np.max(np.abs(raw[m] - classify_two_qubit_action(m)[1].matrix))) for m in (0, 1))
    corrected = [ZZ @ raw[0], raw[1]]
    err_corr = max(_phase_aligned_error(c, SWAP @ CP) for c in corrected)
    ok = err_raw <= 1e-10 and err_corr <= 1e-10
    return CheckResult(4, "outcome classification", ok,
                       f"raw error {err_raw:.2e}, corrected error {err_corr:.2e} (tol 1e-10)")


def check_effective_coupling(seed: int = 0) -> CheckResult:
    p = SystemParams(N=2, g=100.0, A=1.0, n_max=2)
    r = fit_effective_coupling(p).t_eff / p.A
    return CheckResult(5, "effective coupling", 0.495 <= r <= 0.505, f"t_eff/A = {r:.6f} (range [0.495, 0.505])")


def check_reduction_scaling(seed: int = 0) -> CheckResult:
    psi = _basis("100")
    infid = {}
    for g in (10.0, 100.0):
        p = SystemParams(N=3, g=g, A=1.0, n_max=2)
        t = math.pi / (math.sqrt(2) * fit_effective_coupling(p).t_eff)
        infid[g] = reduction_infidelity(p, t, psi)[0]
    ratio = infid[10.0] / infid[100.0]
    return CheckResult(6, "reduction scaling", 25 <= ratio <= 400,
                       f"infidelity {infid[10.0]:.4e} / {infid[100.0]:.4e} = {ratio:.2f} (range [25, 400])")


_GATE_INPUT = (_basis("000") + _basis("001") + _basis("100") + _basis("101")) / 2


def check_full_stack(seed: int = 0) -> CheckResult:
    rep = full_stack_gate(SystemParams(N=3, g=100.0, A=1.0, n_max=2), _GATE_INPUT, forced_outcome=0, seed=seed)
    ok = rep.two_qubit_fidelity >= 0.99 and rep.leakage <= 0.01
    return CheckResult(7, "full-stack gate", ok,
                       f"fidelity {rep.two_qubit_fidelity:.6f} (>= 0.99), leakage {rep.leakage:.3e} (<= 0.01)")


KAPPA_SWEEP = (0.0, 0.025, 0.05, 0.075, 0.1)


def check_dissipative(seed: int = 0) -> CheckResult:
    base = SystemParams(N=3, g=100.0, A=1.0, n_max=2)
    uni = full_stack_gate(base, _GATE_INPUT, forced_outcome=0, seed=seed).two_qubit_fidelity
    lin = full_stack_gate(base, _GATE_INPUT, forced_outcome=0, seed=seed, method="lindblad").two_qubit_fidelity
    d_zero = abs(uni - lin)
    gamma = base.g / 1e3
    fids = [full_stack_gate(base.replace(kappa=k, gamma=gamma), _GATE_INPUT, forced_outcome=0,
                            seed=seed).two_qubit_fidelity for k in KAPPA_SWEEP]
    monotone = all(b <= a for a, b in zip(fids, fids[1:]))
    decay = base.replace(kappa=base.g / 1e3, gamma=base.g / 1e3)
    t = 10.0 / base.A
    surv = polariton_survival(decay, t)
    est = decay_estimate(decay, t)
    ok = d_zero <= 1e-6 and monotone and abs(surv - est) <= 0.05
    sweep = ", ".join(f"{f:.4f}" for f in fids)
    return CheckResult(8, "dissipative regime", ok,
                       f"zero-rate gap {d_zero:.2e} (tol 1e-6); kappa sweep [{sweep}] monotone={monotone}; "
                       f"survival {surv:.4f} vs {est:.4f} (tol 0.05)")


def check_lindblad(seed: int = 0) -> CheckResult:
    kappa = 1.0
    p = SystemParams(N=1, g=0.0, A=1.0, n_max=4, kappa=kappa)
    space = LocalSpace(p.n_max)
    H = np.zeros((p.dim, p.dim))
    cops = collapse_operators(p)
    psi = np.zeros(p.dim, dtype=complex)
    psi[space.index(0, 2)] = psi[space.index(0, 3)] = 1 / math.sqrt(2)
    rho0 = np.outer(psi, psi.conj())
    n_op = np.diag(photon_numbers(p)).astype(float)
    n0 = float(np.trace(n_op @ rho0).real)
    err_n = tr_err = herm_err = 0.0
    for t in (0.25, 0.5, 1.0, 2.0, 4.0):
        rho = evolve_lindblad(H, cops, rho0, t, t / 8)
        err_n = max(err_n, abs(np.trace(n_op @ rho).real - n0 * math.exp(-kappa * t)))
        tr_err = max(tr_err, abs(np.trace(rho) - 1))
        herm_err = max(herm_err, float(np.max(np.abs(rho - rho.conj().T))))
    ok = err_n <= 1e-6 and tr_err <= 1e-8 and herm_err <= 1e-10
    return CheckResult(9, "Lindblad damped cavity", ok,
                       f"<n> error {err_n:.2e} (tol 1e-6), trace {tr_err:.2e} (tol 1e-8), "
                       f"hermiticity {herm_err:.2e} (tol 1e-10)")


def check_controlled_u(seed: int = 0) -> CheckResult:
    rng = np.random.default_rng(seed)
    Z = np.diag([1.0, -1.0])
    worst = 0.0
    for _ in range(100):
        U = compiler.random_unitary(rng)
        A, B = compiler.decompose_controlled_u(U)
        worst = max(worst, _phase_aligned_error(A.conj().T @ B.conj().T @ Z @ B @ Z @ A, U))
    return CheckResult(10, "controlled-U decomposition", worst <= 1e-8, f"max reconstruction error {worst:.2e} (tol 1e-8)")


def check_compiler(seed: int = 0) -> CheckResult:
    rng = np.random.default_rng(seed)
    plus = np.array([1.0, 1.0]) / math.sqrt(2)
    worst, branches = 1.0, 0
    for _ in range(20):
        circ = compiler.random_circuit(4, int(rng.integers(1, 7)), rng)
        sched = compiler.compile(circ)
        psi = compiler.random_state(4, rng)
        ideal = compiler.ideal_output(circ, psi)
        for med, reset in ((None, True), (plus, True), (plus, False)):
            for br in compiler.simulate_schedule(sched, psi, compiler.Exhaustive(), mediator_state=med,
                                                 reset_mediators=reset):
                out = compiler.logical_state(br.state, sched, br.frame)
                worst = min(worst, compiler.overlap(ideal, out))
                branches += 1
    return CheckResult(11, "compiler end-to-end", worst >= 1 - 1e-8,
                       f"min overlap 1 - {max(0.0, 1 - worst):.2e} over {branches} branches (tol 1e-8)")


CHECKS = (
    check_gate_identities, check_polariton_spectrum, check_dispersion, check_gate_classification,
    check_effective_coupling, check_reduction_scaling, check_full_stack, check_dissipative,
    check_lindblad, check_controlled_u, check_compiler,
)


def run_all(seed: int = 0) -> list[CheckResult]:
    return [check(seed) for check in CHECKS]
