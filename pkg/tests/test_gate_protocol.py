import math

import numpy as np
import pytest

from cavityqc.errors import DegenerateBranchError, InvalidParameterError
from cavityqc.gate_protocol import (
    CP, SWAP, ZZ, GateLabel, average_gate_fidelity, choi_matrix, classify_two_qubit_action, decay_estimate,
    extremal_block, full_stack_gate, measure_mediator, mediated_gate_unitary, polariton_survival,
)
from cavityqc.jch_model import SystemParams

GATE_TABLE = [
    ("000", 1, "000"), ("001", -1, "100"), ("100", -1, "001"), ("101", -1, "101"),
    ("010", -1, "010"), ("110", -1, "011"), ("011", -1, "110"), ("111", 1, "111"),
]


def _basis(bits):
    v = np.zeros(1 << len(bits), dtype=complex)
    v[int(bits, 2)] = 1
    return v


GATE_INPUT = (_basis("000") + _basis("001") + _basis("100") + _basis("101")) / 2


@pytest.mark.parametrize("A", [0.1, 1.0, 7.0])
@pytest.mark.parametrize("src,sign,dst", GATE_TABLE)
def test_mediated_gate_table(A, src, sign, dst):
    U = mediated_gate_unitary(A).matrix
    assert np.max(np.abs(U @ _basis(src) - sign * _basis(dst))) < 1e-10


def test_extremal_blocks():
    U = mediated_gate_unitary(1.0).matrix
    assert np.allclose(extremal_block(U, 0), SWAP @ ZZ @ CP, atol=1e-12)
    assert np.allclose(extremal_block(U, 1), -SWAP @ CP, atol=1e-12)
    for m in (0, 1):
        label, ideal = classify_two_qubit_action(m)
        assert label == GateLabel(m)
        assert np.allclose(extremal_block(U, m), ideal.matrix, atol=1e-12)
    with pytest.raises(InvalidParameterError):
        classify_two_qubit_action(2)


def test_measure_mediator_forced_and_degenerate():
    psi = (_basis("000") + _basis("010")) / math.sqrt(2)
    m, post, p = measure_mediator(psi, forced_outcome=1)
    assert m == 1 and p == pytest.approx(0.5)
    assert np.allclose(post, _basis("010"))
    with pytest.raises(DegenerateBranchError):
        measure_mediator(_basis("000"), forced_outcome=1)
    with pytest.raises(InvalidParameterError):
        measure_mediator(2 * _basis("000"))


def test_measure_mediator_sampling_is_seeded():
    psi = (_basis("000") + _basis("010")) / math.sqrt(2)
    draws = [measure_mediator(psi, seed=s)[0] for s in range(40)]
    assert draws == [measure_mediator(psi, seed=s)[0] for s in range(40)]
    assert set(draws) == {0, 1}


def test_fidelity_representations_agree(rng):
    from scipy.stats import unitary_group
    U = unitary_group.rvs(4, random_state=rng)
    V = unitary_group.rvs(4, random_state=rng)
    outs = np.zeros((4, 4, 4, 4), dtype=complex)
    for x in range(4):
        for y in range(4):
            outs[x, y] = np.outer(V[:, x], V[:, y].conj())
    f_u = average_gate_fidelity(V, U, "unitary")
    assert average_gate_fidelity([V], U, "kraus") == pytest.approx(f_u, abs=1e-12)
    assert average_gate_fidelity(choi_matrix(outs), U, "choi") == pytest.approx(f_u, abs=1e-12)
    assert average_gate_fidelity(U, U) == pytest.approx(1.0)
    with pytest.raises(InvalidParameterError):
        average_gate_fidelity(U, U, "bogus")


def test_fidelity_of_depolarizing_channel():
    # fully depolarizing channel on d = 4: F = 1 / (d + 1) + ... = (d*1/d^2 + 1)/(d+1)
    d = 4
    outs = np.zeros((d, d, d, d), dtype=complex)
    for x in range(d):
        outs[x, x] = np.eye(d) / d
    f = average_gate_fidelity(choi_matrix(outs), np.eye(d), "choi")
    assert f == pytest.approx((d / d**2 + 1) / (d + 1))


# frozen oracle values from the three-site lattice (excitation-restricted)
FULL_STACK_ORACLE = {
    10.0: (0.8972886124897197, 0.0013793891310223128, 0.9984658215140029),
    100.0: (0.9988074877920239, 2.9884313812900132e-05, 0.9999700947397603),
}


@pytest.mark.parametrize("g", sorted(FULL_STACK_ORACLE))
def test_full_stack_unitary_oracle(g):
    rep = full_stack_gate(SystemParams(N=3, g=g), GATE_INPUT, forced_outcome=0)
    fid, leak, prob = FULL_STACK_ORACLE[g]
    assert rep.two_qubit_fidelity == pytest.approx(fid, abs=1e-9)
    assert rep.leakage == pytest.approx(leak, rel=1e-6)
    assert rep.outcome_probability == pytest.approx(prob, abs=1e-9)
    assert rep.label == "SWAP_ZZ_CP" and rep.method == "unitary"
    assert rep.elapsed_model_time == pytest.approx(math.pi / (math.sqrt(2) * 0.5), rel=1e-9)


def test_full_stack_outcome_one():
    psi = (_basis("010") + _basis("011") + _basis("110") + _basis("111")) / 2
    rep = full_stack_gate(SystemParams(N=3, g=100.0), psi, forced_outcome=1)
    assert rep.label == "SWAP_CP"
    assert rep.two_qubit_fidelity > 0.99


def test_full_stack_sampling_seeded():
    psi = (_basis("000") + _basis("010")) / math.sqrt(2)
    p = SystemParams(N=3, g=100.0)
    outs = [full_stack_gate(p, psi, seed=s).outcome for s in range(12)]
    assert outs == [full_stack_gate(p, psi, seed=s).outcome for s in range(12)]
    assert set(outs) == {0, 1}


def test_full_stack_lindblad_matches_unitary_at_zero_rates():
    p = SystemParams(N=3, g=100.0)
    a = full_stack_gate(p, GATE_INPUT, forced_outcome=0)
    b = full_stack_gate(p, GATE_INPUT, forced_outcome=0, method="lindblad")
    assert abs(a.two_qubit_fidelity - b.two_qubit_fidelity) < 1e-9
    assert abs(a.leakage - b.leakage) < 1e-9


def test_full_stack_dissipative_oracle_and_solvers():
    p = SystemParams(N=3, g=100.0, kappa=0.1, gamma=0.1)
    rk4 = full_stack_gate(p, GATE_INPUT, forced_outcome=0)
    kry = full_stack_gate(p, GATE_INPUT, forced_outcome=0, solver="krylov")
    assert rk4.two_qubit_fidelity == pytest.approx(0.720860611168502, abs=1e-6)
    assert abs(rk4.two_qubit_fidelity - kry.two_qubit_fidelity) < 1e-8
    assert rk4.method == "lindblad"


def test_full_stack_zero_hopping_reference():
    rep = full_stack_gate(SystemParams(N=3, g=100.0, A=0.0), GATE_INPUT, forced_outcome=0, reference=np.eye(4))
    assert rep.elapsed_model_time == 0.0
    assert rep.two_qubit_fidelity == pytest.approx(1.0)


def test_full_stack_errors():
    with pytest.raises(InvalidParameterError):
        full_stack_gate(SystemParams(N=2), GATE_INPUT[:4])
    with pytest.raises(InvalidParameterError):
        full_stack_gate(SystemParams(N=3, n_max=1), GATE_INPUT)
    with pytest.raises(InvalidParameterError):
        full_stack_gate(SystemParams(N=3, kappa=0.1), GATE_INPUT, method="unitary")
    with pytest.raises(InvalidParameterError):
        full_stack_gate(SystemParams(N=3), GATE_INPUT, solver="euler")
    with pytest.raises(DegenerateBranchError):
        full_stack_gate(SystemParams(N=3), _basis("000"), forced_outcome=1)


def test_polariton_survival_against_estimate():
    p = SystemParams(N=3, g=100.0, kappa=0.1, gamma=0.1)
    assert decay_estimate(p, 10.0) == pytest.approx(math.exp(-1))
    assert polariton_survival(p, 10.0) == pytest.approx(0.36787294179281277, abs=1e-6)
    assert polariton_survival(p, 0.0) == pytest.approx(1.0)
    with pytest.raises(InvalidParameterError):
        polariton_survival(p, 1.0, site=5)
