"""Lowering of logical circuits onto the mediated-gate chain.

Physical layout: computational qubits sit on even sites of a chain and the
odd sites between them are mediators. The native operation on a triple
``(s, s+1, s+2)`` is the XY evolution followed by a Z measurement of ``s+1``;
after a ``ConditionalZ`` on both outer sites for outcome 0 it acts as
``SWAP . CP`` (up to a global sign) on the two computational qubits.

* The SWAP of every native op is absorbed into the logical-to-physical
  permutation carried by the :class:`Frame`.
* A CZ between neighbouring qubits is one native op.
* A CZ between distant qubits shuttles the first operand next to the second,
  applies a swap-free CZ built from two native ops and single-qubit gates,
  then retraces the shuttle so every side-effect CP is applied twice.
* ``ControlledU`` follows ``A; CZ; B; CZ; (BA)^dag`` on the target plus a
  phase gate on the control that restores the global phase of ``U``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import unitary_group

from . import kernels
from .errors import DegenerateBranchError, InvalidParameterError, NumericalFailureError
from .gate_protocol import mediated_gate_unitary

UNITARY_TOL = 1e-10
_Z = np.diag([1.0, -1.0]).astype(complex)
_X = np.array([[0, 1], [1, 0]], dtype=complex)
_PAULIS = (
    _X,
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    _Z,
)


def _unitary(m, what="matrix") -> np.ndarray:
    m = np.array(m, dtype=complex)
    if m.shape != (2, 2):
        raise InvalidParameterError(f"{what} must be 2x2, got shape {m.shape}")
    if np.max(np.abs(m.conj().T @ m - np.eye(2))) > UNITARY_TOL:
        raise InvalidParameterError(f"{what} is not unitary to {UNITARY_TOL}")
    m.setflags(write=False)
    return m


# -- logical circuits ---------------------------------------------------------

@dataclass(frozen=True)
class SingleQubit:
    target: int
    matrix: np.ndarray = field(compare=False)

    def __post_init__(self):
        object.__setattr__(self, "matrix", _unitary(self.matrix, "single-qubit gate"))


@dataclass(frozen=True)
class CZ:
    a: int
    b: int


@dataclass(frozen=True)
class ControlledU:
    control: int
    target: int
    matrix: np.ndarray = field(compare=False)

    def __post_init__(self):
        object.__setattr__(self, "matrix", _unitary(self.matrix, "controlled-U target gate"))


@dataclass
class Circuit:
    num_qubits: int
    gates: list = field(default_factory=list)

    def __post_init__(self):
        if int(self.num_qubits) != self.num_qubits or self.num_qubits < 0:
            raise InvalidParameterError(f"num_qubits must be >= 0, got {self.num_qubits}")
        for g in self.gates:
            self._check(g)

    def _check(self, g):
        if isinstance(g, SingleQubit):
            qubits = (g.target,)
        elif isinstance(g, CZ):
            qubits = (g.a, g.b)
        elif isinstance(g, ControlledU):
            qubits = (g.control, g.target)
        else:
            raise InvalidParameterError(f"unsupported gate {g!r}")
        for q in qubits:
            if int(q) != q or not 0 <= q < self.num_qubits:
                raise InvalidParameterError(f"qubit index {q} out of range for {self.num_qubits} qubits")
        if len(set(qubits)) != len(qubits):
            raise InvalidParameterError(f"two-qubit gate on a single qubit: {g!r}")

    def append(self, gate):
        self._check(gate)
        self.gates.append(gate)
        return self

    def __add__(self, other: "Circuit") -> "Circuit":
        return Circuit(max(self.num_qubits, other.num_qubits), list(self.gates) + list(other.gates))


# -- native schedule ----------------------------------------------------------

@dataclass(frozen=True)
class XYEvolve:
    sites: tuple[int, int, int]


@dataclass(frozen=True)
class MeasureMediator:
    site: int
    mid: int


@dataclass(frozen=True)
class LocalRotation:
    site: int
    matrix: np.ndarray = field(compare=False)


@dataclass(frozen=True)
class ConditionalZ:
    """Z on ``site`` when measurement ``mid`` returned 0."""

    site: int
    mid: int


@dataclass(frozen=True)
class ChainLayout:
    """Computational qubits on even sites, mediators on the odd sites between."""

    num_computational: int

    def __post_init__(self):
        if int(self.num_computational) != self.num_computational or self.num_computational < 0:
            raise InvalidParameterError(f"layout needs >= 0 computational sites, got {self.num_computational}")

    @property
    def num_sites(self) -> int:
        return max(2 * self.num_computational - 1, 0)

    @property
    def computational_sites(self) -> list[int]:
        return list(range(0, self.num_sites, 2))

    @property
    def mediator_sites(self) -> list[int]:
        return list(range(1, self.num_sites, 2))


@dataclass
class NativeSchedule:
    ops: list
    layout: ChainLayout
    num_qubits: int
    initial_permutation: tuple[int, ...]
    final_permutation: tuple[int, ...]

    @property
    def num_measurements(self) -> int:
        return sum(isinstance(op, MeasureMediator) for op in self.ops)

    def counts(self) -> dict[str, int]:
        out: dict[str, int] = {}
        for op in self.ops:
            out[type(op).__name__] = out.get(type(op).__name__, 0) + 1
        return out


@dataclass
class Frame:
    """Logical-to-physical permutation plus the measurement record."""

    permutation: tuple[int, ...]
    outcome_log: list[tuple[int, int]] = field(default_factory=list)


# -- controlled-U decomposition -----------------------------------------------

def _rotation(axis, angle) -> np.ndarray:
    n = np.asarray(axis, dtype=float)
    gen = sum(c * p for c, p in zip(n, _PAULIS))
    return math.cos(angle / 2) * np.eye(2) - 1j * math.sin(angle / 2) * gen


def controlled_u_factors(U) -> tuple[np.ndarray, np.ndarray, float]:
    """Return ``(A, B, alpha)`` with ``U = exp(i alpha) A^dag B^dag Z B Z A``.

    ``B`` is a y rotation by half the rotation angle of ``U``, which makes
    ``B^dag Z B Z`` a rotation about ``-y``; ``A`` turns the axis of ``U``
    onto ``-y``.
    """
    U = _unitary(U, "U")
    su = U / np.sqrt(np.linalg.det(U))
    if np.trace(su).real < 0:
        su = -su
    cos_half = min(1.0, np.trace(su).real / 2)
    axis = np.array([(1j * np.trace(su @ p)).real / 2 for p in _PAULIS])
    sin_half = np.linalg.norm(axis)
    if sin_half < 1e-12:
        A = B = np.eye(2, dtype=complex)
    else:
        phi = 2 * math.atan2(sin_half, cos_half)
        m = axis / sin_half
        B = _rotation((0, 1, 0), phi / 2)
        target = np.array([0.0, -1.0, 0.0])
        cross = np.cross(m, target)
        c = float(np.clip(np.dot(m, target), -1, 1))
        if np.linalg.norm(cross) < 1e-12:
            A = np.eye(2, dtype=complex) if c > 0 else _rotation((1, 0, 0), math.pi)
        else:
            A = _rotation(cross / np.linalg.norm(cross), math.acos(c))
    recon = A.conj().T @ B.conj().T @ _Z @ B @ _Z @ A
    alpha = float(np.angle(np.trace(recon.conj().T @ U)))
    return A, B, alpha


def decompose_controlled_u(U) -> tuple[np.ndarray, np.ndarray]:
    """Single-qubit ``(A, B)`` with ``A^dag B^dag Z B Z A = U`` up to global phase."""
    A, B, _ = controlled_u_factors(U)
    return A, B


# -- compilation --------------------------------------------------------------

class _Lowering:
    def __init__(self, layout: ChainLayout, perm: list[int], first_mid: int):
        self.layout = layout
        self.perm = perm                    # slot index (logical + spares) -> site
        self.ops: list = []
        self.mid = first_mid

    def native(self, left: int):
        s1, s2, s3 = left, left + 1, left + 2
        self.ops += [XYEvolve((s1, s2, s3)), MeasureMediator(s2, self.mid),
                     ConditionalZ(s1, self.mid), ConditionalZ(s3, self.mid)]
        self.mid += 1
        i, j = self.perm.index(s1), self.perm.index(s3)
        self.perm[i], self.perm[j] = s3, s1

    def rot(self, q: int, m):
        self.ops.append(LocalRotation(self.perm[q], np.array(m, dtype=complex)))

    def controlled_u(self, c: int, t: int, U):
        A, B, alpha = controlled_u_factors(U)
        self.rot(t, A)
        self.cz(c, t)
        self.rot(t, B)
        self.cz(c, t)
        self.rot(t, (B @ A).conj().T)
        self.rot(c, np.diag([1.0, np.exp(1j * alpha)]))

    def _cz_in_place(self, a: int, b: int):
        # two native ops inside the controlled-U sandwich with U = Z: CZ without a net swap
        A, B, alpha = controlled_u_factors(_Z)
        left = min(self.perm[a], self.perm[b])
        self.rot(b, A)
        self.native(left)
        self.rot(b, B)
        self.native(left)
        self.rot(b, (B @ A).conj().T)
        self.rot(a, np.diag([1.0, np.exp(1j * alpha)]))

    def cz(self, a: int, b: int):
        if abs(self.perm[a] - self.perm[b]) == 2:
            self.native(min(self.perm[a], self.perm[b]))
            return
        step = 2 if self.perm[b] > self.perm[a] else -2
        path = []
        while abs(self.perm[a] - self.perm[b]) > 2:
            left = min(self.perm[a], self.perm[a] + step)
            self.native(left)
            path.append(left)
        self._cz_in_place(a, b)
        for left in reversed(path):
            self.native(left)


def default_layout(circuit: Circuit) -> ChainLayout:
    return ChainLayout(circuit.num_qubits)


def compile(circuit: Circuit, layout: ChainLayout | int | None = None,
            initial_permutation=None, first_measurement_id: int = 0) -> NativeSchedule:
    """Lower ``circuit`` to native operations on a :class:`ChainLayout`.

    ``initial_permutation`` maps logical qubits to computational sites (default
    ``q -> 2q``), which lets a later schedule continue from an earlier frame.
    """
    if layout is None:
        layout = default_layout(circuit)
    elif isinstance(layout, int):
        layout = ChainLayout(layout)
    if layout.num_computational < circuit.num_qubits:
        raise InvalidParameterError(
            f"layout has {layout.num_computational} computational sites, circuit needs {circuit.num_qubits}"
        )
    perm = _full_permutation(layout, circuit.num_qubits, initial_permutation)
    low = _Lowering(layout, list(perm), first_measurement_id)
    for g in circuit.gates:
        if isinstance(g, SingleQubit):
            low.rot(g.target, g.matrix)
        elif isinstance(g, CZ):
            low.cz(g.a, g.b)
        else:
            low.controlled_u(g.control, g.target, g.matrix)
    n = circuit.num_qubits
    return NativeSchedule(low.ops, layout, n, tuple(perm[:n]), tuple(low.perm[:n]))


def _full_permutation(layout: ChainLayout, n: int, initial) -> list[int]:
    sites = layout.computational_sites
    if initial is None:
        used = sites[:n]
    else:
        used = [int(s) for s in initial]
        if len(used) != n or len(set(used)) != n or any(s not in sites for s in used):
            raise InvalidParameterError(f"invalid initial permutation {initial} for layout {layout}")
    spares = [s for s in sites if s not in used]
    return used + spares


def permutation_trace(schedule: NativeSchedule) -> list[tuple[int, ...]]:
    """Logical-to-physical permutation after every op of ``schedule``."""
    perm = _full_permutation(schedule.layout, schedule.num_qubits, schedule.initial_permutation)
    trace = []
    for op in schedule.ops:
        if isinstance(op, XYEvolve):
            s1, _, s3 = op.sites
            i, j = perm.index(s1), perm.index(s3)
            perm[i], perm[j] = s3, s1
        trace.append(tuple(perm[: schedule.num_qubits]))
    return trace


# -- simulation ---------------------------------------------------------------

@dataclass(frozen=True)
class Sample:
    seed: int = 0


@dataclass(frozen=True)
class Forced:
    outcomes: tuple[int, ...]


@dataclass(frozen=True)
class Exhaustive:
    """Follow every branch whose cumulative probability exceeds ``min_probability``."""

    min_probability: float = 1e-12


@dataclass
class Branch:
    outcomes: tuple[int, ...]
    probability: float
    state: np.ndarray          # physical chain state, site 0 most significant
    frame: Frame


def _place(schedule: NativeSchedule, logical, mediator_state) -> np.ndarray:
    lay = schedule.layout
    n, S = schedule.num_qubits, lay.num_sites
    psi = np.asarray(logical, dtype=complex).reshape(-1)
    if psi.shape != (1 << n,):
        raise InvalidParameterError(f"initial state must have length {1 << n}, got {psi.size}")
    psi = psi / np.linalg.norm(psi)
    if S == 0:
        return psi
    med = np.array([1.0, 0.0], dtype=complex) if mediator_state is None else np.asarray(mediator_state, dtype=complex)
    med = med / np.linalg.norm(med)
    perm = _full_permutation(lay, n, schedule.initial_permutation)
    zero = np.array([1.0, 0.0], dtype=complex)
    t = psi.reshape((2,) * n) if n else psi.reshape(())
    axis_of_site = {}
    for q, s in enumerate(perm):
        if q >= n:
            t = np.multiply.outer(t, zero)
        axis_of_site[s] = q
    k = len(perm)
    for s in lay.mediator_sites:
        t = np.multiply.outer(t, med)
        axis_of_site[s] = k
        k += 1
    return np.ascontiguousarray(np.transpose(t, [axis_of_site[s] for s in range(S)])).reshape(-1)


def logical_state(state, schedule: NativeSchedule, frame: Frame, tol: float = 1e-8) -> np.ndarray:
    """Un-permute a physical chain state into logical qubit order.

    Mediators and spare sites must be unentangled from the logical register.
    """
    lay = schedule.layout
    n, S = schedule.num_qubits, lay.num_sites
    if S == 0:
        return np.asarray(state, dtype=complex)
    t = np.asarray(state, dtype=complex).reshape((2,) * S)
    order = list(frame.permutation) + [s for s in range(S) if s not in frame.permutation]
    m = np.transpose(t, order).reshape(1 << n, -1)
    col = int(np.argmax(np.linalg.norm(m, axis=0)))
    v = m[:, col] / np.linalg.norm(m[:, col])
    resid = m - np.outer(v, v.conj() @ m)
    if np.linalg.norm(resid) > tol:
        raise NumericalFailureError("logical register is entangled with mediator or spare sites")
    return v


def simulate_schedule(schedule: NativeSchedule, initial_state, outcome_policy=None,
                      mediator_state=None, backend: str | None = None,
                      reset_mediators: bool = True) -> list[Branch]:
    """Execute a schedule with ideal native gates on the effective qubit chain.

    Every mediator starts in ``mediator_state`` (default ``|0>``). With
    ``reset_mediators`` a mediator found in ``|1>`` is flipped back to ``|0>``
    right after its measurement; the outer-qubit action of the native gate does
    not depend on the mediator input, so either choice is valid. Branches come
    back in lexicographic outcome order.
    """
    kern = kernels.get_backend(backend)
    policy = Exhaustive() if outcome_policy is None else outcome_policy
    S = schedule.layout.num_sites
    native = mediated_gate_unitary(1.0).matrix
    psi0 = _place(schedule, initial_state, mediator_state)
    n_meas = schedule.num_measurements
    if isinstance(policy, Forced) and len(policy.outcomes) != n_meas:
        raise InvalidParameterError(f"forced sequence has {len(policy.outcomes)} outcomes, schedule measures {n_meas}")
    rng = np.random.default_rng(policy.seed) if isinstance(policy, Sample) else None

    results = []
    stack = [(0, psi0, 1.0, {}, [])]
    while stack:
        pc, psi, prob, outcomes, log = stack.pop()
        while pc < len(schedule.ops):
            op = schedule.ops[pc]
            pc += 1
            if isinstance(op, XYEvolve):
                psi = kern.apply_3q(psi, S, op.sites[0], native)
            elif isinstance(op, LocalRotation):
                psi = kern.apply_1q(psi, S, op.site, op.matrix)
            elif isinstance(op, ConditionalZ):
                if outcomes[op.mid] == 0:
                    psi = kern.apply_1q(psi, S, op.site, _Z)
            elif isinstance(op, MeasureMediator):
                p1 = min(1.0, max(0.0, kern.prob_one(psi, S, op.site)))
                probs = (1.0 - p1, p1)
                if isinstance(policy, Exhaustive):
                    bits = [b for b in (0, 1) if prob * probs[b] > policy.min_probability]
                elif isinstance(policy, Forced):
                    bits = [int(policy.outcomes[len(log)])]
                else:
                    bits = [int(rng.random() >= probs[0])]
                for b in bits:
                    if probs[b] < 1e-14:
                        raise DegenerateBranchError(f"outcome {b} of measurement {op.mid} has probability {probs[b]:.3g}")
                # push all but the first, continue with the first
                for b in reversed(bits[1:]):
                    post = kern.project(psi, S, op.site, b) / math.sqrt(probs[b])
                    if reset_mediators and b == 1:
                        post = kern.apply_1q(post, S, op.site, _X)
                    stack.append((pc, post, prob * probs[b], {**outcomes, op.mid: b}, log + [(op.mid, b)]))
                b = bits[0]
                psi = kern.project(psi, S, op.site, b) / math.sqrt(probs[b])
                if reset_mediators and b == 1:
                    psi = kern.apply_1q(psi, S, op.site, _X)
                prob *= probs[b]
                outcomes = {**outcomes, op.mid: b}
                log = log + [(op.mid, b)]
            else:
                raise InvalidParameterError(f"unknown native op {op!r}")
        frame = Frame(schedule.final_permutation, log)
        results.append(Branch(tuple(b for _, b in log), prob, psi, frame))
    results.sort(key=lambda br: br.outcomes)
    return results


# -- ideal reference ----------------------------------------------------------

def _embed_1q(m, q, n):
    return np.kron(np.kron(np.eye(1 << q), m), np.eye(1 << (n - q - 1)))


def gate_matrix(gate, n: int) -> np.ndarray:
    """Dense ``2^n`` matrix of one logical gate (qubit 0 most significant)."""
    if isinstance(gate, SingleQubit):
        return _embed_1q(gate.matrix, gate.target, n)
    p0, p1 = np.diag([1.0, 0.0]), np.diag([0.0, 1.0])
    if isinstance(gate, CZ):
        return _embed_1q(p0, gate.a, n) + _embed_1q(p1, gate.a, n) @ _embed_1q(_Z, gate.b, n)
    if isinstance(gate, ControlledU):
        return _embed_1q(p0, gate.control, n) + _embed_1q(p1, gate.control, n) @ _embed_1q(gate.matrix, gate.target, n)
    raise InvalidParameterError(f"unsupported gate {gate!r}")


def ideal_output(circuit: Circuit, state) -> np.ndarray:
    psi = np.asarray(state, dtype=complex).reshape(-1)
    psi = psi / np.linalg.norm(psi)
    for g in circuit.gates:
        psi = gate_matrix(g, circuit.num_qubits) @ psi
    return psi


def overlap(a, b) -> float:
    """``|<a|b>|^2`` for normalized states; global phase does not matter."""
    return float(abs(np.vdot(a, b)) ** 2)


def random_unitary(rng) -> np.ndarray:
    return unitary_group.rvs(2, random_state=rng)


def random_circuit(num_qubits: int, depth: int, rng, controlled_u: bool = True) -> Circuit:
    """Layers of Haar single-qubit gates and one CZ on a random pair each.

    With ``controlled_u`` one layer's CZ is replaced by a ControlledU with a
    Haar-random target unitary.
    """
    if num_qubits < 2:
        raise InvalidParameterError("random circuits need at least two qubits")
    c = Circuit(num_qubits)
    cu_layer = int(rng.integers(depth)) if controlled_u and depth > 0 else -1
    for layer in range(depth):
        for q in range(num_qubits):
            c.append(SingleQubit(q, random_unitary(rng)))
        a, b = (int(x) for x in rng.choice(num_qubits, size=2, replace=False))
        c.append(ControlledU(a, b, random_unitary(rng)) if layer == cu_layer else CZ(a, b))
    return c


def random_state(num_qubits: int, rng) -> np.ndarray:
    v = rng.normal(size=1 << num_qubits) + 1j * rng.normal(size=1 << num_qubits)
    return v / np.linalg.norm(v)


# -- text formats -------------------------------------------------------------

def _fmt(x: float) -> str:
    return repr(float(x))


def _components(m) -> list[str]:
    return [_fmt(v) for z in np.asarray(m, dtype=complex).reshape(-1) for v in (z.real, z.imag)]


def _matrix(tokens, lineno) -> np.ndarray:
    if len(tokens) != 8:
        raise InvalidParameterError(f"line {lineno}: expected 8 matrix components, got {len(tokens)}")
    try:
        vals = [float(t) for t in tokens]
    except ValueError:
        raise InvalidParameterError(f"line {lineno}: non-numeric matrix component") from None
    return np.array([complex(vals[i], vals[i + 1]) for i in range(0, 8, 2)]).reshape(2, 2)


def _int(tok, lineno) -> int:
    try:
        v = int(tok)
    except ValueError:
        raise InvalidParameterError(f"line {lineno}: expected integer, got {tok!r}") from None
    if v < 0:
        raise InvalidParameterError(f"line {lineno}: negative index {v}")
    return v


def _lines(text):
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield lineno, line.split()


def parse_circuit(text: str, num_qubits: int | None = None) -> Circuit:
    """Parse ``SQ``/``CZ``/``CU`` lines; the qubit count defaults to max index + 1."""
    gates, highest = [], -1
    for lineno, tok in _lines(text):
        kind, args = tok[0].upper(), tok[1:]
        if kind == "SQ" and len(args) == 9:
            g = SingleQubit(_int(args[0], lineno), _matrix(args[1:], lineno))
            highest = max(highest, g.target)
        elif kind == "CZ" and len(args) == 2:
            g = CZ(_int(args[0], lineno), _int(args[1], lineno))
            highest = max(highest, g.a, g.b)
        elif kind == "CU" and len(args) == 10:
            g = ControlledU(_int(args[0], lineno), _int(args[1], lineno), _matrix(args[2:], lineno))
            highest = max(highest, g.control, g.target)
        else:
            raise InvalidParameterError(f"line {lineno}: cannot parse {' '.join(tok)!r}")
        gates.append(g)
    n = highest + 1 if num_qubits is None else num_qubits
    return Circuit(n, gates)


def format_circuit(circuit: Circuit) -> str:
    out = []
    for g in circuit.gates:
        if isinstance(g, SingleQubit):
            out.append(" ".join(["SQ", str(g.target)] + _components(g.matrix)))
        elif isinstance(g, CZ):
            out.append(f"CZ {g.a} {g.b}")
        else:
            out.append(" ".join(["CU", str(g.control), str(g.target)] + _components(g.matrix)))
    return "".join(line + "\n" for line in out)


def format_schedule(schedule: NativeSchedule) -> str:
    """Serialize; layout and permutations travel in ``#`` header comments."""
    out = [
        f"# layout {schedule.layout.num_computational}",
        f"# qubits {schedule.num_qubits}",
        "# permutation " + " ".join(map(str, schedule.initial_permutation)),
    ]
    for op in schedule.ops:
        if isinstance(op, XYEvolve):
            out.append("XY {} {} {}".format(*op.sites))
        elif isinstance(op, MeasureMediator):
            out.append(f"MEAS {op.site} {op.mid}")
        elif isinstance(op, LocalRotation):
            out.append(" ".join(["ROT", str(op.site)] + _components(op.matrix)))
        else:
            out.append(f"CONDZ {op.site} {op.mid}")
    out.append("# final-permutation " + " ".join(map(str, schedule.final_permutation)))
    return "".join(line + "\n" for line in out)


def parse_schedule(text: str) -> NativeSchedule:
    header = {}
    for raw in text.splitlines():
        s = raw.strip()
        if s.startswith("#"):
            parts = s[1:].split()
            if parts and parts[0] in ("layout", "qubits", "permutation"):
                header[parts[0]] = [int(p) for p in parts[1:]]
    ops, highest = [], -1
    for lineno, tok in _lines(text):
        kind, args = tok[0].upper(), tok[1:]
        if kind == "XY" and len(args) == 3:
            sites = tuple(_int(a, lineno) for a in args)
            if sites[1] != sites[0] + 1 or sites[2] != sites[0] + 2 or sites[0] % 2:
                raise InvalidParameterError(f"line {lineno}: XY triple {sites} is not (even, mediator, even)")
            ops.append(XYEvolve(sites))
            highest = max(highest, sites[2])
        elif kind == "MEAS" and len(args) == 2:
            ops.append(MeasureMediator(_int(args[0], lineno), _int(args[1], lineno)))
        elif kind == "ROT" and len(args) == 9:
            ops.append(LocalRotation(_int(args[0], lineno), _unitary(_matrix(args[1:], lineno), "ROT matrix")))
            highest = max(highest, ops[-1].site)
        elif kind == "CONDZ" and len(args) == 2:
            ops.append(ConditionalZ(_int(args[0], lineno), _int(args[1], lineno)))
        else:
            raise InvalidParameterError(f"line {lineno}: cannot parse {' '.join(tok)!r}")
    n_comp = header.get("layout", [highest // 2 + 1 if highest >= 0 else 0])[0]
    layout = ChainLayout(n_comp)
    n = header.get("qubits", [n_comp])[0]
    perm = tuple(header.get("permutation", layout.computational_sites[:n]))
    sched = NativeSchedule(ops, layout, n, perm, perm)
    _validate_schedule(sched)
    trace = permutation_trace(sched)
    sched.final_permutation = trace[-1] if trace else perm
    return sched


def _validate_schedule(schedule: NativeSchedule):
    S = schedule.layout.num_sites
    measured = set()
    pending = None
    for op in schedule.ops:
        if isinstance(op, XYEvolve):
            if op.sites[2] >= S:
                raise InvalidParameterError(f"XY triple {op.sites} outside a {S}-site chain")
            pending = op.sites[1]
        elif isinstance(op, MeasureMediator):
            if op.site != pending:
                raise InvalidParameterError(f"MEAS on site {op.site} does not follow an XY on that mediator")
            if op.mid in measured:
                raise InvalidParameterError(f"duplicate measurement id {op.mid}")
            measured.add(op.mid)
            pending = None
        elif isinstance(op, ConditionalZ):
            if op.mid not in measured:
                raise InvalidParameterError(f"CONDZ refers to unknown measurement {op.mid}")
        if getattr(op, "site", 0) >= max(S, 1):
            raise InvalidParameterError(f"site {op.site} outside a {S}-site chain")


def branch_outcomes(n: int):
    """All outcome tuples of length ``n`` in lexicographic order."""
    return list(itertools.product((0, 1), repeat=n))
