#!/usr/bin/env python3
"""Compare the compiled and pure-Python state-vector kernels.

Reports best-of-``--repeat`` wall time per call and the speedup, plus one
end-to-end schedule simulation per backend.
"""

from __future__ import annotations

import argparse
import timeit

import numpy as np
from scipy.stats import unitary_group

from cavityqc import compiler, kernels


def bench(fn, repeat, number):
    return min(timeit.repeat(fn, repeat=repeat, number=number)) / number


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--qubits", type=int, default=18, help="register size for kernel timings")
    p.add_argument("--repeat", type=int, default=5)
    p.add_argument("--number", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args()

    backends = kernels.available_backends()
    if "compiled" not in backends:
        print("compiled kernels not built; only the python fallback is available")
    rng = np.random.default_rng(args.seed)
    n = args.qubits
    psi = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
    psi /= np.linalg.norm(psi)
    u2 = unitary_group.rvs(2, random_state=rng)
    u8 = unitary_group.rvs(8, random_state=rng)
    q = n // 2

    cases = {
        "apply_1q": lambda k: (lambda: k.apply_1q(psi, n, q, u2)),
        "apply_3q": lambda k: (lambda: k.apply_3q(psi, n, q - 1, u8)),
        "prob_one": lambda k: (lambda: k.prob_one(psi, n, q)),
        "project": lambda k: (lambda: k.project(psi, n, q, 1)),
    }
    print(f"{'kernel':<10}" + "".join(f"{b:>14}" for b in backends) + f"{'speedup':>10}")
    for name, make in cases.items():
        times = [bench(make(kernels.get_backend(b)), args.repeat, args.number) for b in backends]
        speed = times[0] / times[-1] if len(times) > 1 else 1.0
        print(f"{name:<10}" + "".join(f"{t * 1e3:>12.3f}ms" for t in times) + f"{speed:>9.2f}x")

    circ = compiler.random_circuit(8, 6, rng)
    sched = compiler.compile(circ)
    state = compiler.random_state(8, rng)
    plus = np.array([1.0, 1.0]) / np.sqrt(2)
    times = [bench(lambda b=b: compiler.simulate_schedule(sched, state, compiler.Sample(0), mediator_state=plus,
                                                          backend=b), args.repeat, 1) for b in backends]
    speed = times[0] / times[-1] if len(times) > 1 else 1.0
    label = f"schedule ({sched.layout.num_sites} sites, {len(sched.ops)} ops)"
    print(f"{label}:" + "".join(f" {b}={t * 1e3:.1f}ms" for b, t in zip(backends, times)) + f" speedup={speed:.2f}x")


if __name__ == "__main__":
    main()
