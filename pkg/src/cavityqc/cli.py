"""Command-line interface: ``cavityqc <subcommand> [options]``.

Physical quantities in a ``--config`` JSON document are ratios to the hopping
amplitude ``A`` (so ``A = 1``). An optional ``"absolute"`` block supplies
``A`` and any other quantity in absolute units; top-level ratios are then
scaled by that ``A``.

Exit codes: 0 success, 1 invalid configuration or usage, 2 numerical failure
(including a failed selftest), 3 resource cap exceeded.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import acceptance, compiler
from .errors import (
    CavityQCError, InvalidParameterError, NumericalFailureError, ResourceLimitError,
)
from .gate_protocol import full_stack_gate
from .jch_model import DEFAULT_CAP_DIM, SystemParams, dispersion, hopping_matrix, jc_single_site_spectrum
from .polariton import fit_effective_coupling, reduction_infidelity

EXIT_OK, EXIT_USAGE, EXIT_NUMERICAL, EXIT_RESOURCE = 0, 1, 2, 3

PHYSICAL = ("omega_d", "omega_0", "g", "kappa", "gamma")
STRUCTURAL = ("N", "n_max", "boundary")

# subcommand -> (SystemParams defaults, extra allowed keys)
SUBCOMMANDS = {
    "dispersion": ({"N": 8, "boundary": "periodic", "g": 0.0}, ()),
    "spectrum": ({"N": 1, "n_max": 3}, ()),
    "reduce": ({"N": 3}, ("g_grid", "input", "solver")),
    "gate": ({"N": 3}, ("input", "method", "solver")),
    "noise-sweep": ({"N": 3}, ("kappa_grid", "gamma_grid", "input", "solver")),
    "compile": ({}, ("num_qubits", "layout")),
    "simulate": ({}, ("num_qubits", "layout", "input", "policy", "mediator_state", "reset_mediators")),
    "presets": ({}, ()),
    "selftest": ({}, ()),
}

# technology profiles: coupling and loss ratios, coherence window 10/A
PRESETS = [
    {"name": "toroidal", "g_over_A": 100.0, "g_over_kappa": 1e3, "g_over_gamma": 1e3,
     "omega_over_g": 1e4, "window_over_A": 10.0, "window_ns": 10.0},
    {"name": "pbg-defect", "g_over_A": 100.0, "g_over_kappa": 1e2, "g_over_gamma": 1e2,
     "omega_over_g": 1e4, "window_over_A": 10.0, "window_ns": None},
    {"name": "stripline", "g_over_A": 100.0, "g_over_kappa": 1e3, "g_over_gamma": 1e3,
     "omega_over_g": 1e4, "window_over_A": 10.0, "window_ns": 100.0},
]


class UsageError(InvalidParameterError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# -- configuration ------------------------------------------------------------

def load_config(path: str | None, command: str) -> tuple[SystemParams, dict]:
    """Validate a JSON config for ``command``; return params and extra keys."""
    defaults, extras = SUBCOMMANDS[command]
    raw = {}
    if path is not None:
        try:
            raw = json.loads(Path(path).read_text())
        except OSError as exc:
            raise InvalidParameterError(f"cannot read config {path}: {exc}") from None
        except json.JSONDecodeError as exc:
            raise InvalidParameterError(f"config {path} is not valid JSON: {exc}") from None
        if not isinstance(raw, dict):
            raise InvalidParameterError("config must be a JSON object")
    allowed = set(PHYSICAL) | set(STRUCTURAL) | set(extras) | {"absolute"}
    unknown = sorted(set(raw) - allowed)
    if unknown:
        raise InvalidParameterError(f"unknown config keys for {command}: {', '.join(unknown)}")

    absolute = raw.get("absolute", {})
    if not isinstance(absolute, dict):
        raise InvalidParameterError("'absolute' must be a JSON object")
    bad = sorted(set(absolute) - set(PHYSICAL) - {"A"})
    if bad:
        raise InvalidParameterError(f"unknown keys in 'absolute': {', '.join(bad)}")
    clash = sorted(set(absolute) & set(raw))
    if clash:
        raise InvalidParameterError(f"keys given both as ratios and absolute: {', '.join(clash)}")
    if absolute and "A" not in absolute:
        raise InvalidParameterError("'absolute' block must define A")
    scale = float(absolute.get("A", 1.0))

    values = dict(defaults)
    values["A"] = scale
    for key in PHYSICAL + STRUCTURAL:
        if key in raw:
            values[key] = raw[key]
    for key in PHYSICAL:
        if key in raw:
            values[key] = _number(raw[key], key) * scale
        if key in absolute:
            values[key] = _number(absolute[key], key)
    for key in ("N", "n_max"):
        if key in values and (isinstance(values[key], bool) or not isinstance(values[key], int)):
            raise InvalidParameterError(f"{key} must be an integer")
    try:
        params = SystemParams(**values)
    except TypeError as exc:
        raise InvalidParameterError(str(exc)) from None
    return params, {k: raw[k] for k in extras if k in raw}


def _number(v, key) -> float:
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise InvalidParameterError(f"{key} must be a number, got {v!r}")
    return float(v)


def _grid(extra, key, default) -> list[float]:
    vals = extra.get(key, default)
    if not isinstance(vals, list) or not vals:
        raise InvalidParameterError(f"{key} must be a non-empty list of numbers")
    return [_number(v, key) for v in vals]


def parse_state(desc, n: int) -> np.ndarray:
    """A bit string like ``"101"`` or a list of real / ``[re, im]`` amplitudes."""
    if isinstance(desc, str):
        if len(desc) != n or set(desc) - {"0", "1"}:
            raise InvalidParameterError(f"input bit string must have {n} bits, got {desc!r}")
        v = np.zeros(1 << n, dtype=complex)
        v[int(desc, 2)] = 1
        return v
    if isinstance(desc, list) and len(desc) == 1 << n:
        amps = []
        for a in desc:
            if isinstance(a, list) and len(a) == 2:
                amps.append(complex(_number(a[0], "input"), _number(a[1], "input")))
            else:
                amps.append(complex(_number(a, "input")))
        v = np.array(amps)
        if np.linalg.norm(v) == 0:
            raise InvalidParameterError("input state is zero")
        return v / np.linalg.norm(v)
    raise InvalidParameterError(f"input must be a {n}-bit string or {1 << n} amplitudes")


def parse_outcomes(bits: str | None) -> list[int] | None:
    if bits is None:
        return None
    if not bits or set(bits) - {"0", "1"}:
        raise InvalidParameterError(f"--force-outcome must be a string of 0/1, got {bits!r}")
    return [int(b) for b in bits]


# -- output -------------------------------------------------------------------

def _cell(v):
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if v is None:
        return ""
    return v


def _json_scalar(v):
    if isinstance(v, np.generic):
        return v.item()
    raise TypeError(f"cannot serialize {type(v).__name__}")


def render(rows: list[dict], fmt: str) -> str:
    if fmt == "json":
        return json.dumps(rows, indent=2, default=_json_scalar) + "\n"
    if not rows:
        return ""
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: _cell(v) for k, v in row.items()})
    return buf.getvalue()


def _emit(text: str, out: str | None):
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _echo(params: SystemParams) -> dict:
    return params.to_dict()


# -- subcommands --------------------------------------------------------------

def cmd_dispersion(params, extra, args):
    if params.boundary != "periodic":
        raise InvalidParameterError("dispersion needs a periodic ring")
    eig = np.linalg.eigvalsh(hopping_matrix(params))
    band = np.sort([dispersion(k, params) for k in range(params.N)])
    check = float(np.max(np.abs(eig - band)))
    return [{"k": k, "omega": dispersion(k, params), "hopping_eig_error": check, **_echo(params)}
            for k in range(params.N)]


def cmd_spectrum(params, extra, args):
    params = params.replace(N=1)
    delta = params.omega_d - params.omega_0
    rows, seen = [], {}
    for energy, n in jc_single_site_spectrum(params):
        if n > params.n_max:
            continue                     # top sector is cut by the photon truncation
        if n == 0:
            branch, exact = "ground", 0.0
        else:
            i = seen.get(n, 0)
            seen[n] = i + 1
            branch = "-" if i == 0 else "+"
            s = -1 if i == 0 else 1
            exact = n * params.omega_d - delta / 2 + s * math.sqrt(delta**2 / 4 + params.g**2 * n)
        rows.append({"n": n, "branch": branch, "energy": energy, "analytic": exact,
                     "error": abs(energy - exact), **_echo(params)})
    return rows


def _gate_time_for(params) -> float:
    t_eff = fit_effective_coupling(params).t_eff
    if t_eff == 0:
        raise NumericalFailureError("effective coupling vanishes; gate time undefined")
    return math.pi / (math.sqrt(2) * t_eff)


def cmd_reduce(params, extra, args):
    psi = parse_state(extra.get("input", "100"), params.N)
    rows = []
    for g in _grid(extra, "g_grid", [10.0, 30.0, 100.0, 300.0]):
        p = params.replace(g=g * params.A)
        t_eff = fit_effective_coupling(p).t_eff
        t = _gate_time_for(p)
        infid, leak = reduction_infidelity(p, t, psi, cap_dim=args.cap_dim)
        rows.append({"g_over_A": g, "t_eff_over_A": t_eff / p.A, "time": t,
                     "infidelity": infid, "leakage": leak, **_echo(p)})
    return rows


_GATE_INPUT = [0.5, 0.5, 0, 0, 0.5, 0.5, 0, 0]


def _gate_rows(params, extra, args, outcomes):
    psi = parse_state(extra.get("input", _GATE_INPUT), 3)
    kwargs = {"seed": args.seed, "cap_dim": args.cap_dim, "method": extra.get("method", "auto"),
              "solver": extra.get("solver", "rk4")}
    rows = []
    for m in outcomes:
        rep = full_stack_gate(params, psi, forced_outcome=m, **kwargs)
        rows.append({**rep.to_dict(), "forced": m is not None, "seed": args.seed, **_echo(params)})
    return rows


def cmd_gate(params, extra, args):
    forced = parse_outcomes(args.force_outcome)
    return _gate_rows(params, extra, args, forced if forced is not None else [None])


def cmd_noise_sweep(params, extra, args):
    forced = parse_outcomes(args.force_outcome) or [0]
    if len(forced) != 1:
        raise InvalidParameterError("noise-sweep takes a single forced outcome")
    rows = []
    for k in _grid(extra, "kappa_grid", [0.0, 0.05, 0.1]):
        for gm in _grid(extra, "gamma_grid", [0.0, 0.05, 0.1]):
            p = params.replace(kappa=k * params.A, gamma=gm * params.A)
            for row in _gate_rows(p, extra, args, forced):
                rows.append({"kappa_over_A": k, "gamma_over_A": gm, **row})
    return rows


def _circuit(args, extra) -> compiler.Circuit:
    if args.input is None:
        raise UsageError(f"{args.command} needs an input circuit file")
    try:
        text = Path(args.input).read_text()
    except OSError as exc:
        raise InvalidParameterError(f"cannot read {args.input}: {exc}") from None
    n = extra.get("num_qubits")
    if n is not None and (isinstance(n, bool) or not isinstance(n, int)):
        raise InvalidParameterError("num_qubits must be an integer")
    return compiler.parse_circuit(text, n)


def _layout(extra, circ):
    lay = extra.get("layout")
    if lay is None:
        return None
    if isinstance(lay, bool) or not isinstance(lay, int):
        raise InvalidParameterError("layout must be the number of computational sites")
    return compiler.ChainLayout(lay)


def cmd_compile(params, extra, args):
    circ = _circuit(args, extra)
    return compiler.format_schedule(compiler.compile(circ, _layout(extra, circ)))


def cmd_simulate(params, extra, args):
    circ = _circuit(args, extra)
    if args.schedule is not None:
        try:
            sched = compiler.parse_schedule(Path(args.schedule).read_text())
        except OSError as exc:
            raise InvalidParameterError(f"cannot read {args.schedule}: {exc}") from None
        if sched.num_qubits != circ.num_qubits:
            raise InvalidParameterError("schedule and circuit disagree on the number of qubits")
    else:
        sched = compiler.compile(circ, _layout(extra, circ))
    desc = extra.get("input", "0" * circ.num_qubits)
    if desc == "random":
        psi = compiler.random_state(circ.num_qubits, np.random.default_rng(args.seed))
    else:
        psi = parse_state(desc, circ.num_qubits)
    forced = parse_outcomes(args.force_outcome)
    policy_name = extra.get("policy", "forced" if forced is not None else "exhaustive")
    if policy_name == "forced":
        if forced is None:
            raise InvalidParameterError("forced policy needs --force-outcome")
        policy = compiler.Forced(tuple(forced))
    elif policy_name == "sample":
        policy = compiler.Sample(args.seed)
    elif policy_name == "exhaustive":
        policy = compiler.Exhaustive()
    else:
        raise InvalidParameterError(f"unknown policy {policy_name!r}")
    med_name = extra.get("mediator_state", "zero")
    if med_name not in ("zero", "plus"):
        raise InvalidParameterError("mediator_state must be 'zero' or 'plus'")
    med = None if med_name == "zero" else np.array([1.0, 1.0]) / math.sqrt(2)
    reset = extra.get("reset_mediators", True)
    if not isinstance(reset, bool):
        raise InvalidParameterError("reset_mediators must be true or false")
    ideal = compiler.ideal_output(circ, psi)
    rows = []
    for br in compiler.simulate_schedule(sched, psi, policy, mediator_state=med, reset_mediators=reset):
        out = compiler.logical_state(br.state, sched, br.frame)
        ov = compiler.overlap(ideal, out)
        rows.append({"outcomes": "".join(map(str, br.outcomes)) or "-", "probability": br.probability,
                     "overlap": ov, "equivalent": ov >= 1 - 1e-8,
                     "permutation": " ".join(map(str, br.frame.permutation)),
                     "native_ops": len(sched.ops), "measurements": sched.num_measurements,
                     "policy": policy_name, "seed": args.seed})
    if not all(r["equivalent"] for r in rows):
        raise NumericalFailureError("compiled schedule deviates from the ideal circuit")
    return rows


def cmd_presets(params, extra, args):
    rows = []
    for p in PRESETS:
        ns = p["window_ns"]
        rows.append({**p, "kappa_over_A": p["g_over_A"] / p["g_over_kappa"],
                     "gamma_over_A": p["g_over_A"] / p["g_over_gamma"],
                     "A_per_ns": None if ns is None else p["window_over_A"] / ns})
    return rows


def cmd_selftest(params, extra, args):
    results = acceptance.run_all(args.seed)
    rows = [r.to_dict() for r in results]
    if not all(r.passed for r in results):
        args.selftest_failed = True
    return rows


HANDLERS = {
    "dispersion": cmd_dispersion, "spectrum": cmd_spectrum, "reduce": cmd_reduce, "gate": cmd_gate,
    "noise-sweep": cmd_noise_sweep, "compile": cmd_compile, "simulate": cmd_simulate,
    "presets": cmd_presets, "selftest": cmd_selftest,
}


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--config", help="JSON config; quantities in units of A")
    common.add_argument("--seed", type=int, default=0, help="seed for sampling (default 0)")
    common.add_argument("--out", help="output path (default stdout)")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--force-outcome", help="mediator outcome bits, e.g. 0 or 01")
    common.add_argument("--cap-dim", type=int, default=DEFAULT_CAP_DIM,
                        help=f"largest Hilbert-space dimension to build (default {DEFAULT_CAP_DIM})")
    p = _Parser(prog="cavityqc", description="Coupled-cavity polariton quantum computing toolkit")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    helps = {
        "dispersion": "single-photon band of a periodic ring",
        "spectrum": "single-site Jaynes-Cummings levels",
        "reduce": "effective XY coupling and reduction error vs g/A",
        "gate": "full-stack mediated gate report",
        "noise-sweep": "gate fidelity over a (kappa, gamma) grid",
        "compile": "lower a circuit file to a native schedule",
        "simulate": "simulate a compiled circuit and compare with the ideal output",
        "presets": "technology parameter profiles",
        "selftest": "run the acceptance checks",
    }
    for name, text in helps.items():
        sp = sub.add_parser(name, parents=[common], help=text, description=text)
        if name in ("compile", "simulate"):
            sp.add_argument("input", nargs="?", help="circuit file")
        if name == "simulate":
            sp.add_argument("--schedule", help="precompiled schedule file")
    return p


def run(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        if args.cap_dim is not None and args.cap_dim < 1:
            raise InvalidParameterError("--cap-dim must be positive")
        params, extra = load_config(args.config, args.command)
        args.selftest_failed = False
        result = HANDLERS[args.command](params, extra, args)
        text = result if isinstance(result, str) else render(result, args.format)
        _emit(text, args.out)
        return EXIT_NUMERICAL if args.selftest_failed else EXIT_OK
    except ResourceLimitError as exc:
        print(f"cavityqc: resource limit: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except NumericalFailureError as exc:
        print(f"cavityqc: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (CavityQCError, ValueError) as exc:
        print(f"cavityqc: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main(argv=None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
