"""Polariton quantum computing in coupled cavity arrays.

Modules
-------
operators      local bosonic/atomic operators and tensor embedding
jch_model      Jaynes-Cummings-Hubbard lattice Hamiltonians and dispersion
polariton      polariton qubit encoding and the effective XY reduction
dynamics       unitary and Lindblad time evolution
gate_protocol  the measurement-mediated two-qubit gate and its fidelity
compiler       circuit lowering onto the mediated-gate chain
kernels        state-vector kernels (compiled, with a pure-Python fallback)
"""

from .errors import (
    CavityQCError, DegenerateBranchError, FitFailureError, InvalidParameterError,
    NumericalFailureError, ResourceLimitError, UnsupportedConfigurationError,
)
from .jch_model import SystemParams, build_jch_hamiltonian, dispersion
from .polariton import fit_effective_coupling, reduction_infidelity
from .gate_protocol import ProtocolReport, full_stack_gate, mediated_gate_unitary
from .compiler import Circuit, compile, decompose_controlled_u, simulate_schedule

__version__ = "0.1.0"

__all__ = [
    "CavityQCError", "DegenerateBranchError", "FitFailureError", "InvalidParameterError",
    "NumericalFailureError", "ResourceLimitError", "UnsupportedConfigurationError",
    "SystemParams", "build_jch_hamiltonian", "dispersion", "fit_effective_coupling",
    "reduction_infidelity", "ProtocolReport", "full_stack_gate", "mediated_gate_unitary",
    "Circuit", "compile", "decompose_controlled_u", "simulate_schedule",
]
