"""Coherent parallelisation of classical circuits.

Compile irreversible circuits to Toffoli form, schedule each depth layer as
a sequential, parallel or coherent Hamiltonian under a spectral-spread
budget, and verify the schedules by exact simulation.
"""

from .bennett import CompileReport, compile_circuit, compile_to_reversible, lower_to_toffoli_only
from .circuits import Circuit, Gate, Kind, Layering, evaluate, evaluate_truncated, layerize, parse, serialize, validate
from .cost import CostReport, analyze
from .operators import (
    Operator,
    closed_form_evolve,
    embed_at,
    embed_on_wires,
    equal_up_to_global_phase,
    evolve,
    spectral_spread,
    tensor_product,
)
from .qsl import QslReport, bures_angle, qsl_bound, time_averaged_energies
from .scheduler import HamiltonianSchedule, Strategy, TauPolicy, build_schedule
from .simulator import StateVector, simulate
from .verify import VerificationReport, verify_classical, verify_speedup

__version__ = "0.1.0"

__all__ = [
    "Circuit", "CompileReport", "CostReport", "Gate", "HamiltonianSchedule", "Kind", "Layering", "Operator",
    "QslReport", "StateVector", "Strategy", "TauPolicy", "VerificationReport",
    "analyze", "build_schedule", "bures_angle", "closed_form_evolve", "compile_circuit", "compile_to_reversible",
    "embed_at", "embed_on_wires", "equal_up_to_global_phase", "evaluate", "evaluate_truncated", "evolve",
    "layerize", "lower_to_toffoli_only", "parse", "qsl_bound", "serialize", "simulate", "spectral_spread",
    "tensor_product", "time_averaged_energies", "validate", "verify_classical", "verify_speedup",
]
