"""Exact state-vector simulation of piecewise-constant Hamiltonian schedules."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .circuits import max_wires
from .operators import Operator, apply_local, embed_on_wires
from .scheduler import HamiltonianSchedule

NORM_TOL = 1e-10
NORM_ABORT = 1e-8


class SimulationError(RuntimeError):
    pass


@dataclass(frozen=True, eq=False)
class StateVector:
    amplitudes: np.ndarray

    def __post_init__(self):
        a = np.array(self.amplitudes, dtype=complex).reshape(-1)
        if a.size & (a.size - 1):
            raise ValueError(f"state dimension {a.size} is not a power of 2")
        a.setflags(write=False)
        object.__setattr__(self, "amplitudes", a)

    @classmethod
    def basis(cls, index: int, n_wires: int) -> "StateVector":
        a = np.zeros(2**n_wires, dtype=complex)
        a[index] = 1.0
        return cls(a)

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    @property
    def n_wires(self) -> int:
        return self.dim.bit_length() - 1

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def overlap(self, other: "StateVector") -> complex:
        """``<self|other>``."""
        if self.dim != other.dim:
            raise ValueError(f"dimension mismatch: {self.dim} vs {other.dim}")
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def fidelity_with_basis(self, index: int) -> float:
        """Phase-insensitive overlap ``|<index|self>|``."""
        return float(abs(self.amplitudes[index]))

    def dominant(self) -> tuple[int, float]:
        """Most likely basis index and the magnitude of its amplitude."""
        k = int(np.argmax(np.abs(self.amplitudes)))
        return k, float(abs(self.amplitudes[k]))


@dataclass(frozen=True)
class SimulationResult:
    final: StateVector
    checkpoints: tuple[StateVector, ...]


def _initial(schedule: HamiltonianSchedule, initial) -> np.ndarray:
    n = schedule.n_wires
    if n > max_wires():
        raise SimulationError(f"{n} wires exceeds the simulation cap of {max_wires()}")
    if isinstance(initial, StateVector):
        if initial.dim != 2**n:
            raise SimulationError(f"initial state has dim {initial.dim}, schedule needs {2**n}")
        return initial.amplitudes.copy()
    return StateVector.basis(int(initial), n).amplitudes.copy()


def simulate(schedule: HamiltonianSchedule, initial: int | StateVector) -> SimulationResult:
    """Evolve ``initial`` (basis index or state) through every segment in order."""
    psi = _initial(schedule, initial)
    n = schedule.n_wires
    stops = set(schedule.checkpoint_segments)
    checkpoints = []
    for i, seg in enumerate(schedule.segments, start=1):
        psi = apply_local(psi, seg.unitary.matrix, seg.wires, n)
        drift = abs(np.linalg.norm(psi) - 1.0)
        if drift > NORM_ABORT:
            raise SimulationError(f"norm drifted by {drift:.3g} after segment {i - 1}")
        if i in stops:
            checkpoints.append(StateVector(psi))
    return SimulationResult(StateVector(psi), tuple(checkpoints))


def schedule_unitary(schedule: HamiltonianSchedule) -> Operator:
    """Dense time-ordered product of all segment evolutions."""
    n = schedule.n_wires
    if n > max_wires():
        raise SimulationError(f"{n} wires exceeds the simulation cap of {max_wires()}")
    u = np.eye(2**n, dtype=complex)
    for seg in schedule.segments:
        u = embed_on_wires(seg.unitary, seg.wires, n).matrix @ u
    return Operator(u)
