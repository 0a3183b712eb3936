"""Checks that a schedule performs its reversible circuit as a classical computation.

For every input the final state must be the basis state of the circuit's
output and, at the end of each layer, the basis state of the circuit
truncated at that depth, both up to a global phase.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .circuits import (
    Bits,
    Circuit,
    CircuitError,
    bits_to_index,
    check,
    evaluate,
    evaluate_truncated,
    format_bits,
    index_to_bits,
    initial_register,
    layerize,
)
from .qsl import QslReport, certified_bound
from .scheduler import HamiltonianSchedule, Strategy, TauPolicy, build_schedule
from .simulator import simulate

FIDELITY_TOL = 1e-9
EXHAUSTIVE_INPUT_CAP = 6
MIN_SAMPLES = 64


class ScheduleMismatch(ValueError):
    """The schedule does not implement the circuit's layering."""


@dataclass(frozen=True)
class CheckpointResult:
    depth: int
    time: float
    expected: Bits
    fidelity: float

    @property
    def match(self) -> bool:
        return self.fidelity >= 1 - FIDELITY_TOL


@dataclass(frozen=True)
class InputResult:
    input: Bits
    expected: Bits
    output_fidelity: float
    basis_preserved: bool
    checkpoints: tuple[CheckpointResult, ...]

    @property
    def output_match(self) -> bool:
        return self.output_fidelity >= 1 - FIDELITY_TOL

    @property
    def min_fidelity(self) -> float:
        return min([self.output_fidelity] + [c.fidelity for c in self.checkpoints])


@dataclass(frozen=True)
class VerificationReport:
    strategy: str
    mode: str
    depth: int
    total_T: float
    results: tuple[InputResult, ...]
    qsl: QslReport | None = field(default=None)

    @property
    def inputs_checked(self) -> int:
        return len(self.results)

    @property
    def basis_preservation(self) -> bool:
        return all(r.basis_preserved for r in self.results)

    @property
    def output_match(self) -> dict[str, bool]:
        return {format_bits(r.input): r.output_match for r in self.results}

    @property
    def checkpoint_match(self) -> dict[tuple[str, int], bool]:
        return {(format_bits(r.input), c.depth): c.match for r in self.results for c in r.checkpoints}

    @property
    def min_trace_fidelity(self) -> float:
        return min((r.min_fidelity for r in self.results), default=1.0)

    @property
    def depth_time_ratio(self) -> float:
        return self.depth / self.total_T if self.total_T > 0 else 0.0

    @property
    def passed(self) -> bool:
        return (
            self.basis_preservation
            and self.min_trace_fidelity >= 1 - FIDELITY_TOL
            and all(c.match for r in self.results for c in r.checkpoints)
            and all(r.output_match for r in self.results)
            and (self.qsl is None or self.qsl.valid)
        )

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "strategy": self.strategy,
            "mode": self.mode,
            "inputs_checked": self.inputs_checked,
            "depth": self.depth,
            "checkpoint_count": len(self.results[0].checkpoints) if self.results else self.depth,
            "total_T": self.total_T,
            "depth_time_ratio": self.depth_time_ratio,
            "basis_preservation": self.basis_preservation,
            "min_trace_fidelity": self.min_trace_fidelity,
            "qsl": self.qsl.to_dict() if self.qsl else None,
            "inputs": [
                {
                    "input": format_bits(r.input),
                    "expected": format_bits(r.expected),
                    "output_fidelity": r.output_fidelity,
                    "output_match": r.output_match,
                    "checkpoints": [
                        {"depth": c.depth, "time": c.time, "expected": format_bits(c.expected),
                         "fidelity": c.fidelity, "match": c.match}
                        for c in r.checkpoints
                    ],
                }
                for r in self.results
            ],
        }


def sample_inputs(n_inputs: int, samples: int, seed: int) -> list[Bits]:
    """Seeded input bitstrings; each index draws from its own spawned stream."""
    children = np.random.SeedSequence(seed).spawn(samples)
    return [tuple(int(b) for b in np.random.default_rng(ch).integers(0, 2, n_inputs)) for ch in children]


def select_inputs(c: Circuit, exhaustive: bool | None = None, samples: int = MIN_SAMPLES, seed: int = 0) -> tuple[str, list[Bits]]:
    k = len(c.inputs)
    if exhaustive is None:
        exhaustive = k <= EXHAUSTIVE_INPUT_CAP
    if exhaustive:
        return "exhaustive", [index_to_bits(i, k) for i in range(2**k)]
    return "sampled", sample_inputs(k, max(samples, MIN_SAMPLES), seed)


def verify_classical(
    c: Circuit,
    schedule: HamiltonianSchedule,
    exhaustive: bool | None = None,
    samples: int = MIN_SAMPLES,
    seed: int = 0,
    with_qsl: bool = True,
) -> VerificationReport:
    check(c)
    if not c.reversible:
        raise CircuitError("verification needs a reversible circuit")
    layering = layerize(c)
    if schedule.n_wires != c.n_wires or schedule.layers() != layering.layers:
        raise ScheduleMismatch("schedule layers do not match the circuit's layering")
    mode, inputs = select_inputs(c, exhaustive, samples, seed)
    times = schedule.checkpoints
    results = []
    starts = []
    for bits in inputs:
        start = bits_to_index(initial_register(c, bits))
        starts.append(start)
        sim = simulate(schedule, start)
        expected = evaluate(c, bits)
        cps = []
        preserved = True
        for d, state in enumerate(sim.checkpoints, start=1):
            want = evaluate_truncated(c, d, bits, layering)
            cps.append(CheckpointResult(d, times[d - 1], want, state.fidelity_with_basis(bits_to_index(want))))
            preserved &= state.dominant()[1] >= 1 - FIDELITY_TOL
        preserved &= sim.final.dominant()[1] >= 1 - FIDELITY_TOL
        results.append(InputResult(bits, expected, sim.final.fidelity_with_basis(bits_to_index(expected)),
                                   preserved, tuple(cps)))
    qsl = certified_bound(schedule, starts) if with_qsl and schedule.total_T > 0 else None
    return VerificationReport(schedule.strategy.value, mode, layering.D, schedule.total_T, tuple(results), qsl)


@dataclass(frozen=True)
class SpeedupTable:
    T_seq: float
    T_par: float
    T_coh: float
    widths: tuple[int, ...]
    layer_ratio_par_coh: tuple[float, ...]
    layer_ratio_seq_par: tuple[float, ...]
    reports: dict[str, VerificationReport]

    @property
    def seq_over_coh(self) -> float:
        return self.T_seq / self.T_coh if self.T_coh else 0.0

    @property
    def par_over_coh(self) -> float:
        return self.T_par / self.T_coh if self.T_coh else 0.0

    @property
    def per_layer_exact(self) -> bool:
        return all(
            math.isclose(r, m, rel_tol=0, abs_tol=1e-12)
            for ratios in (self.layer_ratio_par_coh, self.layer_ratio_seq_par)
            for r, m in zip(ratios, self.widths)
        )

    @property
    def passed(self) -> bool:
        return self.per_layer_exact and all(r.passed for r in self.reports.values())


def verify_speedup(c: Circuit, tau_policy: TauPolicy | None = None, **verify_kwargs) -> SpeedupTable:
    """Build and verify all three strategies and tabulate their time ratios."""
    tau_policy = tau_policy or TauPolicy()
    layering = layerize(c)
    scheds = {s: build_schedule(layering, s, tau_policy, c.n_wires) for s in Strategy}
    reports = {s.value: verify_classical(c, sch, **verify_kwargs) for s, sch in scheds.items()}
    seq, par, coh = (scheds[s].layer_durations() for s in Strategy)
    return SpeedupTable(
        T_seq=scheds[Strategy.SEQUENTIAL].total_T,
        T_par=scheds[Strategy.PARALLEL].total_T,
        T_coh=scheds[Strategy.COHERENT].total_T,
        widths=layering.widths,
        layer_ratio_par_coh=tuple(p / q for p, q in zip(par, coh)),
        layer_ratio_seq_par=tuple(s / p for s, p in zip(seq, par)),
        reports=reports,
    )
