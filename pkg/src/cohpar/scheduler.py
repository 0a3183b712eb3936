"""Per-layer Hamiltonian generators and timed schedules under a p(H) budget.

Every library gate is Hermitian and unitary, so ``exp(-i (pi/2) G) = -i G``
realises the gate up to a global phase with a generator of spread 2.  Per
layer of width ``m``:

* sequential: ``m`` segments, one gate each, duration pi/2;
* parallel: the sum of embedded gates, duration pi/2 (spread 2m);
* coherent: the tensor product of the gates scaled by ``m``, duration
  pi/(2m) (spread 2m, the same budget as parallel).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum
from functools import cached_property
from typing import Sequence

from .circuits import (
    CIRCUIT_SCHEMA,
    Circuit,
    FormatError,
    Gate,
    Kind,
    Layering,
    gate_from_dict,
    gate_to_dict,
    layerize,
    max_wires,
    schema_check,
)
from .operators import (
    SIGMA_X,
    Operator,
    embed_on_wires,
    evolve,
    permutation_operator,
    spectral_spread,
    tensor_all,
)

HALF_PI = math.pi / 2
BUDGET_SLACK = 1e-9


class Strategy(str, Enum):
    SEQUENTIAL = "sequential"
    PARALLEL = "parallel"
    COHERENT = "coherent"

    @classmethod
    def parse(cls, text: str) -> "Strategy":
        aliases = {"seq": cls.SEQUENTIAL, "par": cls.PARALLEL, "coh": cls.COHERENT}
        return aliases.get(text) or cls(text)


class BudgetError(ValueError):
    def __init__(self, layer: int, width: int, p: float, tau: float):
        self.layer, self.width, self.p, self.tau = layer, width, p, tau
        super().__init__(f"layer {layer} of width {width} needs p = {p:g} > tau = {tau:g}")


@dataclass(frozen=True)
class TauPolicy:
    kind: str = "linear"
    coefficient: float = 2.0

    def __post_init__(self):
        if self.kind not in ("constant", "linear"):
            raise ValueError(f"unknown tau policy kind {self.kind!r}")
        if not self.coefficient > 0:
            raise ValueError("tau coefficient must be positive")

    def __call__(self, n: int) -> float:
        return self.coefficient * n if self.kind == "linear" else self.coefficient

    @classmethod
    def parse(cls, text: str) -> "TauPolicy":
        kind, _, value = text.partition(":")
        kind = {"const": "constant"}.get(kind, kind)
        try:
            return cls(kind, float(value))
        except ValueError as exc:
            raise ValueError(f"bad tau policy {text!r}: {exc}") from None


_CNOT_OP = permutation_operator([0, 3, 2, 1])
_TOFFOLI_OP = permutation_operator([0, 1, 2, 7, 4, 5, 6, 3])
_GATE_OPS = {Kind.X: SIGMA_X, Kind.CNOT: _CNOT_OP, Kind.TOFFOLI: _TOFFOLI_OP}


def gate_operator(g: Gate) -> Operator:
    """Matrix of a reversible gate on its own wires, ``g.wires[0]`` lowest."""
    try:
        return _GATE_OPS[g.kind]
    except KeyError:
        raise ValueError(f"{g.kind.value} has no Hermitian-unitary generator") from None


def _check_disjoint(layer: Sequence[Gate]) -> None:
    seen: set[int] = set()
    for g in layer:
        if seen & g.support:
            raise ValueError(f"gate {g} overlaps another gate of the layer")
        seen |= g.support


def _layer_wires(layer: Sequence[Gate]) -> tuple[int, ...]:
    return tuple(w for g in layer for w in g.wires)


def parallel_local(layer: Sequence[Gate]) -> tuple[Operator, tuple[int, ...]]:
    """Sum of the layer's gates on the concatenation of their wires."""
    _check_disjoint(layer)
    wires = _layer_wires(layer)
    total, offset = None, 0
    for g in layer:
        k = len(g.wires)
        term = embed_on_wires(gate_operator(g), range(offset, offset + k), len(wires))
        total = term if total is None else total + term
        offset += k
    return total, wires


def coherent_local(layer: Sequence[Gate]) -> tuple[Operator, tuple[int, ...]]:
    """Tensor product of the layer's gates on the concatenation of their wires."""
    _check_disjoint(layer)
    return tensor_all(gate_operator(g) for g in layer), _layer_wires(layer)


def layer_parallel_generator(layer: Sequence[Gate], n: int) -> Operator:
    op, wires = parallel_local(layer)
    return embed_on_wires(op, wires, n)


def layer_coherent_generator(layer: Sequence[Gate], n: int) -> Operator:
    op, wires = coherent_local(layer)
    return embed_on_wires(op, wires, n)


@dataclass(frozen=True, eq=False)
class HamiltonianSegment:
    """Constant Hamiltonian ``scale * generator`` on ``wires`` for ``duration``."""

    generator: Operator
    wires: tuple[int, ...]
    scale: float
    duration: float
    layer_index: int
    gates: tuple[Gate, ...]

    @cached_property
    def hamiltonian(self) -> Operator:
        return Operator._known(self.scale * self.generator.matrix, hermitian=self.generator.is_hermitian)

    @cached_property
    def p(self) -> float:
        return spectral_spread(self.hamiltonian).p_value

    @cached_property
    def unitary(self) -> Operator:
        """Local evolution operator of the segment."""
        return evolve(self.hamiltonian, self.duration)

    def full_generator(self, n: int) -> Operator:
        return embed_on_wires(self.generator, self.wires, n)


@dataclass(frozen=True)
class EnergyLedger:
    action: float
    peak_p: float


@dataclass(frozen=True)
class HamiltonianSchedule:
    strategy: Strategy
    tau: float
    n_wires: int
    segments: tuple[HamiltonianSegment, ...]

    @property
    def total_T(self) -> float:
        return math.fsum(s.duration for s in self.segments)

    @property
    def checkpoints(self) -> tuple[float, ...]:
        """End time of every layer."""
        out, t = [], 0.0
        for i, s in enumerate(self.segments):
            t += s.duration
            if i + 1 == len(self.segments) or self.segments[i + 1].layer_index != s.layer_index:
                out.append(t)
        return tuple(out)

    @property
    def checkpoint_segments(self) -> tuple[int, ...]:
        """Number of segments completed at each checkpoint."""
        return tuple(i + 1 for i, s in enumerate(self.segments)
                     if i + 1 == len(self.segments) or self.segments[i + 1].layer_index != s.layer_index)

    @property
    def ledger(self) -> EnergyLedger:
        return EnergyLedger(
            action=math.fsum(s.p * s.duration for s in self.segments),
            peak_p=max((s.p for s in self.segments), default=0.0),
        )

    def layers(self) -> tuple[tuple[Gate, ...], ...]:
        grouped: dict[int, list[Gate]] = {}
        for s in self.segments:
            grouped.setdefault(s.layer_index, []).extend(s.gates)
        return tuple(tuple(grouped[k]) for k in sorted(grouped))

    def layer_durations(self) -> tuple[float, ...]:
        out: dict[int, float] = {}
        for s in self.segments:
            out[s.layer_index] = out.get(s.layer_index, 0.0) + s.duration
        return tuple(out[k] for k in sorted(out))

    def rescaled(self, c: float) -> "HamiltonianSchedule":
        """Same unitaries with every Hamiltonian multiplied by ``c``."""
        return replace(self, segments=tuple(
            replace(s, scale=s.scale * c, duration=s.duration / c) for s in self.segments))


def _segment(strategy: Strategy, layer: Sequence[Gate], index: int, scale=None, duration=None):
    m = len(layer)
    support = sum(len(g.wires) for g in layer)
    if strategy is not Strategy.SEQUENTIAL and support > max_wires():
        raise ValueError(f"layer {index} spans {support} wires, above the cap of {max_wires()}")
    if strategy is Strategy.COHERENT:
        op, wires = coherent_local(layer)
        default_scale, default_duration = float(m), HALF_PI / m
    else:
        op, wires = parallel_local(layer)
        default_scale, default_duration = 1.0, HALF_PI
    return HamiltonianSegment(
        generator=op,
        wires=wires,
        scale=default_scale if scale is None else scale,
        duration=default_duration if duration is None else duration,
        layer_index=index,
        gates=tuple(layer),
    )


def build_schedule(layering: Layering, strategy: Strategy | str, tau_policy: TauPolicy, n: int) -> HamiltonianSchedule:
    """Timed schedule realising ``layering`` with every segment inside the budget."""
    strategy = Strategy.parse(strategy) if isinstance(strategy, str) else strategy
    tau = tau_policy(n)
    segments = []
    for index, layer in enumerate(layering.layers):
        if strategy is Strategy.SEQUENTIAL:
            segs = [_segment(strategy, [g], index) for g in layer]
        else:
            segs = [_segment(strategy, layer, index)]
        for s in segs:
            if s.p > tau + BUDGET_SLACK:
                raise BudgetError(index, len(layer), s.p, tau)
        segments.extend(segs)
    return HamiltonianSchedule(strategy, tau, n, tuple(segments))


def schedule_circuit(c: Circuit, strategy: Strategy | str, tau_policy: TauPolicy | None = None) -> HamiltonianSchedule:
    return build_schedule(layerize(c), strategy, tau_policy or TauPolicy(), c.n_wires)


def coherent_time_exact(layering: Layering) -> float:
    return math.fsum(HALF_PI / m for m in layering.widths)


def coherent_time_estimate(layering: Layering) -> float:
    """Depth-times-gate-time divided by the mean layer width."""
    if not layering.D:
        return 0.0
    return layering.D * HALF_PI / float(layering.delta)


# --- JSON ---------------------------------------------------------------

def schedule_to_dict(s: HamiltonianSchedule) -> dict:
    return {
        "strategy": s.strategy.value,
        "tau": s.tau,
        "n": s.n_wires,
        "segments": [
            {
                "layer": seg.layer_index,
                "gates": [gate_to_dict(g) for g in seg.gates],
                "scale": seg.scale,
                "duration": seg.duration,
                "p": seg.p,
            }
            for seg in s.segments
        ],
        "checkpoints": list(s.checkpoints),
    }


SCHEDULE_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["strategy", "tau", "n", "segments", "checkpoints"],
    "properties": {
        "strategy": {"enum": [st.value for st in Strategy]},
        "tau": {"type": "number", "exclusiveMinimum": 0},
        "n": {"type": "integer", "minimum": 0},
        "segments": {
            "type": "array",
            "items": {
                "type": "object",
                "additionalProperties": False,
                "required": ["layer", "gates", "scale", "duration", "p"],
                "properties": {
                    "layer": {"type": "integer", "minimum": 0},
                    "gates": {"type": "array", "minItems": 1, "items": {"type": "object"}},
                    "scale": {"type": "number", "minimum": 0},
                    "duration": {"type": "number", "minimum": 0},
                    "p": {"type": "number", "minimum": 0},
                },
            },
        },
        "checkpoints": {"type": "array", "items": {"type": "number"}},
    },
}


def schedule_from_dict(data) -> HamiltonianSchedule:
    """Rebuild a schedule; generators are reconstructed from the gate lists."""
    schema_check(data, SCHEDULE_SCHEMA)
    gate_schema = CIRCUIT_SCHEMA["properties"]["gates"]["items"]
    strategy = Strategy(data["strategy"])
    segments = []
    last_layer = -1
    for i, raw in enumerate(data["segments"]):
        where = f"$.segments[{i}]"
        if raw["layer"] < last_layer:
            raise FormatError(f"{where}.layer: layer indices must not decrease")
        last_layer = raw["layer"]
        for j, g in enumerate(raw["gates"]):
            schema_check(g, gate_schema)
        gates = [gate_from_dict(g, f"{where}.gates[{j}]") for j, g in enumerate(raw["gates"])]
        if strategy is Strategy.SEQUENTIAL and len(gates) != 1:
            raise FormatError(f"{where}.gates: sequential segments hold exactly one gate")
        if any(w >= data["n"] for g in gates for w in g.wires):
            raise FormatError(f"{where}.gates: wire out of range for n = {data['n']}")
        try:
            seg = _segment(strategy, gates, raw["layer"], raw["scale"], raw["duration"])
        except ValueError as exc:
            raise FormatError(f"{where}: {exc}") from None
        if abs(seg.p - raw["p"]) > 1e-9:
            raise FormatError(f"{where}.p: stored {raw['p']} but generator gives {seg.p}")
        segments.append(seg)
    sched = HamiltonianSchedule(strategy, float(data["tau"]), data["n"], tuple(segments))
    stored = data["checkpoints"]
    if len(stored) != len(sched.checkpoints) or any(abs(a - b) > 1e-9 for a, b in zip(stored, sched.checkpoints)):
        raise FormatError("$.checkpoints: do not match the segment durations")
    return sched
