"""Classical circuits: representation, validation, evaluation and layering.

Bitstrings are tuples of 0/1 where position ``l`` is wire ``l``; the basis
index of a register is ``sum(bit_l * 2**l)``.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Iterable, Sequence

import jsonschema
import numpy as np

from .operators import Operator, permutation_operator

Bits = tuple[int, ...]

DEFAULT_MAX_WIRES = 12


def max_wires() -> int:
    return int(os.environ.get("COHPAR_MAX_WIRES", DEFAULT_MAX_WIRES))


class Kind(str, Enum):
    AND = "AND"
    NOT_I = "NOT_I"
    NAND = "NAND"
    X = "X"
    CNOT = "CNOT"
    TOFFOLI = "TOFFOLI"

    @property
    def reversible(self) -> bool:
        return self in (Kind.X, Kind.CNOT, Kind.TOFFOLI)

    @property
    def arity(self) -> int:
        return _ARITY[self]


_ARITY = {Kind.AND: 2, Kind.NAND: 2, Kind.NOT_I: 1, Kind.X: 0, Kind.CNOT: 1, Kind.TOFFOLI: 2}


@dataclass(frozen=True)
class Gate:
    """A gate.

    Reversible kinds flip ``target`` conditioned on ``controls``.  For the
    irreversible kinds ``controls`` are the operands and ``target`` is the
    output wire; ``NOT_I`` with ``controls == (target,)`` negates in place.
    """

    kind: Kind
    controls: tuple[int, ...]
    target: int

    def __post_init__(self):
        object.__setattr__(self, "kind", Kind(self.kind))
        object.__setattr__(self, "controls", tuple(int(c) for c in self.controls))
        object.__setattr__(self, "target", int(self.target))

    @property
    def wires(self) -> tuple[int, ...]:
        return self.controls + (self.target,)

    @property
    def support(self) -> frozenset[int]:
        return frozenset(self.wires)

    @property
    def output_wire(self) -> int | None:
        return None if self.kind.reversible else self.target

    def __str__(self) -> str:
        args = ",".join(map(str, self.controls))
        return f"{self.kind.value}({args}->{self.target})" if args else f"{self.kind.value}({self.target})"


def X(t: int) -> Gate:
    return Gate(Kind.X, (), t)


def CNOT(c: int, t: int) -> Gate:
    return Gate(Kind.CNOT, (c,), t)


def TOFFOLI(c1: int, c2: int, t: int) -> Gate:
    return Gate(Kind.TOFFOLI, (c1, c2), t)


def AND(a: int, b: int, out: int) -> Gate:
    return Gate(Kind.AND, (a, b), out)


def NAND(a: int, b: int, out: int) -> Gate:
    return Gate(Kind.NAND, (a, b), out)


def NOT(a: int, out: int | None = None) -> Gate:
    return Gate(Kind.NOT_I, (a,), a if out is None else out)


@dataclass(frozen=True)
class Circuit:
    n_wires: int
    inputs: tuple[int, ...]
    gates: tuple[Gate, ...] = ()
    ancillas: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "inputs", tuple(int(w) for w in self.inputs))
        object.__setattr__(self, "gates", tuple(self.gates))
        object.__setattr__(self, "ancillas", tuple((int(w), int(b)) for w, b in self.ancillas))

    @property
    def reversible(self) -> bool:
        return all(g.kind.reversible for g in self.gates)

    def count(self, *kinds: Kind) -> int:
        return sum(g.kind in kinds for g in self.gates)


@dataclass(frozen=True)
class Diagnostic:
    message: str
    gate_index: int | None = None

    def __str__(self) -> str:
        where = f"gate {self.gate_index}: " if self.gate_index is not None else ""
        return where + self.message


class CircuitError(ValueError):
    def __init__(self, diagnostics: Sequence[Diagnostic] | str):
        if isinstance(diagnostics, str):
            diagnostics = [Diagnostic(diagnostics)]
        self.diagnostics = list(diagnostics)
        super().__init__("; ".join(map(str, self.diagnostics)))


def validate(c: Circuit) -> list[Diagnostic]:
    """Return all structural problems of ``c``; an empty list means valid."""
    diags: list[Diagnostic] = []
    n = c.n_wires
    if n < 0:
        diags.append(Diagnostic(f"negative wire count {n}"))
    in_range = lambda w: 0 <= w < n  # noqa: E731

    if len(set(c.inputs)) != len(c.inputs):
        diags.append(Diagnostic("duplicate input wire"))
    for w in c.inputs:
        if not in_range(w):
            diags.append(Diagnostic(f"input wire {w} out of range"))
    anc_wires = [w for w, _ in c.ancillas]
    if len(set(anc_wires)) != len(anc_wires):
        diags.append(Diagnostic("duplicate ancilla wire"))
    for w, b in c.ancillas:
        if not in_range(w):
            diags.append(Diagnostic(f"ancilla wire {w} out of range"))
        if b not in (0, 1):
            diags.append(Diagnostic(f"ancilla {w} has initial value {b}, expected 0 or 1"))
        if w in c.inputs:
            diags.append(Diagnostic(f"ancilla wire {w} overlaps an input wire"))

    kinds_rev = {g.kind.reversible for g in c.gates}
    if len(kinds_rev) > 1:
        diags.append(Diagnostic("circuit mixes reversible and irreversible gate kinds"))
    irreversible = kinds_rev == {False}
    readable = set(c.inputs) | set(anc_wires)

    for i, g in enumerate(c.gates):
        if len(g.controls) != g.kind.arity:
            diags.append(Diagnostic(f"{g.kind.value} takes {g.kind.arity} controls, got {len(g.controls)}", i))
        for w in g.wires:
            if not in_range(w):
                diags.append(Diagnostic(f"wire {w} out of range", i))
        in_place_not = g.kind is Kind.NOT_I and g.controls == (g.target,)
        if len(set(g.wires)) != len(g.wires) and not in_place_not:
            diags.append(Diagnostic(f"duplicate wire in {g}", i))
        if irreversible:
            for w in g.controls:
                if w not in readable:
                    diags.append(Diagnostic(f"wire {w} read before it is written", i))
            if not in_place_not and g.target in readable:
                diags.append(Diagnostic(f"output wire {g.target} already holds a value", i))
            readable.add(g.target)
    return diags


def check(c: Circuit) -> Circuit:
    diags = validate(c)
    if diags:
        raise CircuitError(diags)
    return c


def bits_to_index(bits: Sequence[int]) -> int:
    return sum(int(b) << l for l, b in enumerate(bits))


def index_to_bits(index: int, n: int) -> Bits:
    return tuple((index >> l) & 1 for l in range(n))


def parse_bitstring(text: str) -> Bits:
    """``"110"`` -> ``(1, 1, 0)``; the first character is wire (or input) 0."""
    if not text or set(text) - {"0", "1"}:
        raise ValueError(f"not a bitstring: {text!r}")
    return tuple(int(ch) for ch in text)


def format_bits(bits: Sequence[int]) -> str:
    return "".join(str(b) for b in bits)


def _apply(bits: list[int], g: Gate) -> None:
    k, cs, t = g.kind, g.controls, g.target
    if k is Kind.X:
        bits[t] ^= 1
    elif k is Kind.CNOT:
        bits[t] ^= bits[cs[0]]
    elif k is Kind.TOFFOLI:
        bits[t] ^= bits[cs[0]] & bits[cs[1]]
    elif k is Kind.AND:
        bits[t] = bits[cs[0]] & bits[cs[1]]
    elif k is Kind.NAND:
        bits[t] = 1 - (bits[cs[0]] & bits[cs[1]])
    elif k is Kind.NOT_I:
        bits[t] = 1 - bits[cs[0]]


def initial_register(c: Circuit, input_bits: Sequence[int]) -> list[int]:
    if len(input_bits) != len(c.inputs):
        raise CircuitError(f"expected {len(c.inputs)} input bits, got {len(input_bits)}")
    bits = [0] * c.n_wires
    for w, b in zip(c.inputs, input_bits):
        bits[w] = int(b)
    for w, b in c.ancillas:
        bits[w] = b
    return bits


def run_gates(gates: Iterable[Gate], register: Sequence[int]) -> Bits:
    """Apply ``gates`` to a full register of wire values."""
    bits = list(register)
    for g in gates:
        _apply(bits, g)
    return tuple(bits)


def evaluate(c: Circuit, input_bits: Sequence[int]) -> Bits:
    """Values of every wire after running ``c`` on ``input_bits``."""
    return run_gates(c.gates, initial_register(c, input_bits))


@dataclass(frozen=True)
class Layering:
    layers: tuple[tuple[Gate, ...], ...]

    @property
    def S(self) -> int:
        return sum(len(layer) for layer in self.layers)

    @property
    def D(self) -> int:
        return len(self.layers)

    @property
    def delta(self) -> Fraction:
        return Fraction(self.S, self.D) if self.D else Fraction(0)

    @property
    def widths(self) -> tuple[int, ...]:
        return tuple(len(layer) for layer in self.layers)

    def gates(self) -> tuple[Gate, ...]:
        return tuple(g for layer in self.layers for g in layer)


def layerize(c: Circuit) -> Layering:
    """As-soon-as-possible layering on wire conflicts."""
    last: dict[int, int] = {}
    layers: list[list[Gate]] = []
    for g in c.gates:
        depth = max((last.get(w, -1) for w in g.support), default=-1) + 1
        if depth == len(layers):
            layers.append([])
        layers[depth].append(g)
        for w in g.support:
            last[w] = depth
    return Layering(tuple(tuple(layer) for layer in layers))


def evaluate_truncated(c: Circuit, d: int, input_bits: Sequence[int], layering: Layering | None = None) -> Bits:
    """Wire values after the first ``d`` layers."""
    layering = layering or layerize(c)
    if not 1 <= d <= layering.D:
        raise CircuitError(f"depth {d} outside 1..{layering.D}")
    return run_gates((g for layer in layering.layers[:d] for g in layer), initial_register(c, input_bits))


def circuit_unitary(c: Circuit) -> Operator:
    """Permutation matrix of a reversible circuit over all ``2**n_wires`` states."""
    if not c.reversible:
        raise CircuitError("circuit_unitary needs a reversible circuit")
    if c.n_wires > max_wires():
        raise CircuitError(f"{c.n_wires} wires exceeds the simulation cap of {max_wires()}")
    n = c.n_wires
    images = [bits_to_index(run_gates(c.gates, index_to_bits(i, n))) for i in range(2**n)]
    return permutation_operator(images)


# --- JSON ---------------------------------------------------------------

CIRCUIT_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["wires", "inputs", "gates"],
    "properties": {
        "wires": {"type": "integer", "minimum": 0},
        "inputs": {"type": "array", "items": {"type": "integer", "minimum": 0}},
        "ancillas": {
            "type": "array",
            "items": {
                "type": "object",
                "additionalProperties": False,
                "required": ["wire", "init"],
                "properties": {"wire": {"type": "integer", "minimum": 0}, "init": {"enum": [0, 1]}},
            },
        },
        "gates": {
            "type": "array",
            "items": {
                "type": "object",
                "additionalProperties": False,
                "required": ["kind", "controls", "target"],
                "properties": {
                    "kind": {"enum": [k.value for k in Kind]},
                    "controls": {"type": "array", "items": {"type": "integer", "minimum": 0}},
                    "target": {"type": "integer", "minimum": 0},
                    "out": {"type": "integer", "minimum": 0},
                },
            },
        },
    },
}


class FormatError(ValueError):
    """Malformed or schema-violating JSON input."""


def gate_to_dict(g: Gate) -> dict:
    d = {"kind": g.kind.value, "controls": list(g.controls), "target": g.target}
    if g.output_wire is not None:
        d["out"] = g.output_wire
    return d


def gate_from_dict(d: dict, where: str = "gate") -> Gate:
    g = Gate(Kind(d["kind"]), tuple(d["controls"]), d["target"])
    if "out" in d:
        if g.kind.reversible:
            raise FormatError(f"{where}.out: reversible gate {g.kind.value} has no output wire")
        if d["out"] != g.target:
            raise FormatError(f"{where}.out: {d['out']} disagrees with target {g.target}")
    return g


def circuit_to_dict(c: Circuit) -> dict:
    return {
        "wires": c.n_wires,
        "inputs": list(c.inputs),
        "ancillas": [{"wire": w, "init": b} for w, b in c.ancillas],
        "gates": [gate_to_dict(g) for g in c.gates],
    }


def schema_check(data, schema) -> None:
    try:
        jsonschema.validate(data, schema)
    except jsonschema.ValidationError as exc:
        path = "".join(f"[{p}]" if isinstance(p, int) else f".{p}" for p in exc.absolute_path)
        raise FormatError(f"schema error at ${path}: {exc.message}") from None


def circuit_from_dict(data) -> Circuit:
    schema_check(data, CIRCUIT_SCHEMA)
    gates = tuple(gate_from_dict(g, f"$.gates[{i}]") for i, g in enumerate(data["gates"]))
    return Circuit(
        n_wires=data["wires"],
        inputs=tuple(data["inputs"]),
        gates=gates,
        ancillas=tuple((a["wire"], a["init"]) for a in data.get("ancillas", [])),
    )


def loads_json(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"malformed JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None


def serialize(c: Circuit) -> str:
    return json.dumps(circuit_to_dict(c), indent=2) + "\n"


def parse(text: str) -> Circuit:
    return circuit_from_dict(loads_json(text))


# --- builders -------------------------------------------------------------

def gate_tree(n_leaves: int, kind: Kind = Kind.AND) -> Circuit:
    """Balanced binary tree of two-input irreversible gates over ``n_leaves`` inputs."""
    level = list(range(n_leaves))
    nxt = n_leaves
    gates = []
    while len(level) > 1:
        paired = []
        for a, b in zip(level[::2], level[1::2]):
            gates.append(Gate(kind, (a, b), nxt))
            paired.append(nxt)
            nxt += 1
        if len(level) % 2:
            paired.append(level[-1])
        level = paired
    return Circuit(nxt, tuple(range(n_leaves)), tuple(gates))


def uniform_circuit(k: int, d: int, kind: Kind = Kind.X) -> Circuit:
    """``d`` layers of ``k`` identical reversible gates on disjoint wire blocks."""
    arity = Kind(kind).arity + 1
    gates = []
    for _ in range(d):
        for j in range(k):
            base = arity * j
            gates.append(Gate(kind, tuple(range(base, base + arity - 1)), base + arity - 1))
    return Circuit(arity * k, tuple(range(arity * k)), tuple(gates))


def random_nand_circuit(rng: np.random.Generator, n_inputs: int, n_gates: int) -> Circuit:
    """Random NAND network; each gate reads two distinct available wires."""
    gates = []
    available = list(range(n_inputs))
    for j in range(n_gates):
        a, b = rng.choice(len(available), size=2, replace=False)
        out = n_inputs + j
        gates.append(NAND(available[a], available[b], out))
        available.append(out)
    return Circuit(n_inputs + n_gates, tuple(range(n_inputs)), tuple(gates))
