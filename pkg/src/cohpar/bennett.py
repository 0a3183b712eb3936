"""Irreversible-to-reversible conversion by Bennett's forward construction.

Every AND/NAND writes into its (never previously used) output wire, so that
wire is reused as the fresh ancilla of the replacing Toffoli.  No garbage is
uncomputed.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

from .circuits import (
    CNOT,
    TOFFOLI,
    X,
    Circuit,
    CircuitError,
    Gate,
    Kind,
    check,
    layerize,
)


class AlreadyReversible(CircuitError):
    """Compilation requested for a circuit that is already reversible."""


@dataclass(frozen=True)
class CompileReport:
    s_in: int
    d_in: int
    s_out: int
    d_out: int
    ancillas_added: int
    wire_map: dict[int, int]
    mode: str = "bennett"
    constant_ancillas: int = 0

    def to_dict(self) -> dict:
        d = asdict(self)
        d["wire_map"] = {str(k): v for k, v in sorted(self.wire_map.items())}
        return d


def compile_to_reversible(c: Circuit) -> tuple[Circuit, CompileReport]:
    """Replace AND/NAND by Toffolis onto fresh 0/1 ancillas; NOT becomes X."""
    check(c)
    if c.reversible:
        raise AlreadyReversible("circuit is already reversible; nothing to compile")
    gates: list[Gate] = []
    ancillas = list(c.ancillas)
    for g in c.gates:
        a = g.controls
        if g.kind is Kind.AND:
            gates.append(TOFFOLI(a[0], a[1], g.target))
            ancillas.append((g.target, 0))
        elif g.kind is Kind.NAND:
            gates.append(TOFFOLI(a[0], a[1], g.target))
            ancillas.append((g.target, 1))
        elif g.target == a[0]:
            gates.append(X(g.target))
        else:
            # the operand may still be read later, so negate a copy
            gates.append(CNOT(a[0], g.target))
            ancillas.append((g.target, 1))
    out = Circuit(c.n_wires, c.inputs, tuple(gates), tuple(ancillas))
    src, dst = layerize(c), layerize(out)
    report = CompileReport(
        s_in=src.S,
        d_in=src.D,
        s_out=dst.S,
        d_out=dst.D,
        ancillas_added=len(ancillas) - len(c.ancillas),
        wire_map={w: w for w in range(c.n_wires)},
    )
    return out, report


def lower_to_toffoli_only(c: Circuit) -> Circuit:
    """Rewrite X and CNOT as Toffolis controlled by constant-1 ancillas.

    Constant wires are only ever read, so one pool sized for the widest
    layer is shared by all layers; gates are emitted layer by layer, which
    keeps the depth unchanged.
    """
    check(c)
    if not c.reversible:
        raise CircuitError("strict lowering needs a reversible circuit")
    if all(g.kind is Kind.TOFFOLI for g in c.gates):
        return c
    layering = layerize(c)
    pool_size = max(2 * sum(g.kind is Kind.X for g in layer) + sum(g.kind is Kind.CNOT for g in layer)
                    for layer in layering.layers)
    pool = list(range(c.n_wires, c.n_wires + pool_size))
    gates = []
    for layer in layering.layers:
        free = iter(pool)
        for g in layer:
            if g.kind is Kind.X:
                gates.append(TOFFOLI(next(free), next(free), g.target))
            elif g.kind is Kind.CNOT:
                gates.append(TOFFOLI(g.controls[0], next(free), g.target))
            else:
                gates.append(g)
    return Circuit(
        c.n_wires + pool_size,
        c.inputs,
        tuple(gates),
        c.ancillas + tuple((w, 1) for w in pool),
    )


def compile_circuit(c: Circuit, strict: bool = False) -> tuple[Circuit, CompileReport]:
    """Bennett compile, optionally followed by Toffoli-only lowering."""
    out, report = compile_to_reversible(c)
    if not strict:
        return out, report
    lowered = lower_to_toffoli_only(out)
    lay = layerize(lowered)
    return lowered, CompileReport(
        s_in=report.s_in,
        d_in=report.d_in,
        s_out=lay.S,
        d_out=lay.D,
        ancillas_added=report.ancillas_added,
        wire_map=report.wire_map,
        mode="bennett+strict-toffoli",
        constant_ancillas=lowered.n_wires - out.n_wires,
    )
