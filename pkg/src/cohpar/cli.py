"""Command-line interface.

Human-readable fixed-width tables go to stdout; ``--json`` prints the JSON
document instead and ``-o FILE`` writes it to a file.  Exit codes: 0
success, 1 verification or budget failure, 2 usage or input error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .bennett import compile_circuit
from .circuits import (
    Circuit,
    check,
    format_bits,
    gate_to_dict,
    layerize,
    loads_json,
    parse,
    parse_bitstring,
    serialize,
)
from .cost import analyze
from .qsl import qsl_bound
from .scheduler import (
    BudgetError,
    Strategy,
    TauPolicy,
    build_schedule,
    schedule_from_dict,
    schedule_to_dict,
)
from .simulator import SimulationError, simulate
from .verify import verify_classical


class UsageError(Exception):
    pass


def dumps(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def _kv_table(rows) -> str:
    width = max((len(k) for k, _ in rows), default=0)
    return "\n".join(f"{k:<{width}}  {v}" for k, v in rows) + "\n"


def _num(x: float) -> str:
    return f"{x:.12g}"


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _load_circuit(path: str) -> Circuit:
    return check(parse(_read(path)))


def _reversible(c: Circuit, strict: bool = False) -> Circuit:
    return compile_circuit(c, strict)[0] if not c.reversible else c


def _input_index(text: str, n: int) -> int:
    try:
        bits = parse_bitstring(text)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if len(bits) != n:
        raise UsageError(f"--input needs {n} bits (one per wire), got {len(bits)}")
    return sum(b << l for l, b in enumerate(bits))


def _emit(args, doc: dict, table: str) -> None:
    if getattr(args, "output", None):
        Path(args.output).write_text(dumps(doc), encoding="utf-8")
    sys.stdout.write(dumps(doc) if args.json else table)


def cmd_compile(args) -> int:
    c = _load_circuit(args.input)
    out, report = compile_circuit(c, args.strict_toffoli)
    Path(args.output).write_text(serialize(out), encoding="utf-8")
    report_path = args.report or str(Path(args.output).with_suffix(".report.json"))
    Path(report_path).write_text(dumps(report.to_dict()), encoding="utf-8")
    doc = report.to_dict()
    rows = [(k, doc[k]) for k in ("mode", "s_in", "s_out", "d_in", "d_out", "ancillas_added", "constant_ancillas")]
    sys.stdout.write(dumps(doc) if args.json else _kv_table(rows))
    return 0


def cmd_layerize(args) -> int:
    c = _load_circuit(args.input)
    lay = layerize(c)
    doc = {
        "S": lay.S,
        "D": lay.D,
        "delta": f"{lay.delta.numerator}/{lay.delta.denominator}",
        "widths": list(lay.widths),
        "layers": [[gate_to_dict(g) for g in layer] for layer in lay.layers],
    }
    lines = [f"S = {lay.S}  D = {lay.D}  delta = {lay.delta}"]
    lines += [f"layer {i:>3}  width {len(layer):>3}  " + " ".join(map(str, layer))
              for i, layer in enumerate(lay.layers)]
    _emit(args, doc, "\n".join(lines) + "\n")
    return 0


def cmd_schedule(args) -> int:
    c = _reversible(_load_circuit(args.input))
    sched = build_schedule(layerize(c), Strategy.parse(args.strategy), TauPolicy.parse(args.tau_policy), c.n_wires)
    doc = schedule_to_dict(sched)
    if args.output:
        Path(args.output).write_text(dumps(doc), encoding="utf-8")
    if args.json or not args.output:
        sys.stdout.write(dumps(doc))
    else:
        ledger = sched.ledger
        sys.stdout.write(_kv_table([
            ("strategy", sched.strategy.value), ("tau", _num(sched.tau)), ("segments", len(sched.segments)),
            ("total_T", _num(sched.total_T)), ("peak_p", _num(ledger.peak_p)), ("action", _num(ledger.action)),
        ]))
    return 0


def _load_schedule(path: str):
    return schedule_from_dict(loads_json(_read(path)))


def cmd_simulate(args) -> int:
    sched = _load_schedule(args.schedule)
    start = _input_index(args.input, sched.n_wires)
    sim = simulate(sched, start)
    n = sched.n_wires

    def row(state):
        k, mag = state.dominant()
        return format_bits((k >> l) & 1 for l in range(n)), mag

    final_bits, final_mag = row(sim.final)
    doc = {
        "input": args.input,
        "total_T": sched.total_T,
        "final": {"state": final_bits, "magnitude": final_mag},
        "checkpoints": [
            {"time": t, "state": b, "magnitude": m}
            for t, (b, m) in zip(sched.checkpoints, map(row, sim.checkpoints))
        ],
    }
    lines = [f"{'time':>14}  {'state':<{max(n, 5)}}  |amp|"]
    for cp in doc["checkpoints"]:
        lines.append(f"{_num(cp['time']):>14}  {cp['state']:<{max(n, 5)}}  {cp['magnitude']:.12f}")
    lines.append(f"{'final':>14}  {final_bits:<{max(n, 5)}}  {final_mag:.12f}")
    _emit(args, doc, "\n".join(lines) + "\n")
    return 0


def cmd_verify(args) -> int:
    c = _reversible(_load_circuit(args.input))
    sched = build_schedule(layerize(c), Strategy.parse(args.strategy), TauPolicy.parse(args.tau_policy), c.n_wires)
    exhaustive = True if args.exhaustive else (False if args.samples is not None else None)
    report = verify_classical(c, sched, exhaustive=exhaustive, samples=args.samples or 64, seed=args.seed)
    doc = report.to_dict()
    rows = [
        ("passed", report.passed), ("strategy", report.strategy), ("mode", report.mode),
        ("inputs_checked", report.inputs_checked), ("depth", report.depth), ("total_T", _num(report.total_T)),
        ("min_trace_fidelity", _num(report.min_trace_fidelity)), ("basis_preservation", report.basis_preservation),
    ]
    if report.qsl:
        rows += [("tau_qsl", _num(report.qsl.tau_qsl)), ("saturation", _num(report.qsl.saturation))]
    _emit(args, doc, _kv_table(rows))
    return 0 if report.passed else 1


def cmd_qsl(args) -> int:
    sched = _load_schedule(args.schedule)
    rep = qsl_bound(sched, _input_index(args.input, sched.n_wires))
    doc = rep.to_dict()
    rows = [(k, _num(doc[k])) for k in ("bures_angle", "E_avg", "dE_avg", "tau_qsl", "actual_T", "saturation")]
    rows.append(("valid", rep.valid))
    _emit(args, doc, _kv_table(rows))
    return 0 if rep.valid else 1


def cmd_report(args) -> int:
    rep = analyze(_load_circuit(args.input), TauPolicy.parse(args.tau_policy))
    doc = rep.to_dict()
    rows = [(k, v if isinstance(v, (str, bool, list)) else _num(v)) for k, v in doc.items()]
    if not rep.uniform_width:
        rows.append(("note", "layer widths differ: mean-width estimate deviates from exact coherent time"))
    _emit(args, doc, _kv_table(rows))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cohpar", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_):
        p = sub.add_parser(name, help=help_)
        p.set_defaults(func=func)
        p.add_argument("--json", action="store_true", help="print JSON instead of a table")
        return p

    p = add("compile", cmd_compile, "Bennett-compile an irreversible circuit")
    p.add_argument("input")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--strict-toffoli", action="store_true")
    p.add_argument("--report", help="report path (default: <output>.report.json)")

    p = add("layerize", cmd_layerize, "ASAP layering and S, D, delta")
    p.add_argument("input")
    p.add_argument("-o", "--output")

    for name, func, help_ in (("schedule", cmd_schedule, "emit a Hamiltonian schedule"),
                              ("verify", cmd_verify, "simulate and check the classical-computation conditions")):
        p = add(name, func, help_)
        p.add_argument("input")
        p.add_argument("--strategy", default="coh", choices=["seq", "par", "coh"] + [s.value for s in Strategy])
        p.add_argument("--tau-policy", default="linear:2")
        p.add_argument("-o", "--output")
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--exhaustive", action="store_true")
    mode.add_argument("--samples", type=int)
    p.add_argument("--seed", type=int, default=0)

    for name, func, help_ in (("simulate", cmd_simulate, "simulate a schedule from a basis input"),
                              ("qsl", cmd_qsl, "quantum speed limit of a schedule")):
        p = add(name, func, help_)
        p.add_argument("schedule")
        p.add_argument("--input", required=True, help="bitstring over all wires, wire 0 first")
        p.add_argument("-o", "--output")

    p = add("report", cmd_report, "cost table for the three strategies")
    p.add_argument("input")
    p.add_argument("--tau-policy", default="linear:2")
    p.add_argument("-o", "--output")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except BudgetError as exc:
        print(f"budget violation: {exc}", file=sys.stderr)
        return 1
    except (UsageError, ValueError) as exc:
        # FormatError, CircuitError and ScheduleMismatch are ValueErrors
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except SimulationError as exc:
        print(f"simulation failed: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
