"""Time and energy-action accounting for the three execution strategies."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .bennett import compile_to_reversible
from .circuits import Circuit, check, layerize
from .scheduler import (
    Strategy,
    TauPolicy,
    build_schedule,
    coherent_time_estimate,
)


@dataclass(frozen=True)
class CostReport:
    S: int
    D: int
    delta: Fraction
    widths: tuple[int, ...]
    T_seq: float
    T_par: float
    T_coh_exact: float
    T_coh_estimate: float
    action_seq: float
    action_par: float
    action_coh: float
    compiled: bool = False

    @staticmethod
    def _ratio(a: float, b: float) -> float:
        # an empty circuit has no defined speedup; report zero
        return a / b if b else 0.0

    @property
    def speedup_par_seq(self) -> float:
        return self._ratio(self.T_seq, self.T_par)

    @property
    def speedup_coh_par(self) -> float:
        return self._ratio(self.T_par, self.T_coh_exact)

    @property
    def speedup_coh_seq(self) -> float:
        return self._ratio(self.T_seq, self.T_coh_exact)

    @property
    def estimate_gap(self) -> float:
        """Estimate minus exact coherent time; nonzero when layer widths differ."""
        return self.T_coh_estimate - self.T_coh_exact

    @property
    def uniform_width(self) -> bool:
        return len(set(self.widths)) <= 1

    def to_dict(self) -> dict:
        return {
            "S": self.S,
            "D": self.D,
            "delta": f"{self.delta.numerator}/{self.delta.denominator}",
            "widths": list(self.widths),
            "compiled": self.compiled,
            "T_seq": self.T_seq,
            "T_par": self.T_par,
            "T_coh_exact": self.T_coh_exact,
            "T_coh_estimate": self.T_coh_estimate,
            "estimate_gap": self.estimate_gap,
            "uniform_width": self.uniform_width,
            "speedup_par_seq": self.speedup_par_seq,
            "speedup_coh_par": self.speedup_coh_par,
            "speedup_coh_seq": self.speedup_coh_seq,
            "action_seq": self.action_seq,
            "action_par": self.action_par,
            "action_coh": self.action_coh,
        }


def analyze(c: Circuit, tau_policy: TauPolicy | None = None) -> CostReport:
    """Cost of running ``c`` (compiled first if irreversible) under each strategy."""
    check(c)
    compiled = not c.reversible
    if compiled:
        c, _ = compile_to_reversible(c)
    layering = layerize(c)
    tau_policy = tau_policy or TauPolicy()
    scheds = {s: build_schedule(layering, s, tau_policy, c.n_wires) for s in Strategy}
    return CostReport(
        S=layering.S,
        D=layering.D,
        delta=layering.delta,
        widths=layering.widths,
        T_seq=scheds[Strategy.SEQUENTIAL].total_T,
        T_par=scheds[Strategy.PARALLEL].total_T,
        T_coh_exact=scheds[Strategy.COHERENT].total_T,
        T_coh_estimate=coherent_time_estimate(layering),
        action_seq=scheds[Strategy.SEQUENTIAL].ledger.action,
        action_par=scheds[Strategy.PARALLEL].ledger.action,
        action_coh=scheds[Strategy.COHERENT].ledger.action,
        compiled=compiled,
    )
