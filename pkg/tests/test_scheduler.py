import dataclasses
import json
import math

import pytest

from cohpar.circuits import CNOT, TOFFOLI, Circuit, FormatError, X, Layering, layerize, uniform_circuit
from cohpar.scheduler import (
    BudgetError,
    Strategy,
    TauPolicy,
    build_schedule,
    coherent_time_estimate,
    coherent_time_exact,
    layer_coherent_generator,
    layer_parallel_generator,
    schedule_circuit,
    schedule_from_dict,
    schedule_to_dict,
)
from cohpar.operators import spectral_spread

HALF_PI = math.pi / 2
TWO_X = Circuit(2, (0, 1), (X(0), X(1)))
TWO_TOFFOLI = Circuit(6, tuple(range(6)), (TOFFOLI(0, 1, 2), TOFFOLI(3, 4, 5)))


def widths_circuit(widths):
    """X-gate circuit whose ASAP layering has the given non-increasing widths."""
    gates = [X(w) for m in widths for w in range(m)]
    return Circuit(widths[0], tuple(range(widths[0])), tuple(gates))


class TestGenerators:
    @pytest.mark.parametrize("c, par, coh", [(TWO_X, 4, 2), (TWO_TOFFOLI, 4, 2)])
    def test_unscaled_spreads(self, c, par, coh):
        layer = layerize(c).layers[0]
        assert spectral_spread(layer_parallel_generator(layer, c.n_wires)).p_value == pytest.approx(par, abs=1e-10)
        assert spectral_spread(layer_coherent_generator(layer, c.n_wires)).p_value == pytest.approx(coh, abs=1e-10)

    def test_overlapping_layer_rejected(self):
        with pytest.raises(ValueError):
            layer_parallel_generator([CNOT(0, 1), X(1)], 2)

    @pytest.mark.parametrize("strategy, p", [("sequential", 2), ("parallel", 4), ("coherent", 4)])
    def test_segment_spreads_within_budget(self, strategy, p):
        s = schedule_circuit(TWO_X, strategy)
        assert max(seg.p for seg in s.segments) == pytest.approx(p, abs=1e-10)
        assert s.tau == 4.0


class TestDurations:
    def test_two_x_totals(self):
        T = {s: schedule_circuit(TWO_X, s).total_T for s in Strategy}
        assert T[Strategy.SEQUENTIAL] == pytest.approx(math.pi, abs=1e-15)
        assert T[Strategy.PARALLEL] == pytest.approx(HALF_PI, abs=1e-15)
        assert T[Strategy.COHERENT] == pytest.approx(math.pi / 4, abs=1e-15)

    @pytest.mark.parametrize("k, d", [(2, 2), (3, 2), (2, 3), (3, 3)])
    def test_uniform_k_squared(self, k, d):
        c = uniform_circuit(k, d)
        seq = schedule_circuit(c, "seq").total_T
        coh = schedule_circuit(c, "coh").total_T
        assert seq / coh == pytest.approx(k * k, abs=1e-12)

    def test_empty_layering(self):
        s = build_schedule(Layering(()), Strategy.COHERENT, TauPolicy(), 3)
        assert (s.total_T, s.checkpoints, s.segments) == (0.0, (), ())
        assert coherent_time_exact(Layering(())) == coherent_time_estimate(Layering(())) == 0

    def test_mixed_widths_exact_vs_estimate(self):
        c = widths_circuit((4, 2, 1))
        lay = layerize(c)
        assert lay.widths == (4, 2, 1)
        exact = schedule_circuit(c, "coh").total_T
        assert exact == pytest.approx(HALF_PI * (1 / 4 + 1 / 2 + 1), abs=1e-15)
        assert coherent_time_exact(lay) == pytest.approx(exact, abs=1e-15)
        assert coherent_time_estimate(lay) == pytest.approx(HALF_PI * 9 / 7, abs=1e-15)

    def test_checkpoints(self):
        s = schedule_circuit(uniform_circuit(2, 3), "seq")
        assert s.checkpoints == pytest.approx([math.pi, 2 * math.pi, 3 * math.pi])
        assert s.checkpoint_segments == (2, 4, 6)


class TestLedger:
    @pytest.mark.parametrize("m", [1, 2, 3])
    def test_action_per_layer(self, m):
        c = uniform_circuit(m, 2)
        action = {s: schedule_circuit(c, s).ledger.action for s in Strategy}
        assert action[Strategy.SEQUENTIAL] == pytest.approx(2 * m * math.pi, abs=1e-10)
        assert action[Strategy.PARALLEL] == pytest.approx(2 * m * math.pi, abs=1e-10)
        assert action[Strategy.COHERENT] == pytest.approx(2 * math.pi, abs=1e-10)

    def test_peak_p(self):
        assert schedule_circuit(uniform_circuit(3, 1), "coh").ledger.peak_p == pytest.approx(6, abs=1e-10)


class TestBudget:
    def test_constant_budget_blocks_wide_layers(self):
        with pytest.raises(BudgetError) as info:
            schedule_circuit(uniform_circuit(3, 1), "par", TauPolicy("constant", 4))
        assert (info.value.layer, info.value.width) == (0, 3)
        assert info.value.p == pytest.approx(6)

    def test_sequential_fits_constant_budget(self):
        assert schedule_circuit(uniform_circuit(3, 1), "seq", TauPolicy.parse("const:2")).total_T == pytest.approx(3 * HALF_PI)

    def test_policy_parsing(self):
        assert TauPolicy.parse("linear:2")(5) == 10
        assert TauPolicy.parse("const:4")(5) == 4
        for bad in ("quadratic:1", "linear:0", "linear:x"):
            with pytest.raises(ValueError):
                TauPolicy.parse(bad)

    def test_strategy_aliases(self):
        assert Strategy.parse("coh") is Strategy.COHERENT
        with pytest.raises(ValueError):
            Strategy.parse("fast")


class TestRescale:
    @pytest.mark.parametrize("c", [2.0, 5.0, 10.0])
    def test_same_unitaries(self, c):
        s = schedule_circuit(TWO_TOFFOLI, "coh")
        r = s.rescaled(c)
        assert r.total_T == pytest.approx(s.total_T / c, abs=1e-15)
        for a, b in zip(s.segments, r.segments):
            assert a.unitary.allclose(b.unitary, atol=1e-12)
            assert b.p == pytest.approx(c * a.p, abs=1e-9)


class TestScheduleJson:
    @pytest.mark.parametrize("strategy", list(Strategy))
    def test_round_trip(self, strategy):
        s = schedule_circuit(widths_circuit((3, 2, 1)), strategy)
        text = json.dumps(schedule_to_dict(s), sort_keys=True)
        back = schedule_from_dict(json.loads(text))
        assert json.dumps(schedule_to_dict(back), sort_keys=True) == text

    def test_wrong_p_rejected(self):
        data = schedule_to_dict(schedule_circuit(TWO_X, "coh"))
        data["segments"][0]["p"] = 2.0
        with pytest.raises(FormatError, match="p"):
            schedule_from_dict(data)

    def test_bad_checkpoints_rejected(self):
        data = schedule_to_dict(schedule_circuit(TWO_X, "seq"))
        data["checkpoints"] = [1.0]
        with pytest.raises(FormatError, match="checkpoints"):
            schedule_from_dict(data)

    def test_missing_field(self):
        data = schedule_to_dict(schedule_circuit(TWO_X, "seq"))
        del data["tau"]
        with pytest.raises(FormatError, match="tau"):
            schedule_from_dict(data)

    def test_duration_edit_is_kept(self):
        s = schedule_circuit(TWO_X, "par")
        data = schedule_to_dict(dataclasses.replace(s, segments=(dataclasses.replace(s.segments[0], duration=1.0),)))
        assert schedule_from_dict(data).total_T == 1.0
