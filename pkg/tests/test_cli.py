import json
import math
import subprocess
import sys

import pytest

from cohpar.circuits import Circuit, TOFFOLI, X, gate_tree, serialize, uniform_circuit
from cohpar.cli import main
from cohpar.cost import analyze


@pytest.fixture
def write(tmp_path):
    def _write(name, circuit):
        path = tmp_path / name
        path.write_text(serialize(circuit), encoding="utf-8")
        return str(path)
    return _write


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


class TestSpecExamples:
    def test_verify_compiled_nand_tree(self, write, tmp_path, capsys):
        src = write("tree.json", gate_tree(4, "NAND"))
        out = str(tmp_path / "tree.rev.json")
        assert run(["compile", src, "-o", out], capsys)[0] == 0
        code, text, _ = run(["verify", out, "--json"], capsys)
        doc = json.loads(text)
        assert code == 0 and doc["passed"] and doc["mode"] == "exhaustive"

    def test_verify_irreversible_input_compiles_first(self, write, capsys):
        code, text, _ = run(["verify", write("t.json", gate_tree(4, "NAND")), "--strategy", "par"], capsys)
        assert code == 0 and "passed" in text and "True" in text

    def test_budget_violation(self, write, capsys):
        path = write("wide.json", uniform_circuit(3, 1))
        code, _, err = run(["schedule", path, "--strategy", "par", "--tau-policy", "const:4"], capsys)
        assert code == 1 and "budget" in err and "width 3" in err

    def test_report_on_empty_circuit(self, write, capsys):
        code, text, _ = run(["report", write("empty.json", Circuit(2, (0, 1))), "--json"], capsys)
        doc = json.loads(text)
        assert code == 0
        assert all(doc[k] == 0 for k in ("S", "D", "T_seq", "T_par", "T_coh_exact", "speedup_coh_seq"))


class TestPipeline:
    def test_schedule_simulate_qsl(self, write, tmp_path, capsys):
        src = write("tof.json", Circuit(3, (0, 1, 2), (TOFFOLI(0, 1, 2),)))
        sched = str(tmp_path / "s.json")
        assert run(["schedule", src, "--strategy", "coh", "-o", sched], capsys)[0] == 0
        code, text, _ = run(["simulate", sched, "--input", "110", "--json"], capsys)
        doc = json.loads(text)
        assert code == 0 and doc["final"]["state"] == "111"
        assert doc["final"]["magnitude"] == pytest.approx(1, abs=1e-12)
        code, text, _ = run(["qsl", sched, "--input", "110", "--json"], capsys)
        doc = json.loads(text)
        assert code == 0 and doc["valid"] and doc["saturation"] == pytest.approx(1, abs=1e-9)

    def test_schedule_defaults_to_stdout_json(self, write, capsys):
        code, text, _ = run(["schedule", write("x.json", uniform_circuit(2, 1))], capsys)
        assert code == 0 and json.loads(text)["strategy"] == "coherent"

    def test_layerize_table(self, write, capsys):
        code, text, _ = run(["layerize", write("x.json", uniform_circuit(2, 2))], capsys)
        assert code == 0 and text.startswith("S = 4  D = 2  delta = 2")

    def test_compile_strict(self, write, tmp_path, capsys):
        out = tmp_path / "o.json"
        code, text, _ = run(["compile", write("a.json", gate_tree(2, "NAND")), "-o", str(out), "--strict-toffoli", "--json"], capsys)
        assert code == 0 and json.loads(text)["mode"] == "bennett+strict-toffoli"
        assert (tmp_path / "o.report.json").exists()

    def test_sampled_verify(self, write, capsys):
        code, text, _ = run(["verify", write("u.json", uniform_circuit(3, 2)), "--samples", "64", "--seed", "5", "--json"], capsys)
        doc = json.loads(text)
        assert code == 0 and doc["mode"] == "sampled" and doc["inputs_checked"] == 64


class TestErrors:
    def test_missing_file(self, capsys):
        assert run(["report", "/nonexistent.json"], capsys)[0] == 2

    def test_bad_json(self, tmp_path, capsys):
        p = tmp_path / "bad.json"
        p.write_text('{"wires": 3, "inputs": [0], "gates": [{"kind": "FREDKIN", "controls": [0], "target": 1}]}')
        code, _, err = run(["report", str(p)], capsys)
        assert code == 2 and "FREDKIN" in err

    def test_bad_input_length(self, write, tmp_path, capsys):
        sched = str(tmp_path / "s.json")
        run(["schedule", write("x.json", uniform_circuit(2, 1)), "-o", sched], capsys)
        assert run(["simulate", sched, "--input", "1"], capsys)[0] == 2

    def test_unknown_subcommand(self, capsys):
        assert run(["explode"], capsys)[0] == 2


def test_deterministic_output(write, tmp_path):
    src = write("u.json", uniform_circuit(7, 1))
    outputs = []
    for i in range(2):
        out = tmp_path / f"v{i}.json"
        assert main(["verify", src, "--samples", "64", "--seed", "9", "-o", str(out)]) == 0
        outputs.append(out.read_bytes())
    assert outputs[0] == outputs[1]


def test_module_entry_point(write):
    path = write("x.json", uniform_circuit(1, 1))
    proc = subprocess.run([sys.executable, "-m", "cohpar", "report", path, "--json"], capture_output=True, text=True)
    assert proc.returncode == 0 and json.loads(proc.stdout)["S"] == 1


class TestCostReport:
    @pytest.mark.parametrize("k, d", [(2, 2), (3, 2), (2, 3), (3, 3)])
    def test_k_squared(self, k, d):
        rep = analyze(uniform_circuit(k, d))
        assert rep.speedup_coh_seq == pytest.approx(k * k, abs=1e-12)
        assert rep.speedup_coh_seq == pytest.approx(rep.speedup_par_seq * rep.speedup_coh_par, abs=1e-12)
        assert rep.T_coh_exact <= rep.T_par <= rep.T_seq
        assert rep.estimate_gap == pytest.approx(0, abs=1e-12)

    def test_mixed_widths_flag_gap(self):
        rep = analyze(gate_tree(8))
        assert rep.compiled and rep.widths == (4, 2, 1)
        assert rep.T_coh_exact == pytest.approx(math.pi / 2 * 7 / 4, abs=1e-12)
        assert rep.T_coh_estimate == pytest.approx(math.pi / 2 * 9 / 7, abs=1e-12)
        assert not rep.uniform_width and rep.estimate_gap < 0

    def test_single_gate_all_equal(self):
        rep = analyze(Circuit(1, (0,), (X(0),)))
        assert rep.T_seq == rep.T_par == rep.T_coh_exact == pytest.approx(math.pi / 2)
