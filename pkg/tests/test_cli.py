import csv
import io
import json
import subprocess
import sys
from fractions import Fraction as F
from pathlib import Path

import pytest

from socialvalue import example1
from socialvalue.cli import main
from socialvalue.serialize import (
    dumps,
    experiment_from_json,
    load,
    parse_rational,
    problem_from_json,
    prior_from_json,
    roundtrip,
)
from socialvalue.errors import ParseError

DATA = Path(__file__).parent / "data"
KINDS = {"prior_half.json": "prior", "threshold_7_10.json": "problem", "example2_problem.json": "problem"}


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


class TestSerialization:
    @pytest.mark.parametrize("path", sorted(DATA.glob("*.json")), ids=lambda p: p.name)
    def test_roundtrip_is_byte_identical(self, path):
        kind = KINDS.get(path.name, "experiment")
        once = roundtrip(path, kind)
        assert once == path.read_text()

    def test_version_optional_but_checked(self):
        doc = {"signals": ["a"], "likelihood": {"L": ["1"], "H": ["1"]}}
        assert len(experiment_from_json(doc)) == 1
        with pytest.raises(ParseError):
            experiment_from_json({**doc, "version": "v2"})

    @pytest.mark.parametrize("doc", [
        {"signals": ["a"], "likelihood": {"L": [1.0], "H": ["1"]}},
        {"signals": ["a"], "likelihood": {"L": ["x"], "H": ["1"]}},
        {"signals": "a", "likelihood": {"L": ["1"], "H": ["1"]}},
        {"signals": ["a"], "likelihood": {"L": ["1"]}},
        [],
    ])
    def test_bad_experiments(self, doc):
        with pytest.raises(ParseError):
            experiment_from_json(doc)

    def test_bad_problem(self):
        with pytest.raises(ParseError):
            problem_from_json({"actions": ["a"], "payoff": {"a": {"L": "0", "H": "0"}, "b": {"L": "0", "H": "0"}}})
        with pytest.raises(ParseError):
            problem_from_json({"actions": ["a"], "payoff": {"a": {"L": "0"}}})

    def test_prior(self):
        assert prior_from_json({"mu0": "1/3"}).mu0 == F(1, 3)
        with pytest.raises(ParseError):
            prior_from_json({})

    def test_rationals(self):
        assert parse_rational("-7/10") == F(-7, 10)
        assert parse_rational(3) == 3
        for bad in (0.5, True, None, "1/0"):
            with pytest.raises(ParseError):
                parse_rational(bad)

    def test_canonical_form(self):
        b = example1()
        text = dumps(b.pi)
        assert text.endswith("}\n") and '"version": "v1"' in text
        assert dumps(load(DATA / "example1_pi.json", "experiment")) == text


class TestOrder:
    def test_first_example_refuted(self, capsys):
        code, out, _ = run(capsys, "order", "--relation", "S", "--pi", DATA / "example1_pi.json",
                           "--piprime", DATA / "example1_piprime.json", "--horizon", 4)
        doc = json.loads(out)
        assert code == 2
        assert doc["version"] == "v1" and doc["status"] == "Refuted"
        cert = doc["certificate"]
        assert (cert["r"], cert["agent"], cert["gap"]) == ("7/10", 2, "1/100")

    def test_check_verb_and_gap_table(self, capsys):
        code, out, _ = run(capsys, "order", "check", "--relation", "S", "--pi", DATA / "example1_pi.json",
                           "--piprime", DATA / "example1_piprime.json", "--horizon", 3, "--output", "csv")
        table = rows(out)
        assert code == 2 and list(table[0]) == ["r", "i", "V", "Vbar", "gap"]
        assert table[1] == {"r": "7/10", "i": "2", "V": "63/500", "Vbar": "17/125", "gap": "1/100"}

    def test_sufficient_pair_proved(self, capsys):
        code, out, _ = run(capsys, "order", "--relation", "S", "--pi", DATA / "conclusive_17_20.json",
                           "--piprime", DATA / "sym_2_3.json")
        doc = json.loads(out)
        assert code == 0 and doc["status"] == "ProvedBySufficient" and doc["certificate"]["p"] == "3/20"

    def test_eventual(self, capsys):
        code, out, _ = run(capsys, "order", "--relation", "ES", "--pi", DATA / "example1_pi.json",
                           "--piprime", DATA / "example1_piprime.json", "--horizon", 5)
        assert code == 2 and json.loads(out)["notes"]["persistence"] == "proved"

    def test_weak(self, capsys):
        code, out, _ = run(capsys, "order", "--relation", "W", "--pi", DATA / "example2_pi.json",
                           "--piprime", DATA / "example2_piprime.json", "--horizon", 2)
        assert code == 0 and json.loads(out)["status"] == "ProvedBySufficient"
        code, out, _ = run(capsys, "order", "--relation", "W", "--pi", DATA / "example1_pi.json",
                           "--piprime", DATA / "example1_piprime.json", "--horizon", 3)
        assert code == 2

    def test_self(self, capsys):
        code, out, _ = run(capsys, "order", "--relation", "SELF", "--pi", DATA / "supp_quarter.json")
        cert = json.loads(out)["certificate"]
        assert code == 2 and cert["equilibrium_value"] == "0" and cert["benchmark"] == "3/128"

    def test_missing_rival(self, capsys):
        code, _, err = run(capsys, "order", "--relation", "S", "--pi", DATA / "sym_2_3.json")
        assert code == 1 and err.startswith("ParameterViolation: ")

    def test_explicit_threshold(self, capsys):
        code, out, _ = run(capsys, "refute", "--pi", DATA / "example1_pi.json",
                           "--piprime", DATA / "example1_piprime.json", "--horizon", 3, "--r", "17/24")
        assert code == 2 and json.loads(out)["certificate"]["gap"] == "11/1200"


class TestEquilibrium:
    def test_csv(self, capsys):
        code, out, _ = run(capsys, "equilibrium", "--pi", DATA / "example1_pi.json",
                           "--problem", DATA / "threshold_7_10.json", "--horizon", 2, "--output", "csv")
        table = rows(out)
        assert code == 0 and list(table[0]) == ["agent", "V", "Vbar", "alphaH", "alphaL"]
        assert table[1]["V"] == "63/500" and table[1]["alphaH"] == "a0=4/25;a1=21/25"

    def test_json_profile(self, capsys):
        code, out, _ = run(capsys, "equilibrium", "--pi", DATA / "example1_pi.json",
                           "--problem", DATA / "threshold_7_10.json", "--horizon", 2)
        doc = json.loads(out)
        assert doc["equilibria"][0]["profile"]["decisions"]["a1"]["s2"] == {"a1": "1"}

    def test_enumerate(self, capsys):
        code, out, _ = run(capsys, "equilibrium", "--pi", DATA / "example2_pi.json",
                           "--problem", DATA / "example2_problem.json", "--horizon", 2, "--tie-break", "all")
        doc = json.loads(out)
        assert {e["V"][1] for e in doc["equilibria"]} == {"1/16", "19/240"} and not doc["truncated"]

    def test_preference(self, capsys):
        code, out, _ = run(capsys, "equilibrium", "--pi", DATA / "example2_pi.json",
                           "--problem", DATA / "example2_problem.json", "--horizon", 1,
                           "--tie-break", "pref:a1,a0,a2", "--output", "csv")
        assert rows(out)[0]["alphaH"] == "a0=0;a1=1;a2=0"

    def test_vbar_no_information_constant(self, capsys):
        code, out, _ = run(capsys, "vbar", "--pi", DATA / "no_info.json", "--problem", DATA / "threshold_7_10.json",
                           "--horizon", 4, "--output", "csv")
        assert code == 0 and {r["Vbar"] for r in rows(out)} == {"0"} and len(rows(out)) == 4

    def test_node_cap(self, capsys):
        code, _, err = run(capsys, "equilibrium", "--pi", DATA / "sym_2_3.json",
                           "--problem", DATA / "threshold_7_10.json", "--horizon", 6, "--cap-nodes", 5)
        assert code == 1 and err.startswith("ResourceLimit: ") and err.count("\n") == 1

    def test_atom_cap(self, capsys):
        code, _, err = run(capsys, "vbar", "--pi", DATA / "example1_pi.json",
                           "--problem", DATA / "threshold_7_10.json", "--horizon", 6, "--cap-atoms", 3)
        assert code == 1 and err.startswith("ResourceLimit: ")


class TestReproduce:
    def test_first_example(self, capsys):
        code, out, _ = run(capsys, "reproduce", "example1", "--horizon", 8, "--output", "csv")
        table = rows(out)
        assert code == 0 and len(table) == 8
        for row in table:
            assert row["V_pi"] == row["oracle_V_pi"] and row["V_piprime"] == row["oracle_V_piprime"]
            if row["agent"] != "1":
                assert row["gap"] == row["oracle_gap"] and F(row["gap"]) > 0

    def test_second_example(self, capsys):
        code, out, _ = run(capsys, "reproduce", "example2", "--output", "csv")
        second = rows(out)[1]
        assert second["V_pi_sigma_star"] == "1/16" == second["oracle_V_pi_sigma_star"]
        assert second["V_piprime_sigma_2star"] == "1/15" == second["Vbar_piprime"]

    def test_params(self, capsys):
        code, out, _ = run(capsys, "reproduce", "example1", "--horizon", 3, "--param", "r=17/24", "--output", "json")
        doc = json.loads(out)
        assert doc["params"]["r"] == "17/24" and doc["rows"][1]["gap"] == "11/1200"

    @pytest.mark.parametrize("param", ["r=4/5", "bogus=1", "r"])
    def test_bad_params(self, capsys, param):
        code, _, err = run(capsys, "reproduce", "example1", "--param", param)
        assert code == 1 and err.count("\n") == 1


class TestMisc:
    def test_inspect(self, capsys):
        code, out, _ = run(capsys, "inspect", "--pi", DATA / "example1_pi.json")
        doc = json.loads(out)
        assert doc["private_beliefs"] == {"0": "2/5", "2/3": "3/10", "1": "3/10"}
        assert doc["classification"]["unbounded_beliefs"] is True

    def test_blackwell(self, capsys):
        code, out, _ = run(capsys, "blackwell", "--pi", DATA / "example1_pi.json",
                           "--piprime", DATA / "example1_piprime.json")
        doc = json.loads(out)
        assert doc["pi_geq_piprime"] and not doc["piprime_geq_pi"] and doc["reverse_kernel"] is None
        assert doc["kernel"]["s1"] == {"s1": "2/3", "s2": "1/3"}

    def test_sweep(self, capsys):
        code, out, _ = run(capsys, "sweep", "--pi", DATA / "example1_pi.json",
                           "--piprime", DATA / "example1_piprime.json", "--horizon", 2, "--output", "csv")
        table = rows(out)
        assert list(table[0]) == ["r", "i", "V", "Vbar", "gap"]
        assert {"r": "7/10", "i": "2", "V": "63/500", "Vbar": "17/125", "gap": "1/100"} in table

    def test_deterministic(self, capsys):
        argv = ["sweep", "--pi", DATA / "example1_pi.json", "--piprime", DATA / "example1_piprime.json",
                "--horizon", 3]
        assert run(capsys, *argv) == run(capsys, *argv)

    def test_out_file(self, capsys, tmp_path):
        target = tmp_path / "v.csv"
        code, out, _ = run(capsys, "vbar", "--pi", DATA / "sym_2_3.json", "--problem", DATA / "threshold_7_10.json",
                           "--horizon", 2, "--output", "csv", "--out", target)
        assert code == 0 and out == "" and target.read_text().startswith("agent,Vbar\n")

    @pytest.mark.parametrize("argv", [
        ["inspect", "--pi", "missing.json"],
        ["inspect"],
        ["order", "--relation", "X", "--pi", "a"],
        ["inspect", "--pi", str(DATA / "sym_2_3.json"), "--prior", "0.5"],
        ["inspect", "--pi", str(DATA / "sym_2_3.json"), "--prior", "3/2"],
        ["equilibrium", "--pi", str(DATA / "sym_2_3.json"), "--problem", str(DATA / "threshold_7_10.json"),
         "--horizon", "0"],
    ])
    def test_errors_exit_one(self, capsys, argv):
        code, out, err = run(capsys, *argv)
        assert code == 1 and out == "" and err.count("\n") == 1 and ": " in err

    def test_bad_json_file(self, capsys, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("{")
        code, _, err = run(capsys, "inspect", "--pi", bad)
        assert code == 1 and err.startswith("ParseError: ")

    def test_module_entry_point(self):
        proc = subprocess.run([sys.executable, "-m", "socialvalue", "vbar", "--pi", str(DATA / "no_info.json"),
                               "--problem", str(DATA / "threshold_7_10.json"), "--horizon", "2", "--output", "csv"],
                              capture_output=True, text=True, check=False)
        assert proc.returncode == 0 and proc.stdout == "agent,Vbar\n1,0\n2,0\n"
