import json
import math

import numpy as np
import pytest

from morseactions.cli import main
from morseactions.errors import ParseError, SchemaError
from morseactions.io_files import (
    load_potential,
    potential_to_dict,
    save_potential,
    write_csv,
    write_report,
)
from morseactions.potential import make_potential

PEND = {
    "K": 1,
    "n_params": 1,
    "cos": [[-1.0]],
    "sin": [[0.0]],
    "s0": 1.0,
    "param_box": [[-1.0, 1.0]],
}


@pytest.fixture()
def pend_file(tmp_path):
    path = tmp_path / "pend.json"
    path.write_text(json.dumps(PEND))
    return str(path)


class TestPotentialFiles:
    def test_roundtrip_bit_exact(self, tmp_path):
        pot = make_potential(cos=[-1.0, 0.123456789012345678, 0.0],
                             sin=[0.08, 0.0, 1e-17], s0=0.9)
        path = tmp_path / "p.json"
        save_potential(pot, path)
        back = load_potential(path)
        for a, b in zip(pot.cos_polys + pot.sin_polys, back.cos_polys + back.sin_polys):
            assert np.array_equal(a.coeffs, b.coeffs)
        assert back.s0 == pot.s0

    def test_malformed_json(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text('{"K": 1,,}')
        with pytest.raises(ParseError):
            load_potential(path)

    def test_unknown_field_named(self, tmp_path):
        doc = dict(PEND)
        doc["surprise"] = 1
        path = tmp_path / "u.json"
        path.write_text(json.dumps(doc))
        with pytest.raises(SchemaError, match="surprise"):
            load_potential(path)

    def test_missing_field(self, tmp_path):
        doc = {k: v for k, v in PEND.items() if k != "s0"}
        path = tmp_path / "m.json"
        path.write_text(json.dumps(doc))
        with pytest.raises(SchemaError, match="s0"):
            load_potential(path)

    def test_wrong_param_box(self, tmp_path):
        doc = dict(PEND)
        doc["param_box"] = []
        path = tmp_path / "w.json"
        path.write_text(json.dumps(doc))
        with pytest.raises(SchemaError):
            load_potential(path)


class TestCsvAndReports:
    def test_csv_format(self, tmp_path):
        path = tmp_path / "t.csv"
        write_csv([(1.0, 1 / 3), (2.0, 2e-17)], path, header=["a", "b"])
        text = path.read_bytes().decode()
        lines = text.split("\r\n")
        assert lines[0] == "a,b"
        assert lines[1].split(",")[1] == f"{1/3:.17g}"

    def test_report_schema_and_determinism(self, tmp_path):
        doc = {"x": [3, 2, 1], "nested": {"b": 1.5, "a": 2}}
        t1 = write_report(doc, None, constants={"M": 1.0}, seed=7)
        t2 = write_report(doc, None, constants={"M": 1.0}, seed=7)
        assert t1 == t2
        data = json.loads(t1)
        assert data["schema"] == "morse-actions/1"
        assert data["seed"] == 7
        assert data["constants"]["M"] == 1.0


class TestCli:
    def test_analyze(self, pend_file, capsys):
        code = main(["analyze", "--potential", pend_file, "--params", "0"])
        assert code == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["morse"]["beta"] == pytest.approx(1.0, rel=1e-9)
        assert doc["constants"]["M"] == pytest.approx(math.cosh(1.0))
        assert len(doc["regions"]) == 3

    def test_actions_row_count(self, pend_file, capsys):
        code = main(["actions", "--potential", pend_file, "--params", "0",
                     "--region", "1", "--energies=-0.999:0.999:64"])
        assert code == 0
        lines = capsys.readouterr().out.strip().splitlines()
        assert lines[0].strip() == "E,I,dI_dE,residual"
        assert len(lines) == 65

    def test_actions_deterministic(self, pend_file, capsys):
        args = ["actions", "--potential", pend_file, "--params", "0",
                "--region", "2", "--energies", "1.5:3.0:8"]
        main(args)
        out1 = capsys.readouterr().out
        main(args)
        out2 = capsys.readouterr().out
        assert out1 == out2

    def test_invert_csv(self, pend_file, capsys):
        code = main(["invert", "--potential", pend_file, "--params", "0",
                     "--region", "1", "--actions", "0.2:1.5:5"])
        assert code == 0
        lines = capsys.readouterr().out.strip().splitlines()
        assert lines[0].strip() == "I,E,dE_dI,d2E_dI2"
        row = lines[1].split(",")
        assert float(row[0]) == pytest.approx(0.2)

    def test_singular_report(self, pend_file, capsys):
        code = main(["singular", "--potential", pend_file, "--params", "0",
                     "--region", "1", "--side", "minus"])
        assert code == 0
        doc = json.loads(capsys.readouterr().out)
        fit = doc["fits"][0]
        assert fit["psi0"] == pytest.approx(math.sqrt(2) / (2 * math.pi), rel=1e-4)
        assert doc["all_passed"]

    def test_oracle_table(self, capsys):
        code = main(["oracle", "--region", "1", "--eta", "1.0",
                     "--energies=-0.9:0.9:4"])
        assert code == 0
        lines = capsys.readouterr().out.strip().splitlines()
        assert len(lines) == 5

    def test_domain_error_exit_code(self, pend_file, capsys):
        code = main(["invert", "--potential", pend_file, "--params", "0",
                     "--region", "1", "--actions", "5.0:6.0:2"])
        assert code == 1

    def test_usage_exit_code(self, capsys):
        code = main(["actions", "--region", "1"])
        assert code == 64

    def test_missing_file(self, capsys):
        code = main(["analyze", "--potential", "/nonexistent.json"])
        assert code == 1

    def test_verify_subset(self, capsys):
        code = main(["verify", "--suite", "standard-form"])
        out = capsys.readouterr().out
        assert code == 0
        assert "PASS" in out
