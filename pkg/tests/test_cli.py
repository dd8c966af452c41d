import csv
import io
import json
from fractions import Fraction
from pathlib import Path

import jsonschema
import pytest

from ana_sdof.cli import main

SCHEMAS = Path(__file__).resolve().parent.parent / "docs" / "schemas"


def schema(name):
    return json.loads((SCHEMAS / f"{name}.schema.json").read_text())


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.fixture(autouse=True)
def _clear_seed_env(monkeypatch):
    monkeypatch.delenv("ANA_DOF_SEED", raising=False)


class TestSdof:
    def test_fraction(self, capsys):
        assert run(capsys, "sdof", "--m", "4", "--na", "3", "--nb", "2", "--csit", "delayed")[:2] == (0, "12/7 ≈ 1.714286\n")

    def test_zero(self, capsys):
        assert run(capsys, "sdof", "--m", "2", "--na", "3", "--nb", "2", "--csit", "delayed")[:2] == (0, "0\n")

    def test_partial_out_of_range(self, capsys):
        code, out, err = run(capsys, "sdof", "--m", "3", "--na", "3", "--nb", "2", "--csit", "partial")
        assert code == 2 and out == "" and "m > max" in err

    def test_bad_mode(self, capsys):
        assert run(capsys, "sdof", "--m", "3", "--na", "3", "--nb", "2", "--csit", "psychic")[0] == 2

    def test_bad_antennas(self, capsys):
        assert run(capsys, "sdof", "--m", "0", "--na", "3", "--nb", "2", "--csit", "delayed")[0] == 2

    def test_missing_flag(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["sdof", "--m", "3"])
        assert exc.value.code == 2


class TestSweep:
    def rows(self, capsys, *extra):
        code, out, _ = run(capsys, "sweep", "--na", "3", "--nb", "2", *extra)
        assert code == 0
        return list(csv.DictReader(io.StringIO(out)))

    def test_full_grid(self, capsys):
        rows = self.rows(capsys)
        assert len(rows) == 32
        assert list(rows[0]) == ["m", "mode", "sdof_num", "sdof_den", "sdof_float"]

        def col(mode):
            return [
                Fraction(int(r["sdof_num"]), int(r["sdof_den"])) if r["sdof_num"] else None
                for r in rows
                if r["mode"] == mode
            ]

        assert col("delayed") == [0, 0, 1, Fraction(12, 7)] + [Fraction(15, 7)] * 4
        assert col("partial") == [None] * 3 + [Fraction(3, 2)] + [Fraction(9, 5)] * 4
        assert col("perfect") == [0, 0, 1, 2, 3, 3, 3, 3]
        assert col("none") == [0, 0] + [1] * 6

    def test_mode_filter(self, capsys):
        rows = self.rows(capsys, "--csit", "delayed", "--m-max", "3")
        assert [(r["m"], r["mode"]) for r in rows] == [("1", "delayed"), ("2", "delayed"), ("3", "delayed")]

    def test_bad_range(self, capsys):
        assert run(capsys, "sweep", "--na", "3", "--nb", "2", "--m-min", "4", "--m-max", "2")[0] == 2


class TestRegion:
    def test_json_vertices(self, capsys):
        code, out, _ = run(capsys, "region", "--m", "5", "--na", "3", "--nb", "2")
        assert code == 0
        record = json.loads(out)
        jsonschema.validate(record, schema("region"))
        assert [(v["dA"], v["dB"]) for v in record["vertices"]] == [("15/7", "0"), ("9/5", "4/5"), ("0", "5/4"), ("0", "0")]

    def test_dof_vertex(self, capsys):
        record = json.loads(run(capsys, "region", "--m", "5", "--na", "3", "--nb", "2", "--which", "dof-delayed")[1])
        jsonschema.validate(record, schema("region"))
        assert {"dA": "45/19", "dB": "20/19", "dA_float": 2.368421, "dB_float": 1.052632} in record["vertices"]

    def test_perfect_rectangle(self, capsys):
        record = json.loads(run(capsys, "region", "--m", "5", "--na", "3", "--nb", "2", "--which", "sdof-perfect")[1])
        assert {(v["dA"], v["dB"]) for v in record["vertices"]} == {("3", "0"), ("3", "2"), ("0", "2"), ("0", "0")}

    def test_csv(self, capsys):
        out = run(capsys, "region", "--m", "5", "--na", "3", "--nb", "2", "--format", "csv")[1]
        rows = list(csv.reader(io.StringIO(out)))
        assert rows[0] == ["record", "index", "a", "b", "c"]
        assert ["vertex", "1", "9/5", "4/5", ""] in rows
        assert sum(r[0] == "halfplane" for r in rows) == 2

    def test_perfect_out_of_range(self, capsys):
        assert run(capsys, "region", "--m", "3", "--na", "3", "--nb", "2", "--which", "sdof-perfect")[0] == 2


class TestSimulate:
    @pytest.mark.parametrize(
        "kind, c, expected",
        [("wiretap3", ("5", "3", "2"), [15 / 7]), ("miso4", ("2", "1", "1"), [0.5, 0.5]), ("bcc4", ("5", "3", "2"), [1.8, 0.8])],
    )
    def test_passes(self, capsys, kind, c, expected):
        code, out, _ = run(capsys, "simulate", "--kind", kind, "--m", c[0], "--na", c[1], "--nb", c[2])
        record = json.loads(out)
        jsonschema.validate(record, schema("simulate"))
        assert code == 0 and record["pass"]
        assert record["slopes"] == pytest.approx(expected, abs=0.05)

    def test_failure_exit_code(self, capsys):
        code, out, _ = run(
            capsys, "simulate", "--kind", "wiretap3", "--m", "5", "--na", "3", "--nb", "2", "--trials", "2", "--no-artificial-noise"
        )
        assert code == 1 and json.loads(out)["pass"] is False

    def test_unsupported_config(self, capsys):
        assert run(capsys, "simulate", "--kind", "miso4", "--m", "5", "--na", "3", "--nb", "2")[0] == 2

    def test_bad_grid(self, capsys):
        args = ("simulate", "--kind", "wiretap3", "--m", "2", "--na", "1", "--nb", "1", "--grid-db", "40")
        assert run(capsys, *args)[0] == 2

    def test_env_seed(self, capsys, monkeypatch):
        args = ("simulate", "--kind", "wiretap3", "--m", "2", "--na", "1", "--nb", "1", "--trials", "2")
        monkeypatch.setenv("ANA_DOF_SEED", "7")
        assert json.loads(run(capsys, *args)[1])["seed"] == 7
        assert json.loads(run(capsys, *args, "--seed", "3")[1])["seed"] == 3
        monkeypatch.setenv("ANA_DOF_SEED", "banana")
        assert run(capsys, *args)[0] == 2


class TestVerifyLemma:
    def test_pass(self, capsys):
        code, out, _ = run(capsys, "verify-lemma", "--count", "200", "--l-max", "5", "--q", "2")
        record = json.loads(out)
        jsonschema.validate(record, schema("verify-lemma"))
        assert code == 0 and record["pass"] and record["checked"] == 200
        assert record["worst_margin_ess1"] >= -1e-9 and record["worst_margin_ess2"] >= -1e-9

    def test_injected_source_is_hypothesis_violation(self, capsys):
        code, out, _ = run(capsys, "verify-lemma", "--count", "5", "--inject-nonexchangeable")
        record = json.loads(out)
        assert code == 0 and record["failures"] == 0
        assert len(record["hypothesis_violations"]) == 1

    def test_empty(self, capsys):
        code, out, _ = run(capsys, "verify-lemma", "--count", "0")
        record = json.loads(out)
        jsonschema.validate(record, schema("verify-lemma"))
        assert code == 0 and record["pass"] and record["checked"] == 0

    def test_bad_q(self, capsys):
        assert run(capsys, "verify-lemma", "--q", "9")[0] == 2


class TestOtherCommands:
    def test_dump_channel(self, capsys):
        code, out, _ = run(capsys, "dump-channel", "--m", "2", "--na", "1", "--nb", "1", "--n", "3", "--seed", "5")
        assert code == 0
        record = json.loads(out)
        jsonschema.validate(record, schema("channel"))
        assert record["n"] == 3 and len(record["slots"]) == 3

    def test_layout(self, capsys):
        code, out, _ = run(capsys, "layout", "--kind", "wiretap3", "--m", "5", "--na", "3", "--nb", "2")
        record = json.loads(out)
        jsonschema.validate(record, schema("layout"))
        assert record["effective_legit"] == [63, 63]


def test_file_output_byte_identical(tmp_path, capsys):
    paths = [tmp_path / "a.json", tmp_path / "b.json"]
    for p in paths:
        args = ["simulate", "--kind", "bcc4", "--m", "4", "--na", "3", "--nb", "2", "--trials", "3", "--seed", "11"]
        assert main(args + ["--out", str(p)]) == 0
    assert capsys.readouterr().out == ""
    raw = paths[0].read_bytes()
    assert raw == paths[1].read_bytes()
    assert b"\r\n" not in raw and raw.endswith(b"\n")
    raw.decode("utf-8")


def test_sweep_file_output(tmp_path):
    out = tmp_path / "sweep.csv"
    assert main(["sweep", "--na", "3", "--nb", "2", "--out", str(out)]) == 0
    text = out.read_bytes().decode("utf-8")
    assert text.startswith("m,mode,sdof_num,sdof_den,sdof_float\n") and "\r" not in text
