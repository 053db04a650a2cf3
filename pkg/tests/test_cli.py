import json
import math

import numpy as np
import pytest

from markov_binomial import make_params, moment_report, pmf, pmf_recurrence
from markov_binomial.cli import run

TRIMODAL_POINT = ["--n", "200", "--a", "0.01", "--b", "0.03", "--nu-f", "0.1"]


def run_capture(capsys, argv):
    code = run(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def parse_csv_values(text):
    lines = text.strip().split("\n")
    assert lines[0].startswith("#")
    assert lines[1] == "j,value"
    return [float(row.split(",")[1]) for row in lines[2:]]


class TestPmfCommand:
    def test_csv_full_pmf(self, capsys):
        code, out, _ = run_capture(capsys, ["pmf", *TRIMODAL_POINT])
        assert code == 0
        values = parse_csv_values(out)
        assert len(values) == 201
        assert abs(math.fsum(values) - 1.0) < 1e-10
        # header echoes the resolved parameters (17 significant digits)
        header = out.splitlines()[0]
        fields = dict(tok.split("=") for tok in header[2:].split())
        assert fields["n"] == "200" and fields["kind"] == "full"
        assert float(fields["a"]) == 0.01
        assert float(fields["b"]) == 0.03
        assert float(fields["nu_F"]) == 0.1

    def test_json_full_pmf(self, capsys):
        code, out, _ = run_capture(
            capsys, ["pmf", "--n", "7", "--a", "0.2", "--b", "0.5",
                     "--nu-f", "0.4", "--format", "json"])
        assert code == 0
        doc = json.loads(out)
        assert doc["n"] == 7 and doc["kind"] == "full"
        want = pmf(make_params(0.2, 0.5, 0.4), 7).values
        assert doc["values"] == list(want)

    def test_method_selection(self, capsys):
        base = ["pmf", "--n", "40", "--a", "0.15", "--b", "0.3", "--nu-f", "0.6"]
        _, out_f, _ = run_capture(capsys, base)
        _, out_r, _ = run_capture(capsys, [*base, "--method", "recurrence"])
        _, out_c, _ = run_capture(capsys, [*base, "--method", "closed"])
        vf = np.array(parse_csv_values(out_f))
        vr = np.array(parse_csv_values(out_r))
        vc = np.array(parse_csv_values(out_c))
        p = make_params(0.15, 0.3, 0.6)
        assert vf.tolist() == list(pmf(p, 40).values)
        assert vr.tolist() == list(pmf_recurrence(p, 40).values)
        assert np.max(np.abs(vc - vf)) < 1e-12

    def test_conditional_kind(self, capsys):
        code, out, _ = run_capture(
            capsys, ["pmf", "--n", "9", "--a", "0.3", "--b", "0.4",
                     "--nu", "stationary", "--cond", "A", "--format", "json"])
        assert code == 0
        doc = json.loads(out)
        assert doc["kind"] == "cond_A"
        assert doc["values"][9] == 0.0
        assert doc["nu_F"] == 0.4 / 0.7

    def test_out_file(self, tmp_path, capsys):
        target = tmp_path / "pmf.csv"
        code, out, _ = run_capture(
            capsys, ["pmf", "--n", "5", "--a", "0.2", "--b", "0.3",
                     "--nu-f", "0.5", "--out", str(target)])
        assert code == 0 and out == ""
        values = parse_csv_values(target.read_text())
        assert len(values) == 6


class TestMomentsCommand:
    def test_json_document(self, capsys):
        code, out, _ = run_capture(
            capsys, ["moments", "--n", "25", "--a", "0.1", "--b", "0.4",
                     "--nu-f", "0.7", "--format", "json"])
        assert code == 0
        doc = json.loads(out)
        assert doc["params"] == {"a": 0.1, "b": 0.4, "nu_F": 0.7}
        r = moment_report(make_params(0.1, 0.4, 0.7), 25)
        assert doc["report"] == {
            "n": 25, "mean": r.mean, "variance": r.variance,
            "cond_mean_F": r.cond_mean_F, "cond_mean_A": r.cond_mean_A,
            "cond_var_F": r.cond_var_F, "cond_var_A": r.cond_var_A,
        }

    def test_csv_layout(self, capsys):
        code, out, _ = run_capture(
            capsys, ["moments", "--n", "25", "--a", "0.1", "--b", "0.4",
                     "--nu", "stationary"])
        assert code == 0
        lines = out.strip().split("\n")
        assert lines[1] == "key,value"
        keys = [row.split(",")[0] for row in lines[2:]]
        assert keys == ["n", "mean", "variance", "cond_mean_F",
                        "cond_mean_A", "cond_var_F", "cond_var_A"]
        # stationary nu resolved to b/(a+b) and echoed in the header
        fields = dict(tok.split("=") for tok in lines[0][2:].split())
        assert float(fields["nu_F"]) == 0.8


class TestClassifyCommand:
    def test_slow_mixing_point_is_trimodal(self, capsys):
        code, out, _ = run_capture(capsys, ["classify", *TRIMODAL_POINT])
        assert code == 0
        lines = out.strip().split("\n")
        assert lines[1] == "key,value"
        rows = dict(row.split(",", 1) for row in lines[2:])
        assert rows["class"] == "trimodal"
        assert float(rows["margin"]) > 0.0
        assert list(rows) == ["class", "margin", "f(0)", "f(1)", "f(2)",
                              "f(n-2)", "f(n-1)", "f(n)"]

    def test_json_fields(self, capsys):
        code, out, _ = run_capture(
            capsys, ["classify", *TRIMODAL_POINT, "--format", "json"])
        assert code == 0
        doc = json.loads(out)
        assert doc["class"] == "trimodal"
        assert doc["kind"] == "full"
        assert len(doc["boundary_values"]) == 6

    def test_conditional_classification(self, capsys):
        code, out, _ = run_capture(
            capsys, ["classify", *TRIMODAL_POINT, "--cond", "F", "--format", "json"])
        assert code == 0
        doc = json.loads(out)
        assert doc["kind"] == "cond_F"
        assert doc["class"] not in ("trimodal", "bimodal_left")


class TestRegionCommand:
    def test_csv_grid(self, capsys):
        code, out, _ = run_capture(
            capsys, ["region", "--n", "20", "--nu", "stationary",
                     "--grid", "5"])
        assert code == 0
        lines = out.strip().split("\n")
        assert lines[0] == "# n=20 nu=stationary grid=5"
        assert lines[1] == "a,b,class"
        assert len(lines) == 2 + 25
        tokens = {row.split(",")[2] for row in lines[2:]}
        allowed = {"decreasing", "increasing", "unimodal",
                   "bimodal_left", "bimodal_right", "trimodal"}
        assert tokens <= allowed

    def test_json_grid(self, capsys):
        code, out, _ = run_capture(
            capsys, ["region", "--n", "12", "--nu-f", "0.5", "--grid", "4",
                     "--format", "json"])
        assert code == 0
        doc = json.loads(out)
        assert doc["n"] == 12 and doc["grid"] == 4 and doc["nu"] == 0.5
        assert len(doc["classes"]) == 4

    def test_rejects_degenerate_grid(self, capsys):
        code, _, err = run_capture(
            capsys, ["region", "--n", "12", "--nu-f", "0.5", "--grid", "1"])
        assert code == 2 and "grid" in err


class TestSampleCommand:
    def test_deterministic_output(self, capsys):
        argv = ["sample", "--n", "15", "--a", "0.2", "--b", "0.5",
                "--nu-f", "0.4", "--reps", "4000", "--seed", "11"]
        _, out1, _ = run_capture(capsys, argv)
        _, out2, _ = run_capture(capsys, argv)
        assert out1 == out2
        assert "seed=11" in out1.splitlines()[0]

    def test_json_echo(self, capsys):
        code, out, _ = run_capture(
            capsys, ["sample", "--n", "6", "--a", "0.3", "--b", "0.3",
                     "--nu", "stationary", "--reps", "500", "--seed", "2",
                     "--format", "json"])
        assert code == 0
        doc = json.loads(out)
        assert doc["reps"] == 500 and doc["seed"] == 2
        assert doc["nu_F"] == 0.5
        assert sum(doc["histogram"]) == 500


class TestSelfcheck:
    def test_passes_and_prints_sections(self, capsys):
        code, out, _ = run_capture(capsys, ["selfcheck"])
        assert code == 0
        lines = out.strip().split("\n")
        assert len(lines) == 4
        assert all(line.startswith("PASS") for line in lines)

    def test_out_file(self, tmp_path, capsys):
        target = tmp_path / "check.txt"
        code, out, _ = run_capture(capsys, ["selfcheck", "--out", str(target)])
        assert code == 0 and out == ""
        assert target.read_text().count("PASS") == 4


class TestReportCommand:
    def test_writes_all_artifacts(self, tmp_path, capsys):
        code, out, _ = run_capture(
            capsys, ["report", "--n", "30", "--a", "0.08", "--b", "0.2",
                     "--nu", "stationary", "--grid", "8",
                     "--out-dir", str(tmp_path)])
        assert code == 0
        names = {"pmf.csv", "pmf.png", "moments.json", "region.csv",
                 "region.png"}
        assert {p.name for p in tmp_path.iterdir()} == names
        listed = {line.rsplit("/", 1)[-1] for line in out.strip().split("\n")}
        assert listed == names
        for png in ("pmf.png", "region.png"):
            assert (tmp_path / png).read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"
        values = parse_csv_values((tmp_path / "pmf.csv").read_text())
        assert len(values) == 31
        doc = json.loads((tmp_path / "moments.json").read_text())
        assert "report" in doc and doc["report"]["n"] == 30
        region_lines = (tmp_path / "region.csv").read_text().strip().split("\n")
        assert len(region_lines) == 2 + 64


class TestExitCodes:
    def test_parameter_error_is_two(self, capsys):
        code, _, err = run_capture(
            capsys, ["pmf", "--n", "5", "--a", "1.5", "--b", "0.3",
                     "--nu-f", "0.5"])
        assert code == 2 and "argument error" in err

    def test_nonpositive_n_is_two(self, capsys):
        code, _, _ = run_capture(
            capsys, ["pmf", "--n", "0", "--a", "0.2", "--b", "0.3",
                     "--nu-f", "0.5"])
        assert code == 2

    def test_null_conditioning_is_one(self, capsys):
        code, _, err = run_capture(
            capsys, ["pmf", "--n", "1", "--a", "0.2", "--b", "0.3",
                     "--nu-f", "1", "--cond", "A"])
        assert code == 1 and "conditional" in err

    def test_usage_errors_are_two(self, capsys):
        # argparse rejects: missing nu, both nu forms, unknown subcommand
        assert run(["pmf", "--n", "5", "--a", "0.2", "--b", "0.3"]) == 2
        capsys.readouterr()
        assert run(["pmf", "--n", "5", "--a", "0.2", "--b", "0.3",
                    "--nu-f", "0.5", "--nu", "stationary"]) == 2
        capsys.readouterr()
        assert run(["frobnicate"]) == 2
        capsys.readouterr()

    def test_no_subcommand_is_two(self, capsys):
        assert run([]) == 2
        capsys.readouterr()
