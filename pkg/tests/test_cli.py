"""Command-line surface tests.

run() is exercised in-process: stdout is captured per invocation, parsed
back as JSON and re-validated, so every test doubles as a round-trip check
of the record schema. Exit codes: 0 ok, 1 domain error, 2 usage, 3 budget.
"""

import json
import os
from fractions import Fraction

import pytest
from argparse import ArgumentTypeError

from egyfrac.absorption import replay_trace
from egyfrac.cli import parse_rational, run, validate_record
from egyfrac.modular import make_instance, residue_coverage

TIMESTAMP_KEYS = ("started", "finished", "elapsed")


def invoke(capsys, argv):
    code = run(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def record_of(capsys, argv):
    code, out, err = invoke(capsys, argv)
    assert code == 0, err
    record = json.loads(out)
    validate_record(record)
    return record


def strip_timestamps(record):
    return {k: v for k, v in record.items() if k not in TIMESTAMP_KEYS}


def test_parse_rational():
    assert parse_rational("1/1") == Fraction(1)
    assert parse_rational("25/12") == Fraction(25, 12)
    assert parse_rational("-3/6") == Fraction(-1, 2)
    assert parse_rational(" 7 ") == Fraction(7)
    with pytest.raises(ArgumentTypeError):
        parse_rational("3/0")
    with pytest.raises(ArgumentTypeError):
        parse_rational("x/2")
    with pytest.raises(ArgumentTypeError):
        parse_rational("1.5")


def test_count_record(capsys):
    record = record_of(capsys, ["count", "--n", "6", "--x", "1/1", "--mode", "exact"])
    assert record["count"] == "2"
    assert record["method"] == "brute"
    assert record["mode"] == "exact"
    assert record["parameters"]["n"] == 6
    assert record["version"]
    assert record["started"] <= record["finished"]


def test_count_methods_agree(capsys):
    auto = record_of(capsys, ["count", "--n", "14", "--x", "1/2", "--mode", "atmost"])
    mitm = record_of(
        capsys,
        ["count", "--n", "14", "--x", "1/2", "--mode", "atmost", "--method", "mitm"],
    )
    assert auto["count"] == mitm["count"]
    assert auto["method"] == "brute"
    assert mitm["method"] == "mitm"


def test_verify_record(capsys):
    record = record_of(capsys, ["verify", "--n", "6", "--x", "1/1", "--set", "2,3,6"])
    assert record["verified"] is True
    assert record["elements"] == [2, 3, 6]
    record = record_of(capsys, ["verify", "--n", "6", "--x", "1/1", "--set", "2,3"])
    assert record["verified"] is False


def test_lambda_and_cx_records(capsys):
    lam = record_of(capsys, ["lambda", "--x", "1/1"])
    assert lam["lambda"] == pytest.approx(0.1271909151247070, abs=1e-9)
    assert lam["residual"] < 1e-8
    cx = record_of(capsys, ["cx", "--x", "1/1"])
    assert cx["c_x"] == pytest.approx(0.91117, abs=1e-4)
    assert cx["lambda"] == pytest.approx(lam["lambda"], abs=1e-12)


def test_entropy_record_and_csv(capsys):
    record = record_of(capsys, ["entropy", "--n", "40", "--x", "1/1"])
    assert record["saturated"] is False
    assert 0 < record["H"] < 40
    assert record["residual"] < 1e-9
    code, out, _ = invoke(capsys, ["entropy", "--n", "40", "--x", "1/1", "--format", "csv"])
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "m,p"
    assert len(lines) == 41
    saturated = record_of(capsys, ["entropy", "--n", "5", "--x", "9/1"])
    assert saturated["saturated"] is True
    assert saturated["c"] == 0.0


def test_simulate_record_is_deterministic(capsys):
    argv = ["simulate", "--n", "500", "--x", "1/1", "--trials", "800", "--seed", "42"]
    first = record_of(capsys, argv)
    second = record_of(capsys, argv)
    assert strip_timestamps(first) == strip_timestamps(second)
    assert first["trials"] == 800
    assert 0.0 <= first["estimate"] <= 1.0
    assert first["stderr"] > 0.0


def test_modcover_record_matches_library(capsys):
    record = record_of(
        capsys,
        ["modcover", "--q", "13", "--lo", "2", "--hi", "10", "--smax", "3"],
    )
    cover = residue_coverage(make_instance(13, range(2, 11), 3))
    assert record["reachable"] == sum(1 for c in cover if c is not None)
    assert record["unreachable"] == sum(1 for c in cover if c is None)
    assert record["max_min_size"] == max(c for c in cover if c is not None)
    code, out, _ = invoke(
        capsys,
        ["modcover", "--q", "13", "--lo", "2", "--hi", "10", "--smax", "3", "--format", "csv"],
    )
    assert code == 0
    assert out.splitlines()[0] == "size,residues"


def test_sieve_record(capsys):
    record = record_of(capsys, ["sieve", "--n", "100", "--t", "10"])
    assert record["count"] == "31"
    assert record["fraction"] == pytest.approx(0.31)
    assert record["u"] == pytest.approx(0.5)
    assert record["linear_density"] is None
    record = record_of(capsys, ["sieve", "--n", "100", "--t", "50"])
    assert record["linear_density"] is not None


def test_construct_record_and_trace_file(capsys, tmp_path):
    trace_path = tmp_path / "trace.json"
    record = record_of(
        capsys,
        [
            "construct",
            "--n",
            "400",
            "--x",
            "1/1",
            "--seed",
            "1",
            "--count",
            "2",
            "--trace",
            str(trace_path),
        ],
    )
    assert record["requested"] == 2
    assert record["completed"] == 2
    assert record["succeeded"] == 2
    assert record["distinct"] == 2
    stored = json.loads(trace_path.read_text())
    assert isinstance(stored, list) and len(stored) == 2
    assert all(replay_trace(t) for t in stored)
    assert [t for t in record["traces"]] == stored


def test_out_file_and_env_dir(capsys, tmp_path, monkeypatch):
    out_path = tmp_path / "record.json"
    code, out, _ = invoke(
        capsys, ["count", "--n", "5", "--x", "1/2", "--out", str(out_path)]
    )
    assert code == 0
    assert out == ""
    validate_record(json.loads(out_path.read_text()))

    monkeypatch.setenv("EGYFRAC_OUT_DIR", str(tmp_path))
    code, _, _ = invoke(capsys, ["count", "--n", "5", "--x", "1/2", "--out", "rel.json"])
    assert code == 0
    validate_record(json.loads((tmp_path / "rel.json").read_text()))


def test_usage_errors_exit_2(capsys):
    assert invoke(capsys, ["no-such-command"])[0] == 2
    assert invoke(capsys, ["count", "--n", "6"])[0] == 2  # missing --x
    assert invoke(capsys, ["count", "--n", "6", "--x", "3/0"])[0] == 2
    assert invoke(capsys, [])[0] == 2


def test_domain_errors_exit_1(capsys):
    code, _, err = invoke(capsys, ["count", "--n", "0", "--x", "1/1"])
    assert code == 1
    assert "error:" in err
    code, _, err = invoke(capsys, ["verify", "--n", "6", "--x", "1/1", "--set", "2,x"])
    assert code == 1
    code, _, err = invoke(capsys, ["count", "--n", "6", "--x", "1/1", "--format", "csv"])
    assert code == 1
    code, _, err = invoke(capsys, ["simulate", "--n", "50", "--x", "1/1", "--trials", "0"])
    assert code == 1


def test_budget_truncation_exit_3(capsys):
    code, out, _ = invoke(
        capsys,
        ["construct", "--n", "400", "--x", "1/1", "--count", "5", "--budget", "0"],
    )
    assert code == 3
    record = json.loads(out)
    assert record["truncated"] is True
    assert record["completed"] == 0
    # an expired budget before any simulation trial is a plain domain error
    code, _, _ = invoke(
        capsys, ["simulate", "--n", "100", "--x", "1/1", "--trials", "10", "--budget", "0"]
    )
    assert code == 1


def test_validate_record_requires_command_keys():
    with pytest.raises(ValueError):
        validate_record({"command": "count"})
    with pytest.raises(ValueError):
        validate_record(
            {
                "command": "mystery",
                "parameters": {},
                "version": "1",
                "started": "a",
                "finished": "b",
            }
        )


def test_version_flag_exits_zero(capsys):
    assert invoke(capsys, ["--version"])[0] == 0
