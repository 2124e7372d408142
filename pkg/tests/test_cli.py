import json

import pytest
from click.testing import CliRunner

from tmlab.cli import cli, dump_json, parse_grid


@pytest.fixture
def run():
    runner = CliRunner()

    def invoke(*args):
        return runner.invoke(cli, list(args))

    return invoke


@pytest.mark.parametrize(
    "args, expected",
    [
        (["-b", "2", "-m", "2", "--start", "0", "-n", "16", "--rename", "ab"], "abbabaabbaababba"),
        (["-b", "5", "-m", "3", "--start", "1", "-n", "5", "--rename", "△♦♥"], "♦♥△♦♥"),
        (["-b", "2", "-m", "1", "-n", "4"], "0000"),
    ],
)
def test_generate(run, args, expected):
    res = run("generate", *args)
    assert res.exit_code == 0
    assert res.output.strip() == expected


def test_generate_check_and_json(run):
    res = run("generate", "-b", "3", "-m", "4", "-n", "30", "--check", "--json")
    assert res.exit_code == 0
    record = json.loads(res.output)
    assert record["payload"]["check"] == "PASS"
    assert record["params"] == {"b": 3, "m": 4, "start": 0}


@pytest.mark.parametrize(
    "args",
    [["-b", "1", "-m", "2", "-n", "3"], ["-b", "2", "-m", "2", "--start", "5", "-n", "3"], ["-b", "2", "-m", "3", "-n", "3", "--rename", "ab"]],
)
def test_invalid_params_exit_2(run, args):
    assert run("generate", *args).exit_code == 2


def test_critical_closed_forms(run):
    assert run("critical", "-b", "5", "-m", "3").output.strip() == "10/3"
    assert run("critical", "-b", "3", "-m", "2").output.strip() == "inf"
    assert run("critical", "-b", "2", "-m", "5").output.strip() == "2"


def test_critical_scan(run):
    res = run("critical", "-b", "5", "-m", "3", "--scan", "200")
    assert res.exit_code == 0
    lines = res.output.strip().splitlines()
    assert lines[0] == "10/3"
    assert lines[1].startswith("empirical 10/3 at 120")
    assert lines[-1] == "PASS"


def test_critical_scan_auto_and_short_horizon(run):
    auto = run("critical", "-b", "4", "-m", "2", "--scan", "--json")
    record = json.loads(auto.output)
    assert auto.exit_code == 0 and record["payload"]["status"] == "PASS"
    assert record["provenance"]["horizon"] == record["provenance"]["suggested_horizon"]
    short = run("critical", "-b", "5", "-m", "3", "--scan", "100")
    assert short.exit_code == 1
    assert "try --scan 130" in short.output


def test_critical_scan_periodic_passes_with_truncation(run):
    res = run("critical", "-b", "3", "-m", "2", "--scan", "50", "--json")
    record = json.loads(res.output)
    assert res.exit_code == 0
    assert record["payload"]["closed_form"] == "inf" and record["payload"]["truncated"] is True


@pytest.mark.parametrize(
    "args, expected",
    [
        (["-b", "5", "-m", "3", "-N", "3", "-i", "0", "--bound", "800"], "120 245 370 495 745"),
        (["-b", "2", "-m", "2", "-N", "3", "-i", "0", "--bound", "12"], "11"),
        (["-b", "2", "-m", "2", "-N", "1", "-i", "0", "--bound", "8"], "1 5 7"),
    ],
)
def test_occurrences(run, args, expected):
    res = run("occurrences", *args, "--verify")
    assert res.exit_code == 0
    assert res.output.splitlines()[0] == expected
    assert "verify: PASS" in res.output


def test_occurrences_csv_and_union(run):
    res = run("occurrences", "-b", "2", "-m", "2", "-N", "1", "-i", "1", "--bound", "24", "--union", "--csv")
    assert res.output.split() == ["position", "2", "10", "14", "18", "22"]
    verified = run("occurrences", "-b", "2", "-m", "2", "-N", "1", "-i", "1", "--bound", "300", "--union", "--verify")
    assert verified.exit_code == 0


@pytest.mark.parametrize(
    "args",
    [["-b", "5", "-m", "3", "-N", "5"], ["-b", "5", "-m", "3", "-N", "2"], ["-b", "3", "-m", "2", "-N", "1"]],
)
def test_occurrences_inadmissible(run, args):
    assert run("occurrences", *args, "--bound", "100").exit_code == 2


def test_index(run):
    res = run("index", "-b", "5", "-m", "3", "--start", "1", "--factor", "△♦♥", "--rename", "△♦♥", "--horizon", "1000")
    assert res.output.strip() == "10/3 at 120"
    missing = run("index", "-b", "2", "-m", "2", "--factor", "000")
    assert missing.exit_code == 2


@pytest.mark.parametrize(
    "command",
    [
        ["generate", "-b", "2", "-m", "2", "-n", "8", "--json"],
        ["critical", "-b", "5", "-m", "3", "--scan", "200", "--json"],
        ["occurrences", "-b", "5", "-m", "3", "-N", "3", "--bound", "800", "--json"],
        ["index", "-b", "2", "-m", "2", "--factor", "1", "--json"],
        ["verify", "--suite", "overlap", "-b", "2", "-m", "2", "--bound", "500", "--json"],
    ],
)
def test_json_roundtrip_and_determinism(run, command):
    first = run(*command)
    second = run(*command)
    record = json.loads(first.output)
    assert dump_json(record) == first.output.rstrip("\n")
    # timings are the only non-deterministic field
    for rows in (record["payload"].get("results"),):
        for row in rows or []:
            row.pop("seconds")
    again = json.loads(second.output)
    for row in again["payload"].get("results") or []:
        row.pop("seconds")
    assert record == again


def test_out_file(run, tmp_path):
    target = tmp_path / "occ.csv"
    res = run("occurrences", "-b", "5", "-m", "3", "-N", "3", "--bound", "800", "--csv", "--out", str(target))
    assert res.exit_code == 0 and res.output == ""
    assert target.read_text().split() == ["position", "120", "245", "370", "495", "745"]


def test_parse_grid():
    assert parse_grid("b=2..3,m=1..2") == [(2, 1), (2, 2), (3, 1), (3, 2)]
    assert parse_grid("b=5,m=3") == [(5, 3)]
    with pytest.raises(ValueError):
        parse_grid("b=2..3")


def test_verify_digit_sum(run):
    res = run("verify", "--suite", "digit-sum", "--samples", "10000")
    assert res.exit_code == 0
    assert "10000 samples, 0 failures" in res.output


def test_verify_overlap_single_cell(run):
    res = run("verify", "--suite", "overlap", "-b", "3", "-m", "5", "--bound", "10000")
    assert res.exit_code == 0
    assert "no overlap" in res.output and res.output.strip().endswith("PASS")


def test_verify_small_grid_all_suites(run):
    res = run("verify", "--grid", "b=2..4,m=1..4", "--bound", "3000", "--jobs", "2")
    assert res.exit_code == 0, res.output
    assert "FAIL" not in res.output


def test_verify_bad_grid(run):
    assert run("verify", "--grid", "x=1").exit_code == 2


@pytest.mark.slow
def test_verify_default_grid(run):
    res = run("verify", "--grid", "b=2..6,m=1..6", "--bound", "20000")
    assert res.exit_code == 0, res.output
