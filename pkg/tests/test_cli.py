import json

import pytest
from click.testing import CliRunner

from ntpetri.cli import main


@pytest.fixture
def cli(fixtures_dir):
    runner = CliRunner()

    def invoke(*args, input=None):
        args = [str(fixtures_dir / a) if a.endswith(".json") else a for a in args]
        return runner.invoke(main, args, input=input)
    return invoke


def test_check_water(cli):
    r = cli("check", "water.json")
    assert r.exit_code == 1
    assert "states: 2" in r.output
    assert "deadlock states: 1" in r.output and "{H2O:2}" in r.output
    assert "graph cycle: no" in r.output


def test_check_fail_on_none(cli):
    assert cli("check", "water.json", "--fail-on", "none").exit_code == 0


def test_check_truncated(cli):
    r = cli("check", "self_replenishing.json", "--max-states", "50", "--format", "report")
    assert r.exit_code == 1
    doc = json.loads(r.output)
    assert doc["states"] == 50 and doc["status"] == "truncated(max_states)"
    assert doc["failures"] == ["truncation"]


def test_check_empty_marking(cli):
    r = cli("check", "empty_marking.json", "--format", "report")
    assert json.loads(r.output)["states"] == 1
    assert r.exit_code == 1
    assert cli("check", "empty_marking.json", "--fail-on", "truncation").exit_code == 0


def test_check_pipeline_passes(cli):
    r = cli("check", "voice_pipeline.json")
    assert r.exit_code == 0, r.output
    assert "states: 448" in r.output and "result: PASS" in r.output


def test_check_predicates(cli):
    assert cli("check", "water.json", "--fail-on", "none",
               "--predicate", "max-total-tokens=3").exit_code == 0
    r = cli("check", "water.json", "--fail-on", "none", "--predicate", "max-place-tokens=1")
    assert r.exit_code == 1 and "violating" in r.output
    assert cli("check", "water.json", "--predicate", "bogus=1").exit_code == 2


def test_check_report_is_byte_stable(cli):
    a = cli("check", "voice_pipeline.json", "--format", "report").output
    b = cli("check", "voice_pipeline.json", "--format", "report").output
    assert a == b


def test_check_reads_stdin(cli, fixtures_dir):
    text = (fixtures_dir / "water.json").read_text(encoding="utf-8")
    r = cli("check", "-", "--fail-on", "none", input=text)
    assert r.exit_code == 0 and "states: 2" in r.output


@pytest.mark.parametrize("text", ["", "{", '{"version": "9"}'])
def test_bad_input_exits_2(cli, text):
    r = cli("check", "-", input=text)
    assert r.exit_code == 2


def test_missing_file_exits_2(cli):
    assert cli("check", "/nonexistent/net.json").exit_code == 2


def test_partition(cli):
    assert cli("partition", "shared_input.json").output == "cluster 0: T0 T1\n"
    assert cli("partition", "water.json").output == "cluster 0: T0\n"
    assert cli("partition", "disjoint.json").output == "cluster 0: T0\ncluster 1: T1\n"


def test_run_water(cli):
    r = cli("run", "water.json", "--seed", "0")
    assert r.exit_code == 0
    assert "firings: 1" in r.output and "conformance: conformant" in r.output


def test_run_quiescent(cli):
    r = cli("run", "empty_marking.json")
    assert r.exit_code == 0 and "firings: 0" in r.output


def test_run_pipeline(cli):
    r = cli("run", "voice_pipeline.json", "--firings", "100", "--format", "report")
    assert r.exit_code == 0
    doc = json.loads(r.output)
    assert doc["firings"] == 100 and doc["conformance"] == "conformant"


def test_run_unbounded_is_unverified(cli):
    r = cli("run", "self_replenishing.json", "--firings", "10", "--max-states", "5")
    assert r.exit_code == 1 and "unverified" in r.output


def test_export(cli):
    r = cli("export", "water.json")
    assert r.exit_code == 0 and r.output.startswith("digraph net {")
    r = cli("export", "water.json", "--target", "graph")
    assert r.output.count("shape=ellipse") == 2
    r = cli("export", "shared_input.json", "--target", "clustered-net")
    assert r.output.count("subgraph cluster_") == 1
