import json
import math

import numpy as np
import pytest
from click.testing import CliRunner

from paritymzi import states
from paritymzi.cli import cli, main
from paritymzi.states import Stage, TwoModeState
from paritymzi.su2 import SectorState


@pytest.fixture
def runner():
    return CliRunner()


def rows(csv_text):
    lines = csv_text.strip().splitlines()
    assert lines[0] == "phi,parity,delta_phi,qcrb"
    return [[float(x) for x in line.split(",")] for line in lines[1:]]


def test_scan_noon_csv_minimum(runner):
    res = runner.invoke(cli, ["scan", "--state", "noon:3", "--phi", "0:6.2832:721", "--format", "csv"])
    assert res.exit_code == 0, res.output
    data = rows(res.output)
    assert len(data) == 721
    best = min(r[2] for r in data if not math.isnan(r[2]))
    assert best == pytest.approx(1 / 3, rel=1e-6)


def test_scan_json(runner):
    res = runner.invoke(cli, ["scan", "--state", "tmsv:r=0.3", "--phi", "0:3:4", "--format", "json"])
    assert res.exit_code == 0, res.output
    doc = json.loads(res.output)
    assert len(doc["points"]) == 4
    assert doc["qcrb"] == pytest.approx(1 / math.sinh(0.6))


def test_qcrb_command(runner):
    res = runner.invoke(cli, ["qcrb", "--state", "noon:4"])
    assert res.exit_code == 0
    assert float(res.output) == pytest.approx(0.25)


def test_check_symmetry_on_perturbed_noon(runner, tmp_path):
    c = np.array([1, 0, 0, 1.1]) / math.sqrt(2.21)
    path = tmp_path / "s.json"
    states.save_state(TwoModeState((SectorState(3, c),), Stage.INTERNAL), path)
    res = runner.invoke(cli, ["check-symmetry", "--state-file", str(path)])
    assert res.exit_code == 0, res.output
    assert json.loads(res.output)["is_path_symmetric"] is False


def test_bias_command(runner, tmp_path):
    out = tmp_path / "bias.json"
    res = runner.invoke(cli, ["bias", "--state", "twin_fock:2", "-o", str(out)])
    assert res.exit_code == 0, res.output
    doc = json.loads(out.read_text())
    assert doc["claim1_at_sweet_spot"] is True
    assert doc["delta_phi_at_sweet_spot"] == pytest.approx(doc["qcrb"], rel=1e-9)


def test_verify_passes(runner):
    res = runner.invoke(cli, ["verify", "--max-n", "8"])
    assert res.exit_code == 0, res.output
    assert "FAIL" not in res.output
    assert res.output.rstrip().endswith("checks passed")


def test_verify_is_deterministic(runner):
    a = runner.invoke(cli, ["verify", "--max-n", "3"]).output
    b = runner.invoke(cli, ["verify", "--max-n", "3"]).output
    assert a == b


def test_output_dir_from_environment(runner, tmp_path):
    res = runner.invoke(cli, ["check-symmetry", "--state", "noon:2"], env={"PARITYMZI_OUTPUT_DIR": str(tmp_path)})
    assert res.exit_code == 0
    assert json.loads((tmp_path / "check-symmetry.json").read_text())["is_path_symmetric"] is True


@pytest.mark.parametrize(
    "args, needle",
    [
        (["scan", "--state", "bogus:1"], "state_factory"),
        (["scan", "--state", "noon:3", "--phi", "1:0:5"], "MIN"),
        (["scan", "--state", "noon:3", "--phi", "0:1:0"], "POINTS"),
        (["scan", "--state", "noon:3", "--phi", "nonsense"], "MIN:MAX:POINTS"),
        (["qcrb"], "exactly one"),
        (["qcrb", "--state-file", "/nonexistent/s.json"], "not found"),
        (["qcrb", "--state", "tmsv:r=0.5,max_n=4"], "max_total_n"),
        (["bias", "--state", "vacuum"], "metrology"),
    ],
)
def test_usage_errors_exit_two(runner, args, needle):
    res = runner.invoke(cli, args)
    assert res.exit_code == 2
    assert needle in res.output


def test_malformed_state_file(runner, tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    res = runner.invoke(cli, ["qcrb", "--state-file", str(path)])
    assert res.exit_code == 2
    assert "not valid JSON" in res.output


def test_unwritable_output(runner, tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("")
    res = runner.invoke(cli, ["check-symmetry", "--state", "noon:2", "-o", str(blocker / "x.json")])
    assert res.exit_code == 2


def test_state_file_round_trip_is_byte_identical(runner, tmp_path):
    first = tmp_path / "a.json"
    second = tmp_path / "b.json"
    states.save_state(states.two_mode_squeezed_vacuum(0.3, max_total_n=40), first)
    states.save_state(states.load_state(first), second)
    assert first.read_bytes() == second.read_bytes()

    direct = runner.invoke(cli, ["scan", "--state", "tmsv:r=0.3,max_n=40", "--phi", "0:6:61"]).output
    via_a = runner.invoke(cli, ["scan", "--state-file", str(first), "--phi", "0:6:61"]).output
    via_b = runner.invoke(cli, ["scan", "--state-file", str(second), "--phi", "0:6:61"]).output
    assert direct == via_a == via_b


def test_main_returns_exit_code():
    assert main(["qcrb", "--state", "noon:2"]) == 0
    assert main(["qcrb", "--state", "nope"]) == 2
