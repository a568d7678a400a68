import json

import pandas as pd
import pytest

from afxy.cli import main
from afxy.data import AtomicMeasure, Disk, Rectangle, SpinField
from afxy.energy import ground_state
from afxy.recovery import build_recovery

SQUARE = Rectangle((0.0, 0.0), (1.0, 1.0))
SQUARE_JSON = json.dumps(SQUARE.to_dict())


@pytest.fixture
def ground_file(tmp_path):
    path = tmp_path / "ground.json"
    ground_state(SQUARE, 0.1).to_json(path)
    return str(path)


@pytest.fixture
def dipole_file(tmp_path):
    path = tmp_path / "dipole.json"
    mu = AtomicMeasure([((0.3, 0.5), 1), ((0.7, 0.5), -1)])
    build_recovery(mu, 1.0 / 16.0, SQUARE).to_json(path)
    return str(path)


def test_energy(ground_file, capsys):
    assert main(["energy", "--field", ground_file, "--region", SQUARE_JSON]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["energy_afxy"] == pytest.approx(0.0, abs=1e-20)
    assert out["vorticity_mass"] == 0
    assert out["chirality"]["min"] == pytest.approx(1.0)


def test_bad_region(ground_file, capsys):
    assert main(["energy", "--field", ground_file, "--region", '{"kind": "hexagon"}']) == 2
    error = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
    assert error["error"] == "PreconditionError"


def test_missing_file(tmp_path, capsys):
    code = main(["energy", "--field", str(tmp_path / "nowhere.json"), "--region", SQUARE_JSON])
    assert code == 2
    assert "error" in json.loads(capsys.readouterr().err.strip().splitlines()[-1])


def test_missing_command():
    with pytest.raises(SystemExit):
        main([])


def test_vortex_scaling(tmp_path, capsys):
    out = tmp_path / "vortex.csv"
    code = main([
        "vortex-scaling", "--measure", '[{"x": 0.5, "y": 0.5, "charge": 1}]',
        "--domain", SQUARE_JSON, "--eps", "2^-3..2^-5", "--out", str(out),
    ])
    assert code == 0
    table = pd.read_csv(out)
    assert list(table.columns) == ["eps", "energy_per_eps2", "energy_per_eps2_log", "flat_norm", "mass"]
    assert len(table) == 3
    summary = json.loads(capsys.readouterr().out)
    assert "slope" in summary and "check" in summary


def test_strict_failure(tmp_path, capsys):
    # a fixed split keeps the recovery measure a quarter away from 2 delta
    code = main([
        "vortex-scaling", "--measure", '[{"x": 0.5, "y": 0.5, "charge": 2}]', "--split", "4",
        "--domain", SQUARE_JSON, "--eps", "2^-5..2^-7", "--strict",
    ])
    assert code == 1
    assert json.loads(capsys.readouterr().err.strip().splitlines()[-1])["error"] == "InvariantViolationError"


def test_bulk_scaling_prints_rows(capsys):
    assert main(["bulk-scaling", "--phase", "linear", "--domain", SQUARE_JSON, "--eps", "0.25,0.125"]) == 0
    summary = json.loads(capsys.readouterr().out)
    assert len(summary["rows"]) == 2
    assert summary["check"] is None


def test_ball_trace(dipole_file, tmp_path):
    out = tmp_path / "trace.json"
    code = main(["ball-trace", "--field", dipole_file, "--sigma", "0.05", "--times", "0,1,4", "--out", str(out)])
    assert code == 0
    document = json.loads(out.read_text())
    assert document["report"]["ok"]
    assert [family["t"] for family in document["trace"]] == [0.0, 1.0, 4.0]
    assert sum(atom["charge"] for atom in document["measure"]) == 0


def test_ball_trace_without_vortices(ground_file, tmp_path):
    out = tmp_path / "trace.json"
    assert main(["ball-trace", "--field", ground_file, "--sigma", "0.1", "--times", "1", "--out", str(out)]) == 2


def test_annihilate_ground_state(ground_file, tmp_path, capsys):
    out = tmp_path / "clean.json"
    assert main(["annihilate", "--field", ground_file, "--out", str(out)]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["vortices_before"] == report["vortices_after"] == 0
    assert SpinField.from_json(out) == SpinField.from_json(ground_file)


def test_selftest(capsys):
    assert main(["--workers", "2", "selftest"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["ok"]
    assert {check["name"] for check in report["checks"]} == {
        "energy_identity", "vorticity", "flat_norm", "ball_construction", "stokes_jacobian",
        "extension", "annulus_bound", "bulk_scaling", "vortex_scaling",
    }


def test_annihilate_defaults_to_the_covered_triangles(tmp_path, capsys):
    field = tmp_path / "disk.json"
    mu = AtomicMeasure([((0.3, 0.5), 1), ((0.7, 0.5), -1)])
    build_recovery(mu, 1.0 / 16.0, Disk((0.5, 0.5), 0.45)).to_json(field)
    out = tmp_path / "clean.json"
    assert main(["annihilate", "--field", str(field), "--out", str(out)]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["vortices_before"] == 2
    assert report["vortices_after"] <= report["vortices_before"]
    assert report["extended"] + len(report["failures"]) <= report["balls"]
    assert SpinField.from_json(out).eps == pytest.approx(1.0 / 16.0)
