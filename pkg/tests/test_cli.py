"""Command-line interface: exit codes, output layout, reproducibility."""

import json

import numpy as np
import pytest

from lpflow import Grid, write_field
from lpflow.cli import main
from lpflow.corpus import divfree_sample, scalar_sample


@pytest.fixture()
def scalar_file(tmp_path):
    path = tmp_path / "f.lpf"
    write_field(scalar_sample(Grid(64, 2), 5), path)
    return path


@pytest.fixture()
def vector_file(tmp_path):
    path = tmp_path / "u.lpf"
    write_field(divfree_sample(Grid(64, 2), 7), path)
    return path


def test_norm_command(scalar_file, capsys):
    assert main(["norm", str(scalar_file), "--s", "3", "--p", "1", "--q", "1"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["spec"] == "F3_1_1"
    assert out["value"] == pytest.approx(15728.850184666224, rel=1e-12)


def test_norm_besov_flavor(scalar_file, capsys):
    assert main(["norm", str(scalar_file), "--flavor", "besov",
                 "--s", "2", "--p", "2", "--q", "2"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["spec"].startswith("B")


def test_norm_missing_file(tmp_path, capsys):
    assert main(["norm", str(tmp_path / "nope.lpf")]) == 2


def test_decompose_layout(scalar_file, tmp_path, capsys):
    out = tmp_path / "dec"
    assert main(["decompose", str(scalar_file), "--out", str(out)]) == 0
    manifest = json.loads((out / "report.json").read_text())
    assert manifest["j_max"] == 7
    assert len(manifest["files"]) == 9          # low + 8 annular blocks
    for name in manifest["files"]:
        assert (out / name).exists()


def test_decompose_rejects_vector(vector_file, tmp_path):
    assert main(["decompose", str(vector_file), "--out", str(tmp_path / "x")]) == 2


def test_verify_moser(capsys):
    assert main(["verify", "moser", "--count", "3"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["pass"] is True
    assert out["max"] <= out["bound"]


def test_verify_lifting(capsys):
    assert main(["verify", "lifting", "--count", "3"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert abs(out["pure_mode_ratio"] - 1.0) <= 1e-12


def test_verify_unknown_suite():
    with pytest.raises(SystemExit) as exc:
        main(["verify", "sharpness"])
    assert exc.value.code == 2


def test_solve_writes_manifest_and_snapshots(tmp_path, capsys):
    cfgf = tmp_path / "cfg.json"
    cfgf.write_text(json.dumps({
        "grid": {"n": 64, "dim": 2},
        "norm": {"s": 3, "p": 1, "q": 1},
        "solver": {"T": 0.02, "dt": 0.001},
        "initial": {"kind": "taylor-green"},
    }))
    out = tmp_path / "run"
    assert main(["solve", "--config", str(cfgf), "--out", str(out)]) == 0
    manifest = json.loads((out / "report.json").read_text())
    assert manifest["times"][0] == 0.0 and manifest["times"][-1] == 0.02
    for name in manifest["files"]:
        assert (out / name).exists()
    assert (out / "tables" / "diagnostics.csv").exists()
    assert (out / "plots" / "energy.svg").exists()
    row = manifest["diagnostics"][0]
    assert row["energy"] == pytest.approx(4.442882938158366, rel=1e-12)


def test_solve_determinism(tmp_path, capsys):
    cfgf = tmp_path / "cfg.json"
    cfgf.write_text(json.dumps({
        "solver": {"T": 0.01, "dt": 0.001},
        "initial": {"kind": "random", "seed": 3, "band": [1, 6]},
    }))
    outs = []
    for name in ("a", "b"):
        out = tmp_path / name
        assert main(["solve", "--config", str(cfgf), "--out", str(out)]) == 0
        outs.append((out / "report.json").read_bytes())
    assert outs[0] == outs[1]


def test_iterate_manifest(tmp_path, capsys):
    cfgf = tmp_path / "cfg.json"
    cfgf.write_text(json.dumps({
        "norm": {"s": 3, "p": 2, "q": 2},
        "solver": {"T": 0.02, "dt": 0.002},
        "initial": {"kind": "random", "seed": 11, "band": [1, 4], "amplitude": 0.5},
        "experiment": {"members": 4},
    }))
    out = tmp_path / "ladder"
    assert main(["iterate", "--config", str(cfgf), "--out", str(out)]) == 0
    man = json.loads((out / "report.json").read_text())
    assert man["M"] == 4
    assert len(man["delta"]) == 4
    assert len(man["member_files"]) == 5        # includes the zero member
    assert (out / "tables" / "cauchy.json").exists()
    assert (out / "plots" / "decay.svg").exists()


def test_bona_smith_command(tmp_path, capsys):
    cfgf = tmp_path / "cfg.json"
    cfgf.write_text(json.dumps({
        "solver": {"T": 0.05, "dt": 0.001},
        "experiment": {"N_list": [3, 4], "eps_list": [0.1, 0.01], "seed": 0},
    }))
    out = tmp_path / "bs"
    assert main(["bona-smith", "--config", str(cfgf), "--out", str(out)]) == 0
    rep = json.loads((out / "report.json").read_text())
    assert rep["estimate_id"] == "mollified_data_continuity"
    assert rep["pass"] is True
    assert (out / "tables" / "ratios.csv").exists()


def test_continuity_command(tmp_path, capsys):
    cfgf = tmp_path / "cfg.json"
    cfgf.write_text(json.dumps({
        "solver": {"T": 0.05, "dt": 0.001},
        "experiment": {"N_list": [3, 4], "eps_list": [0.1, 0.01], "seed": 0},
    }))
    out = tmp_path / "cont"
    assert main(["continuity", "--config", str(cfgf), "--out", str(out)]) == 0
    rep = json.loads((out / "report.json").read_text())
    assert rep["pass"] is True
    pieces = dict(rep["tables"]["pieces"])
    assert pieces["direct"] <= 1.05 * pieces["chain"]


def test_bad_config_json(tmp_path):
    cfgf = tmp_path / "broken.json"
    cfgf.write_text("{not json")
    assert main(["solve", "--config", str(cfgf)]) == 2


def test_unknown_initial_kind(tmp_path):
    cfgf = tmp_path / "cfg.json"
    cfgf.write_text(json.dumps({"initial": {"kind": "vortex-sheet"},
                                "solver": {"T": 0.01, "dt": 0.001}}))
    assert main(["solve", "--config", str(cfgf), "--out", str(tmp_path / "o")]) == 2
