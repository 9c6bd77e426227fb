"""Tests for the ks-lab command line."""

import json

import pytest
import yaml

from chemotaxis_lab.cli import DEFAULT_PRESETS, SUBCOMMAND_KINDS, build_parser, main
from chemotaxis_lab.models.presets import EXPERIMENT_PRESETS


@pytest.fixture
def evolve_file(tiny_evolve_config, tmp_path):
    path = tmp_path / "evolve.yaml"
    path.write_text(yaml.safe_dump(tiny_evolve_config.model_dump(mode="json")))
    return path


def test_passing_run_exits_zero(evolve_file, tmp_path, capsys):
    args = ["evolve", "--config", str(evolve_file), "--out", str(tmp_path / "runs"), "--quiet"]
    code = main(args)
    assert code == 0
    assert "PASS tiny-evolve" in capsys.readouterr().out
    assert (tmp_path / "runs" / "tiny-evolve" / "report.json").exists()


def test_seed_override(evolve_file, tmp_path):
    main(["evolve", "--config", str(evolve_file), "--out", str(tmp_path), "--seed", "42", "-q"])
    report = json.loads((tmp_path / "tiny-evolve" / "report.json").read_text())
    assert report["seed"] == 42


def test_kind_must_match_the_subcommand(evolve_file, tmp_path, capsys):
    code = main(["picard", "--config", str(evolve_file), "--out", str(tmp_path), "--quiet"])
    assert code == 2
    assert "does not belong to 'picard'" in capsys.readouterr().err


def test_invalid_config_exits_two(tmp_path, capsys):
    path = tmp_path / "bad.yaml"
    path.write_text("name: bad\nkind: growth\nA: 0.5\n")
    assert main(["growth", "--config", str(path), "--out", str(tmp_path), "--quiet"]) == 2
    assert "A > 1" in capsys.readouterr().err


def test_missing_config_file_exits_two(tmp_path, capsys):
    assert main(["evolve", "--config", str(tmp_path / "absent.yaml"), "--quiet"]) == 2
    assert "error:" in capsys.readouterr().err


def test_failing_experiment_exits_one(tmp_path, capsys):
    path = tmp_path / "sweep.yaml"
    path.write_text(
        "name: sweep-short\n"
        "kind: delta_sweep\n"
        "A: 4.0\n"
        "grid: {points: 128, resonant_modes: 8}\n"
        "initial: {kind: packet, width: 5.0}\n"
        "solver: {horizon: 0.5}\n"
        "sweep: {deltas: [1.0e-3, 1.0e-4, 1.0e-5], target: 1.0e-2}\n"
    )
    assert main(["delta-sweep", "--config", str(path), "--out", str(tmp_path), "--quiet"]) == 1
    assert "FAIL sweep-short" in capsys.readouterr().out


def test_subcommand_is_required():
    with pytest.raises(SystemExit):
        build_parser().parse_args([])


def test_default_presets_match_their_subcommands():
    for command, names in DEFAULT_PRESETS.items():
        for name in names:
            assert EXPERIMENT_PRESETS[name].kind in SUBCOMMAND_KINDS[command]
