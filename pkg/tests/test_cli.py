import json

import pytest

from rydress.cli import EXIT_INVALID, EXIT_OK, main, run, validate, verify_manifest, ConfigError


def _read(path):
    return path.read_bytes()


def test_schema_rejects_unknown_keys():
    with pytest.raises(ConfigError) as info:
        validate({"subcommand": "forces", "forcez": {}})
    assert info.value.details[0]["message"]


def test_invalid_config_exit_code(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"subcommand": "gate", "tol": -1}))
    assert main(["gate", "--config", str(cfg), "--out", str(tmp_path / "o")]) == EXIT_INVALID
    err = json.loads(capsys.readouterr().err)
    assert err["error"] == "invalid-config" and err["details"][0]["path"] == "tol"


def test_subcommand_mismatch(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"subcommand": "gate"}))
    assert main(["forces", "--config", str(cfg), "--out", str(tmp_path)]) == EXIT_INVALID


def test_empty_grid_writes_header_and_manifest(tmp_path):
    cfg = {"subcommand": "forces", "forces": {"r_over_rb": {"start": 0.1, "stop": 1, "num": 0}}}
    assert run(cfg, tmp_path) == EXIT_OK
    assert (tmp_path / "forces.csv").read_text().count("\n") == 1
    m = json.loads((tmp_path / "manifest.json").read_text())
    assert m["status"] == "ok" and m["config"] == cfg and verify_manifest(tmp_path)


def test_outputs_are_byte_identical(tmp_path):
    cfg = {"subcommand": "spectrum",
           "spectrum": {"ratios": [0.1, 10.0],
                        "delta_over_omega": {"start": -2, "stop": 1, "num": 31}}}
    a, b = tmp_path / "a", tmp_path / "b"
    assert run(cfg, a) == EXIT_OK and run(cfg, b) == EXIT_OK
    for name in ("spectrum_energies.csv", "spectrum_populations.csv", "spectrum.png",
                 "manifest.json"):
        assert _read(a / name) == _read(b / name)


def test_gate_preset(tmp_path):
    assert run({"subcommand": "gate", "ramp": {"preset": "strong-blockade"}}, tmp_path) == 0
    rep = json.loads((tmp_path / "gate_report.json").read_text())
    assert rep["fidelity"] >= 0.999


def test_sweep_resume_is_idempotent(tmp_path):
    cfg = {"subcommand": "sweep", "plots": False,
           "sweep": {"kind": "landscape", "gamma_a_ratios": [1.0], "powers": [1e3, 1e4],
                     "budget": 6}}
    assert run(cfg, tmp_path) == EXIT_OK
    before = _read(tmp_path / "landscape.csv")
    assert run(cfg, tmp_path, resume=True) == EXIT_OK
    assert _read(tmp_path / "landscape.csv") == before
    assert verify_manifest(tmp_path)


def test_schema_subcommand(capsys):
    assert main(["schema"]) == EXIT_OK
    assert json.loads(capsys.readouterr().out)["additionalProperties"] is False
