"""Command-line behavior: presets, exit codes, manifests, reproducibility."""

import json
import os

import pytest

from anneal_lab import ConfigError, list_presets, preset_config, validate_config
from anneal_lab.cli import main
from anneal_lab.config import load_config
from anneal_lab.io import OUT_DIR_ENV

SPECTRUM_CFG = {
    "instance": {"sizes": [2, 3], "delta_w": 0.01, "jzz_raw": 5.33},
    "catalyst": {"sub_graph": 1, "jxx": 1.92},
    "study": {"kind": "spectrum"},
    "numerics": {"s_points": 101},
}


def _write_cfg(tmp_path, cfg, name="cfg.json"):
    path = tmp_path / name
    path.write_text(json.dumps(cfg))
    return str(path)


def test_list_presets(capsys):
    assert main(["list-presets"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out == list(list_presets())
    assert "sgs5" in out and "diabatic-1000" in out


def test_preset_configs_validate():
    for name in list_presets():
        cfg = preset_config(name)
        # canonical form is a fixed point of validation
        assert validate_config(cfg.to_dict()).to_dict() == cfg.to_dict()
    with pytest.raises(ConfigError):
        preset_config("nope")


def test_config_validation_errors():
    with pytest.raises(ConfigError):
        validate_config({"study": {"kind": "spectrum"}})  # no instance
    with pytest.raises(ConfigError):
        validate_config({"instance": {"sizes": [2, 3], "delta_w": 0.01,
                                      "jzz_raw": 5.33}})  # no study
    with pytest.raises(ConfigError):
        validate_config({
            "instance": {"sizes": [2, 3], "delta_w": 0.01, "jzz_raw": 5.33,
                         "calibrate": {"target_sx": 0.9}},
            "study": {"kind": "spectrum"},
        })  # both penalty forms
    with pytest.raises(ConfigError):
        validate_config({
            "instance": {"sizes": [2, 3], "delta_w": 0.01, "jzz_raw": 5.33},
            "study": {"kind": "spectrum"},
            "rng": {},
        })  # unknown block
    with pytest.raises(ConfigError):
        validate_config({
            "instance": {"sizes": [2, 3], "delta_w": 0.01, "jzz_raw": 5.33},
            "catalyst": {"jxx": 1.0, "jxx_grid": [0, 1, 0.1]},
            "study": {"kind": "spectrum"},
        })


def test_run_spectrum_outputs(tmp_path):
    cfg = _write_cfg(tmp_path, SPECTRUM_CFG)
    out = tmp_path / "out"
    assert main(["run", cfg, "--out", str(out)]) == 0
    names = sorted(os.listdir(out))
    assert names == ["features.json", "manifest.json", "spectrum.csv"]
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["tool"] == "anneal-lab"
    assert manifest["outputs"] == ["features.json", "spectrum.csv"]
    feats = json.loads((out / "features.json").read_text())
    kinds = {f["kind"] for f in feats["features"]}
    assert "primary_crossing" in kinds
    assert feats["sign_change"]["component"] == "E0"


def test_manifest_reproduces_run(tmp_path):
    """Feeding the manifest back as the config reproduces the files exactly."""
    cfg = _write_cfg(tmp_path, SPECTRUM_CFG)
    out1 = tmp_path / "a"
    out2 = tmp_path / "b"
    assert main(["run", cfg, "--out", str(out1)]) == 0
    assert main(["run", str(out1 / "manifest.json"), "--out", str(out2)]) == 0
    for name in ("spectrum.csv", "features.json", "manifest.json"):
        assert (out1 / name).read_bytes() == (out2 / name).read_bytes()


def test_usage_errors(tmp_path, capsys):
    assert main(["run"]) == 1  # neither config nor preset
    cfg = _write_cfg(tmp_path, SPECTRUM_CFG)
    assert main(["run", cfg, "--preset", "sgs5"]) == 1  # both
    assert main(["run", str(tmp_path / "missing.json")]) == 1
    bad = _write_cfg(tmp_path, {"instance": {}, "study": {"kind": "spectrum"}},
                     "bad.json")
    assert main(["run", bad]) == 1
    capsys.readouterr()


def test_numeric_failure_writes_diagnostics(tmp_path, capsys):
    # an unreachable calibration target fails inside the study, not validation
    cfg = _write_cfg(tmp_path, {
        "instance": {"sizes": [2, 3], "delta_w": 0.01,
                     "calibrate": {"target_sx": 0.2}},
        "study": {"kind": "spectrum"},
    })
    out = tmp_path / "out"
    assert main(["run", cfg, "--out", str(out)]) == 2
    diag = json.loads((out / "diagnostics.json").read_text())
    assert diag["error"] == "SweepError"
    assert "config" in diag
    capsys.readouterr()


def test_out_dir_precedence(tmp_path, monkeypatch):
    cfg_dict = dict(SPECTRUM_CFG)
    cfg_dict["output"] = {"directory": str(tmp_path / "from_config")}
    cfg = _write_cfg(tmp_path, cfg_dict)

    env_dir = tmp_path / "from_env"
    monkeypatch.setenv(OUT_DIR_ENV, str(env_dir))
    flag_dir = tmp_path / "from_flag"
    assert main(["run", cfg, "--out", str(flag_dir)]) == 0
    assert (flag_dir / "manifest.json").exists()

    assert main(["run", cfg]) == 0
    assert (env_dir / "manifest.json").exists()

    monkeypatch.delenv(OUT_DIR_ENV)
    assert main(["run", cfg]) == 0
    assert (tmp_path / "from_config" / "manifest.json").exists()


def test_manifest_embeds_canonical_config(tmp_path):
    cfg = _write_cfg(tmp_path, SPECTRUM_CFG)
    out = tmp_path / "out"
    assert main(["run", cfg, "--out", str(out)]) == 0
    manifest = json.loads((out / "manifest.json").read_text())
    reloaded = load_config(str(out / "manifest.json"))
    assert reloaded.to_dict() == manifest["config"]
    assert manifest["config"]["numerics"]["s_points"] == 101
