import copy
import json

import pytest

from fracrd.cli_runner import (
    SUITES,
    load_config,
    main,
    run_scenario,
    run_verify,
    sweep,
    validate_config,
)
from fracrd.errors import ConfigInvalid, EmptyValues, UnknownAxis

DEMO = {
    "schema_version": 1,
    "grid": {"dims": 1, "extent": 40.0, "points": 64},
    "model": "bimolecular",
    "diffusivities": [1.0, 0.7, 1.3, 0.9],
    "initial_data": [
        {"profile": "gaussian-bump", "amplitude": 1.0, "width": 2.0, "floor": 0.05},
        {"profile": "gaussian-bump", "amplitude": 0.3, "width": 2.0, "floor": 0.05},
        {"profile": "two-bumps", "amplitude": 0.8, "width": 2.0, "floor": 0.05},
        {"profile": "constant", "amplitude": 0.2},
    ],
    "solver": {"dt": 0.05, "horizon": 1.0, "alpha": 0.5, "store_every": 2},
    "reports": {
        "norm_p": [2, "inf"],
        "weak_p": 2,
        "sv": {"ell": [2, 3], "alpha": [0.5], "fields": 5},
        "gn": {"q": 4.0, "alpha": 0.5, "fields": 5},
        "ladder": {"rho": 1.0, "p0": 2.0},
        "holder_gamma": [0.5],
    },
    "seed": 0,
}


def _demo():
    return copy.deepcopy(DEMO)


def test_validate_accepts_demo():
    validate_config(_demo())


def test_validate_collects_field_messages():
    cfg = _demo()
    cfg["grid"]["points"] = 10
    cfg["model"] = "nope"
    cfg["solver"]["dt"] = -1
    with pytest.raises(ConfigInvalid) as exc:
        validate_config(cfg)
    msgs = exc.value.messages
    assert any("grid.points" in m for m in msgs)
    assert any(m.startswith("model:") for m in msgs)
    assert any("solver.dt" in m for m in msgs)


def test_validate_rejects_inadmissible_rho_before_compute():
    cfg = _demo()
    cfg["reports"]["ladder"]["rho"] = 2.5
    with pytest.raises(ConfigInvalid) as exc:
        validate_config(cfg)
    assert any("rho" in m for m in exc.value.messages)


def test_run_scenario_manifest(tmp_path):
    man = run_scenario(_demo(), outdir=str(tmp_path / "run"))
    assert man["passed"] and not man["violations"]
    for name, digest in man["files"].items():
        assert (tmp_path / "run" / name).exists()
        assert len(digest) == 64
    assert (tmp_path / "run" / "manifest.json").exists()


def test_run_determinism(tmp_path):
    m1 = run_scenario(_demo(), outdir=str(tmp_path / "a"))
    m2 = run_scenario(_demo(), outdir=str(tmp_path / "b"))
    assert m1["files"] == m2["files"]
    for name in m1["files"]:
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_seed_changes_reports(tmp_path):
    cfg = _demo()
    cfg["seed"] = 1
    m1 = run_scenario(_demo(), outdir=str(tmp_path / "a"))
    m2 = run_scenario(cfg, outdir=str(tmp_path / "b"))
    assert m1["files"]["sv.csv"] != m2["files"]["sv.csv"]


def test_sweep(tmp_path):
    cfg = _demo()
    cfg["reports"] = {"norm_p": [2]}
    rows = sweep(cfg, "alpha", [0.5, 0.75], outdir=str(tmp_path / "sw"))
    assert [r[0] for r in rows] == [0.5, 0.75]
    assert all(r[1] for r in rows)
    assert (tmp_path / "sw" / "sweep.csv").exists()


def test_sweep_guards(tmp_path):
    with pytest.raises(UnknownAxis):
        sweep(_demo(), "bogus", [1.0], outdir=str(tmp_path))
    with pytest.raises(EmptyValues):
        sweep(_demo(), "alpha", [], outdir=str(tmp_path))


def test_verify_suites_and_determinism(tmp_path):
    names = sorted(SUITES)
    m1 = run_verify(names, outdir=str(tmp_path / "v1"), seed=0)
    m2 = run_verify(names, outdir=str(tmp_path / "v2"), seed=0)
    assert m1["passed"] and m2["passed"]
    assert m1["files"] == m2["files"]


def test_main_exit_codes(tmp_path):
    cfg_path = tmp_path / "demo.json"
    cfg_path.write_text(json.dumps(_demo()))
    assert main(["run", str(cfg_path), "--out", str(tmp_path / "r")]) == 0
    bad = _demo()
    bad["model"] = "nope"
    bad_path = tmp_path / "bad.json"
    bad_path.write_text(json.dumps(bad))
    assert main(["run", str(bad_path), "--out", str(tmp_path / "r2")]) == 1
    assert main(["verify", "ladder", "--out", str(tmp_path / "v")]) == 0


def test_output_root_env(tmp_path, monkeypatch):
    monkeypatch.setenv("FRACRD_OUTPUT_ROOT", str(tmp_path))
    man = run_scenario(_demo())
    assert man["output_dir"].startswith(str(tmp_path))


def test_load_config_roundtrip(tmp_path):
    p = tmp_path / "c.json"
    p.write_text(json.dumps(_demo()))
    assert load_config(p) == _demo()
