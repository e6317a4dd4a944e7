import json
from pathlib import Path

import pytest

from deltaguide.cli import (EXIT_CONFIG, EXIT_OK, ConfigError, build_profile,
                            load_config, main)

BASE_CONFIG = """
[geometry]
d1 = 1.0
d2 = 1.0

[transverse]
alpha0 = 0.0
n_max = 60

[profile]
type = "rectwell"
a = 1.0
alpha1 = -1.0

[sweep]
axis = "lambda"
values = [0.04, 0.02, 0.01]

[numerics]
grid_n = 200

[run]
tasks = ["modes", "asymptotics"]
seed = 7
"""


@pytest.fixture()
def config_path(tmp_path):
    p = tmp_path / "run.toml"
    p.write_text(BASE_CONFIG)
    return p


def test_load_config_roundtrip(config_path):
    rc = load_config(config_path)
    assert rc.geometry.d1 == 1.0 and rc.n_max == 60
    assert rc.sweep_axis == "lambda"
    assert rc.tasks == ("modes", "asymptotics")
    assert rc.seed == 7
    prof = build_profile(rc, lam=0.5)
    assert prof.lam == 0.5
    assert prof.integral() == pytest.approx(-1.0)


def test_load_config_rejects_unknown_key(tmp_path):
    p = tmp_path / "bad.toml"
    p.write_text(BASE_CONFIG + "\n[geometry2]\nd1 = 1.0\n")
    with pytest.raises(ConfigError, match="unknown config section"):
        load_config(p)
    p.write_text(BASE_CONFIG.replace("d1 = 1.0", "d1 = 1.0\nbogus = 2.0", 1))
    with pytest.raises(ConfigError, match="unknown key"):
        load_config(p)


def test_load_config_rejects_bad_values(tmp_path):
    p = tmp_path / "bad.toml"
    p.write_text(BASE_CONFIG.replace('axis = "lambda"', 'axis = "zeta"'))
    with pytest.raises(ConfigError, match="sweep axis"):
        load_config(p)
    p.write_text(BASE_CONFIG.replace('type = "rectwell"', 'type = "gauss"'))
    with pytest.raises(ConfigError, match="profile type"):
        load_config(p)
    with pytest.raises(ConfigError, match="cannot read"):
        load_config(tmp_path / "missing.toml")


def test_table_profile(tmp_path):
    table = tmp_path / "prof.txt"
    table.write_text("-1.0 0.0 -2.0\n0.0 1.0 1.0\n")
    cfg = BASE_CONFIG.replace('type = "rectwell"\na = 1.0\nalpha1 = -1.0',
                              f'type = "table"\nfile = "{table}"')
    p = tmp_path / "run.toml"
    p.write_text(cfg)
    prof = build_profile(load_config(p))
    assert prof.integral() == pytest.approx(-1.0)
    # non-contiguous pieces are rejected
    table.write_text("-1.0 0.0 -2.0\n0.5 1.0 1.0\n")
    with pytest.raises(ConfigError, match="contiguous"):
        build_profile(load_config(p))


def test_main_validate_only(config_path, capsys):
    assert main(["run", str(config_path), "--validate-only"]) == EXIT_OK
    assert "config ok" in capsys.readouterr().out


def test_main_bad_config_exit_code(tmp_path, capsys):
    p = tmp_path / "bad.toml"
    p.write_text("this is not toml [")
    assert main(["run", str(p)]) == EXIT_CONFIG
    assert main(["run", str(tmp_path / "missing.toml")]) == EXIT_CONFIG
    # bad --tasks flag
    p2 = tmp_path / "run.toml"
    p2.write_text(BASE_CONFIG)
    assert main(["run", str(p2), "--tasks", "nope"]) == EXIT_CONFIG
    assert main(["run", str(p2), "--seed", "-3", "--validate-only"]) == EXIT_CONFIG


def test_run_modes_task_outputs(config_path, tmp_path):
    out = tmp_path / "out"
    code = main(["run", str(config_path), "--tasks", "modes", "--out", str(out)])
    assert code == EXIT_OK
    csv = (out / "modes.csv").read_text().splitlines()
    assert csv[0] == "n,nu_n,chi0_sq"
    assert len(csv) == 21
    dat = (out / "modes.dat").read_text().splitlines()
    assert dat[0].startswith("#")
    summary = json.loads((out / "summary.json").read_text())
    assert summary["all_checks_passed"] is True
    assert summary["seed"] == 7
    assert summary["checks"]["modes_sorted"] is True


def test_run_asymptotics_checks(config_path, tmp_path):
    out = tmp_path / "out"
    code = main(["run", str(config_path), "--tasks", "asymptotics",
                 "--out", str(out)])
    assert code == EXIT_OK
    summary = json.loads((out / "summary.json").read_text())
    assert summary["checks"]["remainder_slope_ok"] is True
    assert abs(summary["checks"]["remainder_slope"] - 3.0) <= 0.4


def test_run_deterministic_bytes(config_path, tmp_path):
    outs = []
    for name in ("o1", "o2"):
        out = tmp_path / name
        assert main(["run", str(config_path), "--tasks", "modes,asymptotics",
                     "--out", str(out), "--seed", "11"]) == EXIT_OK
        outs.append({f.name: f.read_bytes() for f in sorted(out.iterdir())})
    assert outs[0] == outs[1]


def test_run_spectrum_parallel_matches_serial(tmp_path):
    cfg = BASE_CONFIG.replace('tasks = ["modes", "asymptotics"]',
                              'tasks = ["spectrum"]')
    p = tmp_path / "run.toml"
    p.write_text(cfg)
    res = []
    for name, jobs in (("s1", "1"), ("s2", "2")):
        out = tmp_path / name
        assert main(["run", str(p), "--out", str(out), "--jobs", jobs]) == EXIT_OK
        res.append((out / "spectrum.csv").read_bytes())
    assert res[0] == res[1]
