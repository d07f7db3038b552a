import os

import pytest

from isacsim import cli
from isacsim.config import ConfigError, build_config, load_config


def run(args):
    return cli.main(args)


def read(path):
    with open(path, "rb") as fh:
        return fh.read()


# ---------------------------------------------------------------------------
# config loading
# ---------------------------------------------------------------------------

def test_default_config_matches_builtin():
    cfg = load_config(None)
    assert cfg.M == 4 and cfg.N == 4 and cfg.L == 30
    assert cfg.kappa == 0.5 and cfg.mu == 0.5
    assert cfg.pairs[0].alpha_near == 0.2
    assert cfg.eigenvalues == (1.0, 0.1, 0.05, 0.01)


def test_config_error_names_key():
    with pytest.raises(ConfigError, match="system.M"):
        build_config({"system": {"M": "four"}})
    with pytest.raises(ConfigError, match="unknown section 'sys'"):
        build_config({"sys": {}})
    with pytest.raises(ConfigError, match=r"pairs\[0\].alpha_far"):
        build_config({"pairs": [{"alpha_near": 0.2}]})
    with pytest.raises(ConfigError, match="unknown key 'run.seeds'"):
        build_config({"run": {"seeds": 1}})


def test_config_file_roundtrip(tmp_path):
    path = tmp_path / "cfg.yaml"
    path.write_text(
        "power: {p_db: 30.0}\nrun: {trials: 123, seed: 9}\n"
    )
    cfg = load_config(str(path))
    assert cfg.p_db == 30.0 and cfg.trials == 123 and cfg.seed == 9
    # untouched sections keep defaults
    assert cfg.M == 4


# ---------------------------------------------------------------------------
# exit codes
# ---------------------------------------------------------------------------

def test_zero_trials_is_config_error(tmp_path, capsys):
    code = run(["dl-rates", "--out", str(tmp_path), "--trials", "0"])
    assert code == 1
    assert "trial" in capsys.readouterr().err


def test_bad_config_file_is_config_error(tmp_path, capsys):
    cfg = tmp_path / "bad.yaml"
    cfg.write_text("system: {M: 3}\n")  # M pairs required, defaults give 4
    code = run(["dl-rates", "--config", str(cfg), "--out", str(tmp_path)])
    assert code == 1
    assert capsys.readouterr().err.startswith("error:")


def test_bad_grid_is_config_error(tmp_path, capsys):
    assert run(["dl-rates", "--out", str(tmp_path),
                "--snr-grid", "10:0:5"]) == 1
    assert run(["dl-region", "--out", str(tmp_path),
                "--rho-grid", "0:2:0.5"]) == 1
    capsys.readouterr()


def test_grid_parsing():
    assert cli._parse_grid("0:10:5", "snr-grid") == [0.0, 5.0, 10.0]
    assert cli._parse_grid("1,3,7", "snr-grid") == [1.0, 3.0, 7.0]
    with pytest.raises(ConfigError):
        cli._parse_grid("5,5", "snr-grid")


# ---------------------------------------------------------------------------
# smoke runs + determinism
# ---------------------------------------------------------------------------

SMOKE = ["--trials", "100", "--seed", "3", "--snr-grid", "10,25",
         "--rho-grid", "0:1:0.5", "--tau-grid", "0:1:0.5",
         "--grid-step", "0.5"]

EXPECTED = {
    "dl-rates": ("dl_sum_ecr.csv", "dl_ut_ecr.csv", "dl_sr.csv"),
    "dl-outage": ("dl_op.csv",),
    "dl-region": ("dl_region.csv",),
    "ul-rates": ("ul_ecr.csv", "ul_sr.csv"),
    "ul-outage": ("ul_op.csv",),
    "ul-region": ("ul_region.csv",),
}


@pytest.mark.parametrize("command", sorted(EXPECTED))
def test_smoke_and_determinism(command, tmp_path):
    out_a = tmp_path / "a"
    out_b = tmp_path / "b"
    assert run([command, "--out", str(out_a)] + SMOKE) == 0
    assert run([command, "--out", str(out_b)] + SMOKE) == 0
    for name in EXPECTED[command]:
        a, b = out_a / name, out_b / name
        assert a.exists()
        assert read(a) == read(b)
        header = read(a).decode().splitlines()[0]
        if name.endswith("region.csv"):
            assert header == "snr_db,design,sweep_param,sr,cr"
        else:
            assert header == "snr_db,metric,design,value,stderr,trials"


def test_validate_exit_zero(tmp_path, capsys):
    code = run(["validate", "--out", str(tmp_path),
                "--trials", "2000", "--seed", "11"])
    out = capsys.readouterr().out
    assert code == 0
    assert "validation: PASS" in out
    csv = read(tmp_path / "validation.csv").decode().splitlines()
    assert csv[0] == ("metric,design,snr_db,closed,estimate,stderr,z,"
                      "trials,gated,tol,passed")
    assert len(csv) > 10
