import os
import shutil
import subprocess
import sys

import pytest

from plotkit import FIGURE_IDS, render
from plotkit.cli import main

SCALAR_HEADER = "snr_db,metric,design,value,stderr,trials\n"
REGION_HEADER = "snr_db,design,sweep_param,sr,cr\n"

SCALAR_CSVS = {
    "dl_sum_ecr.csv": ("ecr_closed,sc", "ecr_mc,sc", "ecr_mc,fdsac"),
    "dl_ut_ecr.csv": ("near_ecr_closed,sc", "far_ecr_mc,sc"),
    "dl_op.csv": ("op_near_closed,sc", "op_far_mc,sc",
                  "op_far_asymptote_exact,sc"),
    "dl_sr.csv": ("sr_closed,sc", "sr_mc,cc", "sr_asymptote,sc"),
    "ul_ecr.csv": ("ecr_closed,sc", "ecr_mc,cc", "ecr_asymptote,cc"),
    "ul_op.csv": ("op_closed,sc", "op_mc,cc"),
    "ul_sr.csv": ("sr_closed,sc", "sr_closed,fdsac"),
}


def write_synthetic(path):
    os.makedirs(path, exist_ok=True)
    for name, series in SCALAR_CSVS.items():
        lines = [SCALAR_HEADER]
        for metric_design in series:
            metric, design = metric_design.split(",")
            for i, snr in enumerate((0, 10, 20)):
                value = 0.5 * (i + 1) if "op" not in metric else 10.0 ** (-i)
                stderr = "0.01" if metric.endswith("_mc") else ""
                trials = "100" if metric.endswith("_mc") else ""
                lines.append(f"{snr},{metric},{design},{value},{stderr},{trials}\n")
        with open(os.path.join(path, name), "w") as fh:
            fh.writelines(lines)
    # an inner (fdsac) region strictly inside the outer (isac) one
    for name in ("dl_region.csv", "ul_region.csv"):
        lines = [REGION_HEADER]
        for i, t in enumerate((0.0, 0.5, 1.0)):
            sr, cr = 4.0 - 2.0 * t, 1.0 + t
            lines.append(f"25,isac,tau={t},{sr},{cr}\n")
            lines.append(f"25,fdsac,kappa={t},{0.5 * sr},{0.5 * cr}\n")
        with open(os.path.join(path, name), "w") as fh:
            fh.writelines(lines)


@pytest.fixture(scope="module")
def synthetic_dir(tmp_path_factory):
    path = tmp_path_factory.mktemp("csvs")
    write_synthetic(str(path))
    return str(path)


@pytest.mark.parametrize("figure_id", FIGURE_IDS)
def test_render_synthetic(figure_id, synthetic_dir, tmp_path):
    out = render(figure_id, synthetic_dir, str(tmp_path))
    assert os.path.exists(out)
    assert os.path.getsize(out) > 1000


@pytest.mark.parametrize("figure_id", FIGURE_IDS)
def test_empty_csv_renders_empty_axes(figure_id, tmp_path):
    src = tmp_path / "empty"
    src.mkdir()
    for name in SCALAR_CSVS:
        (src / name).write_text(SCALAR_HEADER)
    for name in ("dl_region.csv", "ul_region.csv"):
        (src / name).write_text(REGION_HEADER)
    assert main([figure_id, "--in", str(src), "--out", str(tmp_path)]) == 0


def test_missing_csv_errors(tmp_path, capsys):
    assert main(["dl_sr", "--in", str(tmp_path / "nope"),
                 "--out", str(tmp_path)]) == 1
    assert "error:" in capsys.readouterr().err


def test_cli_deterministic(synthetic_dir, tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["dl_region", "--in", synthetic_dir, "--out", str(a)]) == 0
    assert main(["dl_region", "--in", synthetic_dir, "--out", str(b)]) == 0
    assert (a / "dl_region.png").read_bytes() == (b / "dl_region.png").read_bytes()


@pytest.fixture(scope="module")
def smoke_dir(tmp_path_factory):
    """A real 100-trial isacsim run feeding every figure id."""
    if shutil.which("isacsim") is None:
        pytest.skip("isacsim CLI not installed")
    out = str(tmp_path_factory.mktemp("smoke"))
    base = ["--out", out, "--trials", "100", "--seed", "1"]
    fast = ["--snr-grid", "0:30:10", "--rho-grid", "0:1:0.25",
            "--tau-grid", "0:1:0.25", "--grid-step", "0.25"]
    for command in ("dl-rates", "dl-outage", "dl-region",
                    "ul-rates", "ul-outage", "ul-region"):
        subprocess.run(["isacsim", command] + base + fast, check=True)
    return out


@pytest.mark.parametrize("figure_id", FIGURE_IDS)
def test_render_smoke_run(figure_id, smoke_dir, tmp_path):
    code = main([figure_id, "--in", smoke_dir, "--out", str(tmp_path)])
    assert code == 0
    path = tmp_path / f"{figure_id}.png"
    assert path.exists() and path.stat().st_size > 1000
