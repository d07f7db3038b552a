"""Renderers for the isacsim figure suite.

Each figure id maps to one CSV produced by the isacsim CLI; rendering is
read-only over the CSV and deterministic.  Scalar CSVs have columns
snr_db,metric,design,value,stderr,trials; region CSVs have
snr_db,design,sweep_param,sr,cr.
"""

import csv
import os

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402


def read_rows(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def _series(rows):
    """Group scalar rows into {(metric, design): (snr, value)} sorted by snr."""
    groups = {}
    for row in rows:
        key = (row["metric"], row["design"])
        groups.setdefault(key, []).append(
            (float(row["snr_db"]), float(row["value"]))
        )
    out = {}
    for key, pts in groups.items():
        pts.sort()
        out[key] = (np.array([p[0] for p in pts]), np.array([p[1] for p in pts]))
    return out


def _style(metric):
    """Line style by metric flavor: closed forms solid, simulation as
    markers, asymptotes dashed."""
    if metric.endswith("_mc"):
        return {"linestyle": "none", "marker": "o", "markersize": 4}
    if "asymptote" in metric or "bound" in metric:
        return {"linestyle": "--"}
    return {"linestyle": "-"}


def _lines_figure(rows, ylabel, logy=False):
    fig, ax = plt.subplots(figsize=(5.2, 3.9))
    for (metric, design), (x, y) in sorted(_series(rows).items()):
        if logy:
            keep = y > 0.0
            x, y = x[keep], y[keep]
        if x.size == 0:
            continue
        ax.plot(x, y, label=f"{design} {metric}", **_style(metric))
    if logy:
        ax.set_yscale("log")
    ax.set_xlabel("transmit power (dB)")
    ax.set_ylabel(ylabel)
    if ax.has_data():
        ax.legend(fontsize=6)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    return fig


def _frontier(sr, cr):
    """Staircase frontier: sort by decreasing SR, keep the running CR max."""
    order = np.argsort(-sr)
    fs, fc = [], []
    best = -np.inf
    for i in order:
        if cr[i] > best:
            fs.append(sr[i])
            fc.append(cr[i])
            best = cr[i]
    return np.array(fs), np.array(fc)


def _region_figure(rows):
    fig, ax = plt.subplots(figsize=(5.2, 3.9))
    designs = sorted({row["design"] for row in rows})
    fills = {"isac": ("tab:blue", 0.25), "fdsac": ("tab:orange", 0.45)}
    for design in designs:
        pts = [(float(r["sr"]), float(r["cr"])) for r in rows
               if r["design"] == design]
        sr = np.array([p[0] for p in pts])
        cr = np.array([p[1] for p in pts])
        if sr.size == 0:
            continue
        fs, fc = _frontier(sr, cr)
        color, alpha = fills.get(design, ("tab:gray", 0.3))
        # filled hull: frontier staircase closed down to the axes
        poly_x = np.concatenate([[0.0], fs, [fs[-1], 0.0]])
        poly_y = np.concatenate([[fc[0]], fc, [0.0, 0.0]])
        ax.fill(poly_x, poly_y, color=color, alpha=alpha, label=design)
        ax.plot(fs, fc, color=color)
        if design == "isac":
            # corner points: the sensing-best and comm-best designs
            ax.plot(fs[0], fc[0], "s", color="black")
            ax.plot(fs[-1], fc[-1], "^", color="black")
    ax.set_xlabel("sensing rate (bps/Hz)")
    ax.set_ylabel("communication rate (bps/Hz)")
    ax.set_xlim(left=0.0)
    ax.set_ylim(bottom=0.0)
    if ax.has_data() and designs:
        ax.legend(fontsize=7)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    return fig


_SPECS = {
    "dl_com_a": ("dl_sum_ecr.csv", "sum ergodic rate (bps/Hz)", False),
    "dl_com_b": ("dl_ut_ecr.csv", "per-UT ergodic rate (bps/Hz)", False),
    "dl_com_c": ("dl_op.csv", "outage probability", True),
    "dl_sr": ("dl_sr.csv", "sensing rate (bps/Hz)", False),
    "ul_cr": ("ul_ecr.csv", "ergodic rate (bps/Hz)", False),
    "ul_op": ("ul_op.csv", "outage probability", True),
    "ul_sr": ("ul_sr.csv", "sensing rate (bps/Hz)", False),
}
_REGIONS = {
    "dl_region": "dl_region.csv",
    "ul_region": "ul_region.csv",
}

FIGURE_IDS = tuple(sorted(_SPECS) + sorted(_REGIONS))


def render(figure_id, in_dir, out_dir):
    """Render one figure from its CSV; returns the written image path."""
    if figure_id in _SPECS:
        csv_name, ylabel, logy = _SPECS[figure_id]
        rows = read_rows(os.path.join(in_dir, csv_name))
        fig = _lines_figure(rows, ylabel, logy)
    elif figure_id in _REGIONS:
        rows = read_rows(os.path.join(in_dir, _REGIONS[figure_id]))
        fig = _region_figure(rows)
    else:
        raise ValueError(f"unknown figure id {figure_id!r}")
    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, f"{figure_id}.png")
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
