"""Command-line entry point.

Subcommands (dl-rates, dl-outage, dl-region, ul-rates, ul-outage, ul-region,
validate) run the experiments and write one CSV per figure-equivalent into
the output directory.  Scalar CSVs share the columns
snr_db,metric,design,value,stderr,trials; region CSVs use
snr_db,design,sweep_param,sr,cr.  Exit status: 0 success, 1 configuration
error, 2 validation failure.
"""

import argparse
import os
import sys

import numpy as np

from . import downlink, fdsac, harness, uplink
from .channel import SensingCorrelation
from .config import ConfigError, load_config


def _fmt(x):
    return f"{float(x):.12g}"


def _write_csv(path, header, rows):
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(str(c) for c in row))
    with open(path, "w", newline="") as fh:
        fh.write("\n".join(lines) + "\n")


def _parse_grid(text, name):
    """Grid flag: either 'start:stop:step' or comma-separated values."""
    try:
        if ":" in text:
            start, stop, step = (float(t) for t in text.split(":"))
            if step <= 0 or stop < start:
                raise ValueError
            n = int(round((stop - start) / step))
            grid = [start + i * step for i in range(n + 1)]
        else:
            grid = [float(t) for t in text.split(",")]
    except ValueError:
        raise ConfigError(f"cannot parse --{name} value {text!r}")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ConfigError(f"--{name} grid must be strictly increasing")
    if not grid:
        raise ConfigError(f"--{name} grid is empty")
    return grid


def _scalar_row(snr_db, metric, design, value, stderr="", trials=""):
    return (_fmt(snr_db), metric, design, _fmt(value),
            _fmt(stderr) if stderr != "" else "",
            str(trials) if trials != "" else "")


_SCALAR_HEADER = ("snr_db", "metric", "design", "value", "stderr", "trials")
_REGION_BATCH = 2000
_REGION_HEADER = ("snr_db", "design", "sweep_param", "sr", "cr")


# ---------------------------------------------------------------------------
# downlink commands
# ---------------------------------------------------------------------------

def _dl_stats(config):
    corr = SensingCorrelation.from_eigenvalues(config.eigenvalues,
                                               seed=config.seed)
    nv2n, nv2f = harness.dl_channel_stats(config, config.trials, config.seed,
                                          corr.eigenvectors)
    return corr, nv2n, nv2f


def cmd_dl_rates(config, grid, out):
    corr, nv2n, nv2f = _dl_stats(config)
    sum_rows, ut_rows, sr_rows = [], [], []
    for snr_db in grid:
        p = 10.0 ** (snr_db / 10.0)
        powers_sc = downlink.sc_design(corr, p, config.L).powers
        closed = sum(
            sum(downlink.ecr_pair(q, pw))
            for q, pw in zip(config.pairs, powers_sc)
        )
        for design in ("sc", "cc"):
            est = harness.dl_ecr_mc(config, corr, p, nv2n, nv2f, design)
            sum_rows.append(_scalar_row(snr_db, "ecr_mc", design,
                                        est["sum"].mean, est["sum"].stderr,
                                        est["sum"].trials))
            if design == "sc":
                sum_rows.append(_scalar_row(snr_db, "ecr_closed", "sc", closed))
                near, far = downlink.ecr_pair(config.pairs[0], powers_sc[0])
                ut_rows.append(_scalar_row(snr_db, "near_ecr_closed", "sc", near))
                ut_rows.append(_scalar_row(snr_db, "near_ecr_mc", "sc",
                                           est["near"].mean, est["near"].stderr,
                                           est["near"].trials))
                ut_rows.append(_scalar_row(snr_db, "far_ecr_closed", "sc", far))
                ut_rows.append(_scalar_row(snr_db, "far_ecr_mc", "sc",
                                           est["far"].mean, est["far"].stderr,
                                           est["far"].trials))
        fd = harness.fdsac_dl_ecr_mc(config, p, nv2n, nv2f)
        sum_rows.append(_scalar_row(snr_db, "ecr_mc", "fdsac", fd.mean,
                                    fd.stderr, fd.trials))

        sr_rows.append(_scalar_row(
            snr_db, "sr_closed", "sc",
            downlink.sensing_rate(powers_sc, corr, config.L)))
        sr_mc = harness.dl_sr_mc(config, corr, p, nv2n, nv2f, "cc")
        sr_rows.append(_scalar_row(snr_db, "sr_mc", "cc", sr_mc.mean,
                                   sr_mc.stderr, sr_mc.trials))
        sr_rows.append(_scalar_row(
            snr_db, "sr_closed", "fdsac",
            fdsac.dl_sensing_rate(corr, config.kappa, config.mu, p, config.L)))
        sr_rows.append(_scalar_row(
            snr_db, "sr_asymptote", "sc",
            downlink.sensing_rate_asymptote(corr, p, config.L)))
    _write_csv(os.path.join(out, "dl_sum_ecr.csv"), _SCALAR_HEADER, sum_rows)
    _write_csv(os.path.join(out, "dl_ut_ecr.csv"), _SCALAR_HEADER, ut_rows)
    _write_csv(os.path.join(out, "dl_sr.csv"), _SCALAR_HEADER, sr_rows)


def cmd_dl_outage(config, grid, out):
    corr, nv2n, nv2f = _dl_stats(config)
    rows = []
    pair = config.pairs[0]
    for snr_db in grid:
        p = 10.0 ** (snr_db / 10.0)
        power = downlink.sc_design(corr, p, config.L).powers[0]
        cl_n, cl_f = downlink.op_exact(pair, power)
        rows.append(_scalar_row(snr_db, "op_near_closed", "sc", cl_n))
        rows.append(_scalar_row(snr_db, "op_far_closed", "sc", cl_f))
        mc_n, mc_f = harness.dl_op_mc(config, corr, p, nv2n, nv2f)
        rows.append(_scalar_row(snr_db, "op_near_mc", "sc", mc_n.mean,
                                mc_n.stderr, mc_n.trials))
        rows.append(_scalar_row(snr_db, "op_far_mc", "sc", mc_f.mean,
                                mc_f.stderr, mc_f.trials))
        for variant in ("exact", "bound"):
            as_n, as_f = downlink.op_asymptotic(pair, p, config.M, config.N,
                                                variant)
            rows.append(_scalar_row(snr_db, f"op_near_asymptote_{variant}",
                                    "sc", as_n))
            rows.append(_scalar_row(snr_db, f"op_far_asymptote_{variant}",
                                    "sc", as_f))
        fd_n, fd_f = fdsac.dl_outage(pair, config.kappa,
                                     config.mu * p / config.M)
        rows.append(_scalar_row(snr_db, "op_near_closed", "fdsac", fd_n))
        rows.append(_scalar_row(snr_db, "op_far_closed", "fdsac", fd_f))
    _write_csv(os.path.join(out, "dl_op.csv"), _SCALAR_HEADER, rows)


def cmd_dl_region(config, rho_grid, grid_step, out):
    corr, nv2n, nv2f = _dl_stats(config)
    # the split grid solves one allocation per (kappa, mu) cell, so the
    # region sweep caps the realization batch to stay tractable
    nv2n, nv2f = nv2n[:_REGION_BATCH], nv2f[:_REGION_BATCH]
    p = config.p
    rows = []
    for rho in rho_grid:
        pt = downlink.pareto_design(nv2n, nv2f, config.pairs, corr, p,
                                    config.L, rho)
        rows.append((_fmt(config.p_db), "isac", f"rho={_fmt(rho)}",
                     _fmt(pt.sensing_rate), _fmt(pt.comm_rate)))
    splits = np.arange(0.0, 1.0 + 1e-9, grid_step)
    kcol = splits.reshape(-1, 1)  # one allocator call per mu, vector over kappa
    for mu in splits:
        crs = np.mean(fdsac.dl_comm_rates(config.pairs, nv2n, nv2f,
                                          kcol, mu, p,
                                          inner_iters=30, outer_iters=30),
                      axis=-1)
        for kappa, cr in zip(splits, crs):
            sr = fdsac.dl_sensing_rate(corr, kappa, mu, p, config.L)
            rows.append((_fmt(config.p_db), "fdsac",
                         f"kappa={_fmt(kappa)};mu={_fmt(mu)}",
                         _fmt(sr), _fmt(cr)))
    _write_csv(os.path.join(out, "dl_region.csv"), _REGION_HEADER, rows)


# ---------------------------------------------------------------------------
# uplink commands
# ---------------------------------------------------------------------------

def _ul_designs(config, pc):
    corr = SensingCorrelation.from_eigenvalues(config.eigenvalues,
                                               seed=config.seed)
    sc = uplink.sc_design_ul(corr, config.ps, config.L)
    cc = uplink.cc_design_ul(corr, pc, config.ps, config.L, config.deltas)
    return corr, sc, cc


def cmd_ul_rates(config, grid, out):
    gains, dropped = harness.ul_channel_stats(config, config.trials,
                                              config.seed)
    ecr_rows, sr_rows = [], []
    deltas = config.deltas
    for pc_db in grid:
        pc = 10.0 ** (pc_db / 10.0)
        corr, sc, cc = _ul_designs(config, pc)
        s2 = float(sc.waveform.sigma2[0])
        ecr_rows.append(_scalar_row(
            pc_db, "ecr_closed", "sc",
            float(np.sum(uplink.ecr_pair_sum(deltas, pc, s2)))))
        ecr_rows.append(_scalar_row(pc_db, "ecr_closed", "cc",
                                    uplink.cc_ecr(deltas, pc)))
        for design, noise in (("sc", s2), ("cc", 1.0)):
            est = harness.ul_ecr_mc(config, gains, pc, noise)
            ecr_rows.append(_scalar_row(pc_db, "ecr_mc", design, est.mean,
                                        est.stderr, est.trials))
        ecr_rows.append(_scalar_row(pc_db, "ecr_asymptote", "cc",
                                    uplink.ecr_asymptote(deltas, pc, 1.0)))
        ecr_rows.append(_scalar_row(
            pc_db, "ecr_closed", "fdsac",
            fdsac.ul_comm_rate(deltas, config.kappa, pc)))

        sr_rows.append(_scalar_row(pc_db, "sr_closed", "sc", sc.sensing_rate))
        sr_rows.append(_scalar_row(pc_db, "sr_closed", "cc", cc.sensing_rate))
        sr_rows.append(_scalar_row(
            pc_db, "sr_closed", "fdsac",
            fdsac.ul_sensing_rate(corr, config.kappa, config.ps, config.L)))
    _write_csv(os.path.join(out, "ul_ecr.csv"), _SCALAR_HEADER, ecr_rows)
    _write_csv(os.path.join(out, "ul_sr.csv"), _SCALAR_HEADER, sr_rows)


def cmd_ul_outage(config, grid, out):
    gains, dropped = harness.ul_channel_stats(config, config.trials,
                                              config.seed)
    rows = []
    pair, delta = config.pairs[0], config.deltas[0]
    for pc_db in grid:
        pc = 10.0 ** (pc_db / 10.0)
        corr, sc, cc = _ul_designs(config, pc)
        s2 = float(sc.waveform.sigma2[0])
        for design, noise in (("sc", s2), ("cc", 1.0)):
            rows.append(_scalar_row(pc_db, "op_closed", design,
                                    uplink.op_pair(pair, delta, pc, noise)))
            est = harness.ul_op_mc(config, gains, pc, noise)
            rows.append(_scalar_row(pc_db, "op_mc", design, est.mean,
                                    est.stderr, est.trials))
        rows.append(_scalar_row(
            pc_db, "op_closed", "fdsac",
            fdsac.ul_outage(pair, delta, config.kappa, pc)))
    _write_csv(os.path.join(out, "ul_op.csv"), _SCALAR_HEADER, rows)


def cmd_ul_region(config, tau_grid, grid_step, out):
    pc = config.pc
    corr, sc, cc = _ul_designs(config, pc)
    deltas = config.deltas
    s2 = float(sc.waveform.sigma2[0])
    pt_sc = (sc.sensing_rate, float(np.sum(uplink.ecr_pair_sum(deltas, pc, s2))))
    pt_cc = (cc.sensing_rate, uplink.cc_ecr(deltas, pc))
    rows = []
    for tau in tau_grid:
        sr, cr = uplink.time_share_point(pt_sc, pt_cc, tau)
        rows.append((_fmt(config.pc_db), "isac", f"tau={_fmt(tau)}",
                     _fmt(sr), _fmt(cr)))
    for kappa in np.arange(0.0, 1.0 + 1e-9, grid_step):
        sr = fdsac.ul_sensing_rate(corr, kappa, config.ps, config.L)
        cr = fdsac.ul_comm_rate(deltas, kappa, pc)
        rows.append((_fmt(config.pc_db), "fdsac", f"kappa={_fmt(kappa)}",
                     _fmt(sr), _fmt(cr)))
    _write_csv(os.path.join(out, "ul_region.csv"), _REGION_HEADER, rows)


# ---------------------------------------------------------------------------
# validation command
# ---------------------------------------------------------------------------

def cmd_validate(config, out):
    rows = harness.run_validation(config)
    csv_rows = []
    for r in rows:
        csv_rows.append((
            r.metric, r.design, _fmt(r.snr_db), _fmt(r.closed),
            _fmt(r.estimate), _fmt(r.stderr), _fmt(r.z), str(r.trials),
            str(int(r.gated)), _fmt(r.tol), str(int(r.passed)),
        ))
    _write_csv(
        os.path.join(out, "validation.csv"),
        ("metric", "design", "snr_db", "closed", "estimate", "stderr", "z",
         "trials", "gated", "tol", "passed"),
        csv_rows,
    )
    width = max(len(r.metric) for r in rows)
    for r in rows:
        verdict = "pass" if r.passed else ("FAIL" if r.gated else "flagged")
        print(f"{r.metric:<{width}}  {r.design:<6} closed={r.closed:.6g} "
              f"estimate={r.estimate:.6g} z={r.z:.2f} [{verdict}]")
    ok = harness.validation_passed(rows)
    print(f"validation: {'PASS' if ok else 'FAIL'} "
          f"({sum(r.gated for r in rows)} gated, {len(rows)} rows)")
    return 0 if ok else 2


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

_COMMANDS = ("dl-rates", "dl-outage", "dl-region", "ul-rates", "ul-outage",
             "ul-region", "validate")


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="isacsim",
        description="NOMA-ISAC rate/outage experiments (CSV output)",
    )
    parser.add_argument("command", choices=_COMMANDS)
    parser.add_argument("--config", default=None, help="YAML config file")
    parser.add_argument("--out", default=".", help="output directory")
    parser.add_argument("--trials", type=int, default=None)
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--snr-grid", default="0:40:5",
                        help="dB grid, 'start:stop:step' or comma list")
    parser.add_argument("--rho-grid", default="0:1:0.05",
                        help="rate-profile grid for dl-region")
    parser.add_argument("--tau-grid", default="0:1:0.05",
                        help="time-share grid for ul-region")
    parser.add_argument("--grid-step", type=float, default=0.05,
                        help="bandwidth/power split step for the FDSAC sweeps")
    return parser


def main(argv=None):
    args = _build_parser().parse_args(argv)
    try:
        config = load_config(args.config)
        overrides = {}
        if args.trials is not None:
            overrides["trials"] = args.trials
        if args.seed is not None:
            overrides["seed"] = args.seed
        if overrides:
            from dataclasses import replace

            try:
                config = replace(config, **overrides)
            except ValueError as exc:
                raise ConfigError(str(exc))
        if not (0.0 < args.grid_step <= 1.0):
            raise ConfigError(f"invalid --grid-step {args.grid_step}")
        snr_grid = _parse_grid(args.snr_grid, "snr-grid")
        rho_grid = _parse_grid(args.rho_grid, "rho-grid")
        tau_grid = _parse_grid(args.tau_grid, "tau-grid")
        for name, grid in (("rho-grid", rho_grid), ("tau-grid", tau_grid)):
            if grid[0] < 0.0 or grid[-1] > 1.0:
                raise ConfigError(f"--{name} values must lie in [0, 1]")
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    os.makedirs(args.out, exist_ok=True)
    if args.command == "dl-rates":
        cmd_dl_rates(config, snr_grid, args.out)
    elif args.command == "dl-outage":
        cmd_dl_outage(config, snr_grid, args.out)
    elif args.command == "dl-region":
        cmd_dl_region(config, rho_grid, args.grid_step, args.out)
    elif args.command == "ul-rates":
        cmd_ul_rates(config, snr_grid, args.out)
    elif args.command == "ul-outage":
        cmd_ul_outage(config, snr_grid, args.out)
    elif args.command == "ul-region":
        cmd_ul_region(config, tau_grid, args.grid_step, args.out)
    elif args.command == "validate":
        return cmd_validate(config, args.out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
