"""Uplink analysis: null-space pair precoding, zero-forcing detection at the
BS, sensing waveform design, and the resulting rate/outage expressions.

Each UT pair transmits through a shared effective channel obtained by
forcing the near and far transmit precoders to produce the same receive
signature; the BS sensing waveform occupies the same band, so one side of
the trade-off always pays an interference penalty.
"""

import numpy as np
from dataclasses import dataclass

from .special import EULER_GAMMA, LN2, rate_integral_exp, water_fill

_COND_LIMIT = 1e12


# ---------------------------------------------------------------------------
# pair precoding and BS detection
# ---------------------------------------------------------------------------

def pair_precoders(h_near, h_far, r):
    """Precoders (w_near, w_far) aligning both UTs of one pair on a common
    receive signature.

    The stacked vector lies in the null space of [H_near, -H_far] and is
    expanded on an orthonormal null-space basis with coefficients r
    (||r||^2 = 2).  Returns (w_near, w_far, z) with z the shared effective
    channel H_near w_near = H_far w_far.
    """
    m, n = h_near.shape
    a = np.concatenate([h_near, -h_far], axis=1)  # (M, 2N)
    _, _, vh = np.linalg.svd(a)
    basis = vh[m:].conj().T  # (2N, 2N - M)
    w = basis @ r
    z = h_near @ w[:n]
    return w[:n], w[n:], z


def zf_detection(z_stack):
    """Zero-forcing detection vectors for the stacked signatures.

    z_stack: (..., M, M) with signature z_m in row m's transpose position,
    i.e. z_stack[..., :, m] is pair m's effective channel.  Returns
    (v, gains): unit-norm detection vectors as columns of v and the
    post-detection channel gains 1/[(Q^{-H} Q^{-1})]_{mm}.
    """
    z_stack = np.asarray(z_stack, dtype=complex)
    q = np.swapaxes(z_stack, -1, -2).conj()  # rows are z_m^H
    qinv = np.linalg.inv(q)
    col_sq = np.sum(np.abs(qinv) ** 2, axis=-2)  # (..., M)
    gains = 1.0 / col_sq
    v = qinv * np.sqrt(gains[..., None, :])
    return v, gains


def batch_effective_gains(h_near, h_far, r):
    """Post-detection gains for a batch of uplink realizations.

    h_near/h_far: (T, M, M, N), r: (T, M, 2N - M).  Returns (gains, keep)
    where keep flags realizations whose signature matrix is well conditioned.
    """
    t, m, _, n = h_near.shape
    a = np.concatenate([h_near, -h_far], axis=-1).reshape(t * m, m, 2 * n)
    _, _, vh = np.linalg.svd(a)
    basis = np.swapaxes(vh[:, m:], -1, -2).conj()  # (T*M, 2N, 2N-M)
    w = (basis @ r.reshape(t * m, -1, 1))[..., 0]
    z = (h_near.reshape(t * m, m, n) @ w[:, :n, None])[..., 0]
    z_stack = np.swapaxes(z.reshape(t, m, m), -1, -2)  # columns are z_m
    sv = np.linalg.svd(np.swapaxes(z_stack, -1, -2).conj(), compute_uv=False)
    keep = sv[:, -1] > sv[:, 0] / _COND_LIMIT
    _, gains = zf_detection(z_stack[keep])
    return gains, keep


# ---------------------------------------------------------------------------
# sensing waveforms and designs
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SensingWaveform:
    """BS sensing transmit block X (M x L) plus its per-slot interference
    power at the BS receiver, sigma2[l] = |x_l^H R x_l| + 1."""

    matrix: np.ndarray
    mode_energies: np.ndarray
    sigma2: np.ndarray


def _spreading(m, length, kind):
    if kind == "dft":
        grid = np.arange(length)
        e = np.exp(-2j * np.pi * np.outer(np.arange(m), grid) / length)
        return e / np.sqrt(length)
    if kind == "identity":
        e = np.zeros((m, length))
        e[:, :m] = np.eye(m)
        return e
    raise ValueError("spreading must be 'dft' or 'identity'")


def make_waveform(corr, energies, length, spreading="dft"):
    """Waveform carrying the given per-mode energies on R's eigenvectors."""
    energies = np.asarray(energies, dtype=float)
    e = _spreading(energies.size, length, spreading)
    x = (corr.eigenvectors * np.sqrt(energies)) @ e
    quad = np.abs(np.einsum("il,ij,jl->l", x.conj(), corr.matrix, x))
    return SensingWaveform(x, energies, quad + 1.0)


@dataclass(frozen=True)
class UplinkDesign:
    design_tag: str
    waveform: SensingWaveform
    sensing_rate: float
    comm_noise: float  # effective noise-plus-interference on the comm side


def sc_design_ul(corr, ps, length, spreading="dft"):
    """Sensing-centric uplink design: water-fill the sensing energy budget
    L*ps over R's modes, ignoring the comm uplink."""
    sol = water_fill(corr.eigenvalues, length * ps)
    wf = make_waveform(corr, sol.allocation, length, spreading)
    m = corr.eigenvalues.size
    sr = m / length * np.sum(np.log2(1.0 + corr.eigenvalues * sol.allocation))
    return UplinkDesign("sc", wf, sr, float(np.mean(wf.sigma2)))


def cc_design_ul(corr, pc, ps, length, deltas, spreading="dft"):
    """Communication-centric uplink design: the comm signals are kept clean,
    so the echo is received over the comm interference floor sigma_c^2."""
    sigma_c2 = 1.0 + pc * float(np.sum(deltas))
    sol = water_fill(corr.eigenvalues / sigma_c2, length * ps)
    wf = make_waveform(corr, sol.allocation, length, spreading)
    m = corr.eigenvalues.size
    sr = m / length * np.sum(
        np.log2(1.0 + corr.eigenvalues * sol.allocation / sigma_c2)
    )
    return UplinkDesign("cc", wf, sr, 1.0)


# ---------------------------------------------------------------------------
# communication rates and outage
# ---------------------------------------------------------------------------

def instant_pair_rates(gains, pairs, pc, noise):
    """Per-pair instantaneous (near, far) uplink rates for realized gains.

    gains: (..., M); noise: scalar or per-realization noise power.
    """
    an = np.array([p.alpha_near for p in pairs])
    af = np.array([p.alpha_far for p in pairs])
    en = np.array([p.pathloss_near for p in pairs])
    ef = np.array([p.pathloss_far for p in pairs])
    noise = np.asarray(noise, dtype=float)[..., None] if np.ndim(noise) else noise
    g = np.asarray(gains, dtype=float)
    gamma_f = af * ef * pc * g / (an * en * pc * g + noise)
    gamma_n = an * en * pc * g / noise
    return np.log2(1.0 + gamma_n), np.log2(1.0 + gamma_f)


def ecr_pair_sum(delta, pc, noise):
    """Closed-form ergodic pair sum rate E{log2(1 + pc delta g / noise)}
    with g ~ Exp(1)."""
    return rate_integral_exp(pc * np.asarray(delta) / noise)


def sc_ecr(deltas, pc, sigma2):
    """S-C ergodic comm rate per slot (vector over slots)."""
    return np.array(
        [float(np.sum(ecr_pair_sum(deltas, pc, s2))) for s2 in np.atleast_1d(sigma2)]
    )


def cc_ecr(deltas, pc):
    """C-C ergodic comm rate (interference-free comm uplink)."""
    return float(np.sum(ecr_pair_sum(deltas, pc, 1.0)))


def ecr_asymptote(deltas, pc, noise):
    """High-power ECR: sum of log2(pc delta / noise) - gamma/ln 2."""
    deltas = np.asarray(deltas, dtype=float)
    return float(np.sum(np.log2(pc * deltas / noise) - EULER_GAMMA / LN2))


def op_pair(pair, delta, pc, noise):
    """Outage of one pair's sum rate against its pair target."""
    eps = 2.0 ** pair.target_rate_pair - 1.0
    return 1.0 - np.exp(-noise * eps / (pc * delta))


def snr_gap_sensing(corr, pc, ps, length, deltas, spreading="dft"):
    """E_s: high-power sensing-rate penalty (in 3-dB units) the C-C design
    pays relative to the S-C design."""
    sigma_c2 = 1.0 + pc * float(np.sum(deltas))
    return float(np.log2(sigma_c2))


def snr_gap_comm(corr, pc, ps, length, deltas, spreading="dft"):
    """E_c: high-power ECR penalty (per pair, 3-dB units) the S-C design
    pays relative to the C-C design, averaged over slots."""
    wf = sc_design_ul(corr, ps, length, spreading).waveform
    return float(np.mean(np.log2(wf.sigma2)))


def time_share_point(point_a, point_b, tau):
    """Convex combination of two (sensing, comm) rate pairs."""
    a = np.asarray(point_a, dtype=float)
    b = np.asarray(point_b, dtype=float)
    return tuple(tau * a + (1.0 - tau) * b)
