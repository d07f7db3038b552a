"""Frequency-division sensing-and-communication baseline.

The band is split: a fraction kappa carries communication, 1 - kappa
carries sensing; the downlink power budget splits as mu / (1 - mu).  Both
functions then run interference-free, which is what the integrated designs
are measured against.
"""

import numpy as np

from .downlink import _pair_arrays, cc_allocate
from .special import rate_integral_exp, water_fill


# ---------------------------------------------------------------------------
# downlink
# ---------------------------------------------------------------------------

def dl_sensing_rate(corr, kappa, mu, p, length):
    """Sensing rate with bandwidth share 1 - kappa and power (1 - mu) p."""
    if kappa >= 1.0 or mu >= 1.0:
        return 0.0
    band = 1.0 - kappa
    gains = length * corr.eigenvalues / band
    sol = water_fill(gains, (1.0 - mu) * p)
    m = corr.eigenvalues.size
    return band * m / length * np.sum(np.log2(1.0 + gains * sol.allocation))


def dl_comm_rates(pairs, nv2_near, nv2_far, kappa, mu, p,
                  inner_iters=60, outer_iters=60):
    """Per-realization FDSAC downlink sum rates (..., broadcast over the
    leading axes of the detection norms).

    Power is allocated per realization across pairs to maximize the
    kappa-scaled NOMA sum rate with comm budget mu p.  `kappa` and `mu`
    broadcast against the leading (realization) axes, so whole split grids
    vectorize in one call.
    """
    nv2_near = np.asarray(nv2_near, dtype=float)
    nv2_far = np.asarray(nv2_far, dtype=float)
    kappa = np.asarray(kappa, dtype=float)
    mu = np.asarray(mu, dtype=float)
    an, af, en, ef = _pair_arrays(pairs)
    a = an * en / nv2_near
    b = np.broadcast_to(af * ef, nv2_far.shape).astype(float)
    cc = np.broadcast_to(an * ef, nv2_far.shape).astype(float)
    d = nv2_far
    live = (kappa > 0.0) & (mu > 0.0)
    k = np.where(kappa > 0.0, kappa, 1.0)[..., None]
    budget = np.where(live, mu, 0.0) * p
    # bandwidth kappa: rate = kappa log2(1 + SINR / kappa); absorbing the
    # scaling gives coefficients a/kappa and kappa d in the allocator
    powers = cc_allocate(a / k, b, cc, k * d, budget, inner_iters, outer_iters)
    near = k * np.log2(1.0 + a * powers / k)
    far = k * np.log2(1.0 + b * powers / (cc * powers + k * d))
    return np.sum(near + far, axis=-1)


def dl_outage(pair, kappa, power):
    """FDSAC downlink outage (near, far) of one pair at comm beam power."""
    if kappa <= 0.0 or power <= 0.0:
        return 1.0, 1.0
    eps_n = 2.0 ** (pair.target_rate_near / kappa) - 1.0
    eps_f = 2.0 ** (pair.target_rate_far / kappa) - 1.0
    rho_n = kappa * eps_n / (pair.alpha_near * pair.pathloss_near)
    margin = (pair.alpha_far - eps_f * pair.alpha_near) * pair.pathloss_far
    if margin <= 0.0:
        return 1.0, 1.0
    rho_f = kappa * eps_f / margin
    return 1.0 - np.exp(-(rho_n + rho_f) / power), 1.0 - np.exp(-rho_f / power)


# ---------------------------------------------------------------------------
# uplink
# ---------------------------------------------------------------------------

def ul_comm_rate(deltas, kappa, pc):
    """FDSAC uplink ergodic comm rate, bandwidth share kappa."""
    if kappa <= 0.0:
        return 0.0
    deltas = np.asarray(deltas, dtype=float)
    return float(kappa * np.sum(rate_integral_exp(pc * deltas / kappa)))


def ul_sensing_rate(corr, kappa, ps, length):
    """FDSAC uplink sensing rate, bandwidth share 1 - kappa, energy L ps."""
    if kappa >= 1.0:
        return 0.0
    band = 1.0 - kappa
    sol = water_fill(corr.eigenvalues / band, length * ps)
    m = corr.eigenvalues.size
    return band * m / length * np.sum(
        np.log2(1.0 + corr.eigenvalues * sol.allocation / band)
    )


def ul_outage(pair, delta, kappa, pc):
    """FDSAC uplink pair outage against the pair target rate."""
    if kappa <= 0.0:
        return 1.0
    eps = 2.0 ** (pair.target_rate_pair / kappa) - 1.0
    return 1.0 - np.exp(-kappa * eps / (pc * delta))
