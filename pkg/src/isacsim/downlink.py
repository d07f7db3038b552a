"""Downlink analysis: sensing rate, per-UT communication rates, outage
probabilities, and the power allocation designs.

Beams point along the eigenvectors of the sensing correlation R; each beam
serves one near/far UT pair via power-domain multiplexing.  UT-side
detection vectors align the effective channel with the assigned beam, which
decouples the pairs and leaves a single scalar fading gain per UT (a unit
exponential when N = M).
"""

import numpy as np
from dataclasses import dataclass

from .special import LN2, WishartMaxEig, rate_integral_exp, water_fill

_COND_LIMIT = 1e12


@dataclass(frozen=True)
class DesignSolution:
    """A transmit design: unit-norm beams (columns) and per-beam powers."""

    design_tag: str
    precoders: np.ndarray
    powers: np.ndarray


# ---------------------------------------------------------------------------
# sensing rate
# ---------------------------------------------------------------------------

def sensing_rate_precoder(p_matrix, corr, length):
    """(M/L) log2 det(I + L P^H R P) for an arbitrary precoding matrix P
    whose columns carry the per-beam powers."""
    p_matrix = np.asarray(p_matrix, dtype=complex)
    m = p_matrix.shape[0]
    gram = length * p_matrix.conj().T @ corr.matrix @ p_matrix
    sign, logdet = np.linalg.slogdet(np.eye(p_matrix.shape[1]) + gram)
    return m / length * logdet / LN2


def sensing_rate(powers, corr, length):
    """Sensing rate of an eigen-aligned design, vectorized over leading axes
    of `powers` (..., M)."""
    powers = np.asarray(powers, dtype=float)
    m = corr.eigenvalues.size
    return m / length * np.sum(np.log2(1.0 + length * corr.eigenvalues * powers), axis=-1)


def sensing_mse(powers, corr, length):
    """Estimation MSE of an eigen-aligned design, M tr((X X^H + R^{-1})^{-1})
    for diagonal allocations on the correlation eigenbasis; vectorized over
    leading axes of `powers` (..., M)."""
    powers = np.asarray(powers, dtype=float)
    m = corr.eigenvalues.size
    return m * np.sum(
        corr.eigenvalues / (length * corr.eigenvalues * powers + 1.0), axis=-1
    )


def sc_design(corr, p, length):
    """Sensing-centric design: water-filling over the correlation modes."""
    sol = water_fill(length * corr.eigenvalues, p)
    return DesignSolution("sc", corr.eigenvectors.copy(), sol.allocation)


def sensing_rate_asymptote(corr, p, length):
    """High-power sensing rate of the S-C design (uniform power p/M)."""
    m = corr.eigenvalues.size
    return m / length * np.sum(np.log2(length * corr.eigenvalues * p / m))


# ---------------------------------------------------------------------------
# detection vectors and instantaneous rates
# ---------------------------------------------------------------------------

def detection_vectors(h, u):
    """Minimum-norm v with H^H v = u.  Square channels use a direct solve."""
    h = np.asarray(h, dtype=complex)
    n, m = h.shape
    if np.linalg.cond(h) > _COND_LIMIT:
        raise np.linalg.LinAlgError("ill-conditioned channel")
    if n == m:
        return np.linalg.solve(h.conj().T, u)
    return h @ np.linalg.solve(h.conj().T @ h, u)


def detection_norms(h_near, h_far, beams):
    """Squared detection-vector norms for a batch of realizations.

    h_near/h_far: (..., M, N, M) stacks (pair axis third from the right);
    beams: (M, M) with one column per pair.  Returns two (..., M) arrays.
    """
    h_near = np.asarray(h_near, dtype=complex)
    h_far = np.asarray(h_far, dtype=complex)
    n, m = h_near.shape[-2:]
    u = beams.T[..., :, None]  # (M, M, 1) one rhs per pair
    out = []
    for h in (h_near, h_far):
        ah = np.swapaxes(h, -1, -2).conj()  # H^H, (..., M, M, N)
        if n == m:
            v = np.linalg.solve(ah, np.broadcast_to(u, ah.shape[:-2] + (m, 1)))
        else:
            gram = ah @ h
            v = h @ np.linalg.solve(gram, np.broadcast_to(u, gram.shape[:-2] + (m, 1)))
        out.append(np.sum(np.abs(v[..., 0]) ** 2, axis=-1))
    return out[0], out[1]


def _pair_arrays(pairs):
    an = np.array([p.alpha_near for p in pairs])
    af = np.array([p.alpha_far for p in pairs])
    en = np.array([p.pathloss_near for p in pairs])
    ef = np.array([p.pathloss_far for p in pairs])
    return an, af, en, ef


def instant_rates(nv2_near, nv2_far, pairs, powers):
    """Per-UT instantaneous rates given realized detection norms (..., M)."""
    an, af, en, ef = _pair_arrays(pairs)
    powers = np.asarray(powers, dtype=float)
    g_near = an * en * powers / nv2_near
    sinr_far = af * ef * powers / (an * ef * powers + nv2_far)
    return np.log2(1.0 + g_near), np.log2(1.0 + sinr_far)


# ---------------------------------------------------------------------------
# ergodic communication rates (exact for N = M)
# ---------------------------------------------------------------------------

def ecr_pair(pair, power):
    """Closed-form ergodic rates (near, far) of one pair at beam power
    `power`, exact when the UT arrays match the BS array (N = M)."""
    near = rate_integral_exp(pair.alpha_near * pair.pathloss_near * power)
    far = rate_integral_exp(pair.pathloss_far * power) - rate_integral_exp(
        pair.alpha_near * pair.pathloss_far * power
    )
    return near, far


def ecr_fixed_powers(pairs, powers):
    """Sum ergodic rate of a fixed power vector across all pairs."""
    total = 0.0
    for pair, pw in zip(pairs, powers):
        near, far = ecr_pair(pair, pw)
        total += near + far
    return total


def ecr_pair_upper(pair, power, m, n):
    """Upper bounds from replacing the fading gain by the largest Wishart
    eigenvalue (tight as N grows beyond M)."""
    from scipy import integrate

    dist = WishartMaxEig(m, n)
    a_near = pair.alpha_near * pair.pathloss_near * power
    near, _ = integrate.quad(
        lambda x: np.log2(1.0 + a_near * x) * dist.pdf(x), 0, np.inf, limit=300
    )
    b = pair.alpha_far * pair.pathloss_far * power
    c = pair.alpha_near * pair.pathloss_far * power
    far, _ = integrate.quad(
        lambda x: np.log2(1.0 + b * x / (c * x + 1.0)) * dist.pdf(x), 0, np.inf, limit=300
    )
    return near, far


# ---------------------------------------------------------------------------
# outage
# ---------------------------------------------------------------------------

def op_thresholds(pair):
    """Power-normalized outage thresholds (near, far).

    The far threshold is infinite when the far target rate exceeds the SIC
    ceiling log2(1 + alpha_far/alpha_near).
    """
    eps_n = 2.0 ** pair.target_rate_near - 1.0
    eps_f = 2.0 ** pair.target_rate_far - 1.0
    rho_n = eps_n / (pair.alpha_near * pair.pathloss_near)
    margin = (pair.alpha_far - eps_f * pair.alpha_near) * pair.pathloss_far
    rho_f = eps_f / margin if margin > 0.0 else np.inf
    return rho_n, rho_f


def op_exact(pair, power):
    """Exact outage probabilities (near, far) for N = M.

    The near UT is in outage when its own link misses its target or when the
    far-message stage fails; the latter is governed by the far UT's link.
    """
    rho_n, rho_f = op_thresholds(pair)
    if power <= 0.0 or np.isinf(rho_f):
        return 1.0, 1.0
    near = 1.0 - np.exp(-(rho_n + rho_f) / power)
    far = 1.0 - np.exp(-rho_f / power)
    return near, far


def op_lower_bound(pair, power, m, n):
    """Lower bounds from the largest-eigenvalue upper bound on the fading
    gain (inclusion-exclusion over the two independent stages)."""
    rho_n, rho_f = op_thresholds(pair)
    if power <= 0.0 or np.isinf(rho_f):
        return 1.0, 1.0
    dist = WishartMaxEig(m, n)
    fn = dist.cdf(rho_n / power)
    ff = dist.cdf(rho_f / power)
    return fn + ff - fn * ff, ff


def op_asymptotic(pair, power, m, n, variant="exact"):
    """High-power outage laws.

    variant="exact": diversity one, matching the exact expressions with
    uniform power power/M per beam.  variant="bound": diversity m*n from the
    small-argument power law of the largest-eigenvalue distribution.
    """
    rho_n, rho_f = op_thresholds(pair)
    if np.isinf(rho_f):
        return 1.0, 1.0
    if variant == "exact":
        return m * (rho_n + rho_f) / power, m * rho_f / power
    if variant == "bound":
        d = m * n
        return (m / power) ** d * (rho_n**d + rho_f**d), (m * rho_f / power) ** d
    raise ValueError("variant must be 'exact' or 'bound'")


def outage_events(nv2_near, nv2_far, pair, power):
    """Boolean outage indicators (near, far) for realized detection norms,
    matching the event definitions behind op_exact."""
    rho_n, rho_f = op_thresholds(pair)
    if np.isinf(rho_f) or power <= 0.0:
        shape = np.broadcast(nv2_near, nv2_far).shape
        return np.ones(shape, bool), np.ones(shape, bool)
    x = 1.0 / np.asarray(nv2_near)
    y = 1.0 / np.asarray(nv2_far)
    far_out = y < rho_f / power
    near_out = (x < rho_n / power) | far_out
    return near_out, far_out


# ---------------------------------------------------------------------------
# communication-centric power allocation
# ---------------------------------------------------------------------------

def _cc_grad(c, a, b, cc, d):
    # d/dc of ln(1 + a c) + ln(1 + b c / (cc c + d)), nat units
    return a / (1.0 + a * c) + (b + cc) / ((b + cc) * c + d) - cc / (cc * c + d)


def cc_allocate(a, b, cc, d, budget, inner_iters=60, outer_iters=60):
    """Water-filling-type allocation for sum of per-pair NOMA rates.

    Maximizes sum_m [log2(1 + a_m c_m) + log2(1 + b_m c_m/(cc_m c_m + d_m))]
    subject to sum_m c_m = budget, c >= 0.  The per-pair rate is concave in
    c_m, so the KKT system is solved by bisection on the shared multiplier
    with an inner bisection for each c_m(mu).  All arguments broadcast; the
    pair axis is the last one.  `budget` may carry the leading batch axes.
    """
    a, b, cc, d = np.broadcast_arrays(
        *(np.asarray(x, dtype=float) for x in (a, b, cc, d))
    )
    budget = np.asarray(budget, dtype=float)
    lead = a.shape[:-1]
    bud = np.broadcast_to(budget, lead)[..., None]
    shape = a.shape
    bcc = b + cc

    # preallocated work buffers: the bisection runs thousands of gradient
    # evaluations, and fresh temporaries each pass thrash the allocator
    t1, t2, t3 = np.empty(shape), np.empty(shape), np.empty(shape)
    lo, hi, mid = np.empty(shape), np.empty(shape), np.empty(shape)
    go = np.empty(shape, bool)
    ngo = np.empty(shape, bool)
    feas = np.empty(shape, bool)

    def grad_gt(c, mu, out):
        # out <- (d/dc rate(c) > mu), rate in nat units
        np.multiply(a, c, out=t1)
        np.add(t1, 1.0, out=t1)
        np.divide(a, t1, out=t1)
        np.multiply(bcc, c, out=t2)
        np.add(t2, d, out=t2)
        np.divide(bcc, t2, out=t2)
        np.multiply(cc, c, out=t3)
        np.add(t3, d, out=t3)
        np.divide(cc, t3, out=t3)
        np.add(t1, t2, out=t1)
        np.subtract(t1, t3, out=t1)
        np.greater(t1, mu, out=out)

    def solve_c(mu, out):
        # largest c in [0, budget] with gradient >= mu (gradient decreases)
        lo.fill(0.0)
        np.copyto(hi, bud)
        grad_gt(lo, mu, feas)
        for _ in range(inner_iters):
            np.add(lo, hi, out=mid)
            np.multiply(mid, 0.5, out=mid)
            grad_gt(mid, mu, go)
            np.copyto(lo, mid, where=go)
            np.logical_not(go, out=ngo)
            np.copyto(hi, mid, where=ngo)
        np.add(lo, hi, out=out)
        out *= 0.5
        out[~feas] = 0.0

    mu_lo = np.zeros(lead + (1,))
    mu_hi = np.max(a + b / d, axis=-1, keepdims=True)
    mu = np.empty_like(mu_lo)
    used = np.empty(lead + (1,))
    over = np.empty(lead + (1,), bool)
    nover = np.empty(lead + (1,), bool)
    c = np.empty(shape)
    for _ in range(outer_iters):
        np.add(mu_lo, mu_hi, out=mu)
        mu *= 0.5
        solve_c(mu, c)
        np.sum(c, axis=-1, keepdims=True, out=used)
        np.greater(used, bud, out=over)
        np.copyto(mu_lo, mu, where=over)
        np.logical_not(over, out=nover)
        np.copyto(mu_hi, mu, where=nover)
    np.add(mu_lo, mu_hi, out=mu)
    mu *= 0.5
    solve_c(mu, c)
    # exact budget via a final proportional touch-up
    scale = bud / np.maximum(np.sum(c, axis=-1, keepdims=True), 1e-300)
    return c * scale


def cc_abcd(pairs, nv2_near, nv2_far):
    """Per-pair coefficients of the NOMA rate as a function of beam power,
    for realized detection norms (..., M)."""
    an, af, en, ef = _pair_arrays(pairs)
    a = an * en / np.asarray(nv2_near)
    b = np.broadcast_to(af * ef, np.shape(nv2_far)).astype(float)
    cc = np.broadcast_to(an * ef, np.shape(nv2_far)).astype(float)
    d = np.asarray(nv2_far, dtype=float)
    return a, b, cc, d


def cc_powers(pairs, nv2_near, nv2_far, p, inner_iters=60, outer_iters=60):
    """Communication-centric per-realization powers (..., M)."""
    a, b, cc, d = cc_abcd(pairs, nv2_near, nv2_far)
    return cc_allocate(a, b, cc, d, p, inner_iters, outer_iters)


def pair_rates_from_powers(pairs, nv2_near, nv2_far, powers):
    """Sum of near+far rates per pair for realized norms and powers."""
    near, far = instant_rates(nv2_near, nv2_far, pairs, powers)
    return near + far


# ---------------------------------------------------------------------------
# sensing/communication trade-off designs
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ParetoPoint:
    rho: float
    powers: np.ndarray
    sensing_rate: float
    comm_rate: float


def pareto_design(nv2_near, nv2_far, pairs, corr, p, length, rho):
    """Profile-rho point of the sensing/communication rate region.

    Maximizes the common rate R with R_s >= rho R and R_c >= (1 - rho) R
    under the power budget, where R_c is the sample average over the given
    batch of realizations.  The endpoints delegate to the pure designs.
    """
    from scipy.optimize import minimize

    m = corr.eigenvalues.size
    lam = corr.eigenvalues

    def rs(powers):
        return float(sensing_rate(powers, corr, length))

    def rs_grad(powers):
        return (m / length) * (length * lam) / ((1.0 + length * lam * powers) * LN2)

    a, b, cc, d = cc_abcd(pairs, nv2_near, nv2_far)

    def rc(powers):
        rates = np.log2(1.0 + a * powers) + np.log2(
            1.0 + b * powers / (cc * powers + d)
        )
        return float(np.mean(np.sum(rates, axis=-1)))

    def rc_grad(powers):
        g = _cc_grad(np.broadcast_to(powers, a.shape), a, b, cc, d) / LN2
        return np.mean(g.reshape(-1, m), axis=0)

    if rho >= 1.0:
        des = sc_design(corr, p, length)
        return ParetoPoint(1.0, des.powers, rs(des.powers), rc(des.powers))
    if rho <= 0.0:
        pw = cc_powers(pairs, nv2_near, nv2_far, p)
        rates = pair_rates_from_powers(pairs, nv2_near, nv2_far, pw)
        sr = float(np.mean(sensing_rate(pw, corr, length)))
        cr = float(np.mean(np.sum(rates, axis=-1)))
        return ParetoPoint(0.0, np.mean(pw.reshape(-1, m), axis=0), sr, cr)

    p0 = 0.5 * (sc_design(corr, p, length).powers + np.full(m, p / m))
    p0 = np.maximum(p0, 1e-9 * p)
    t0 = min(rs(p0) / rho, rc(p0) / (1.0 - rho))
    x0 = np.concatenate([p0, [t0]])

    def fun(x):
        return -x[-1]

    def jac(x):
        g = np.zeros_like(x)
        g[-1] = -1.0
        return g

    cons = [
        {
            "type": "eq",
            "fun": lambda x: np.sum(x[:m]) - p,
            "jac": lambda x: np.concatenate([np.ones(m), [0.0]]),
        },
        {
            "type": "ineq",
            "fun": lambda x: rs(x[:m]) - rho * x[-1],
            "jac": lambda x: np.concatenate([rs_grad(x[:m]), [-rho]]),
        },
        {
            "type": "ineq",
            "fun": lambda x: rc(x[:m]) - (1.0 - rho) * x[-1],
            "jac": lambda x: np.concatenate([rc_grad(x[:m]), [rho - 1.0]]),
        },
    ]
    bounds = [(0.0, p)] * m + [(0.0, None)]
    res = minimize(
        fun, x0, jac=jac, bounds=bounds, constraints=cons, method="SLSQP",
        options={"maxiter": 300, "ftol": 1e-12},
    )
    pw = np.maximum(res.x[:m], 0.0)
    pw *= p / np.sum(pw)
    return ParetoPoint(float(rho), pw, rs(pw), rc(pw))
