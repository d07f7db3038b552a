"""Special functions and small solvers shared by the rate analysis.

Contains the negative-argument exponential integral (the building block of
every ergodic-rate expression over Rayleigh fading), the classical
water-filling allocator, and the distribution of the largest eigenvalue of
a complex Wishart matrix.
"""

import numpy as np
from dataclasses import dataclass
from scipy import special as sp

EULER_GAMMA = 0.5772156649015328606
LN2 = np.log(2.0)

_SERIES_CUTOFF = 6.0


def _ei_series(x):
    # Ei(x) = gamma + ln|x| + sum_k x^k / (k k!), converges fast for |x| <= 6
    total = EULER_GAMMA + np.log(np.abs(x))
    term = 1.0
    for k in range(1, 200):
        term *= x / k
        delta = term / k
        total += delta
        if np.abs(delta) <= 1e-17 * max(np.abs(total), 1e-300):
            break
    return total


def _e1_cf_scaled(z):
    # e^z E1(z) for z > 0 via the continued fraction
    #   E1(z) = e^{-z} / (z + 1 - 1/(z + 3 - 4/(z + 5 - 9/(...))))
    # evaluated with the modified Lentz algorithm.  Returns the scaled value,
    # which stays well inside double range for any z.
    tiny = 1e-300
    b = z + 1.0
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for k in range(1, 300):
        a = -k * k
        b += 2.0
        d = 1.0 / (a * d + b)
        c = b + a / c
        if c == 0.0:
            c = tiny
        delta = c * d
        h *= delta
        if abs(delta - 1.0) < 1e-16:
            break
    return h


def expint_ei(x):
    """Exponential integral Ei(x) for x < 0.

    Power series on [-6, 0), continued fraction below -6.
    """
    x = float(x)
    if x >= 0.0:
        raise ValueError("expint_ei is implemented for negative arguments only")
    if x >= -_SERIES_CUTOFF:
        return _ei_series(x)
    # Ei(x) = -E1(-x) = -e^{x} * [e^{-x} E1(-x)]
    return -np.exp(x) * _e1_cf_scaled(-x)


def e1_scaled(z):
    """e^z E1(z) for z > 0, computed without overflow."""
    z = float(z)
    if z <= 0.0:
        raise ValueError("e1_scaled requires z > 0")
    if z > _SERIES_CUTOFF:
        return _e1_cf_scaled(z)
    return -np.exp(z) * _ei_series(-z)


def rate_integral_exp(a):
    """E{log2(1 + a X)} for X ~ Exp(1):  -(1/ln 2) e^{1/a} Ei(-1/a).

    Vectorized over `a`; a = 0 maps to 0.
    """
    a = np.asarray(a, dtype=float)
    out = np.zeros_like(a)
    it = np.nditer(a, flags=["multi_index"])
    for v in it:
        v = float(v)
        if v < 0.0:
            raise ValueError("rate_integral_exp requires a >= 0")
        if v > 0.0:
            out[it.multi_index] = e1_scaled(1.0 / v) / LN2
    if out.ndim == 0:
        return float(out)
    return out


def rate_integral_exp_asymptote(a):
    """High-gain approximation log2(a) - gamma/ln 2 of rate_integral_exp."""
    a = np.asarray(a, dtype=float)
    return np.log2(a) - EULER_GAMMA / LN2


@dataclass(frozen=True)
class WaterFillSolution:
    allocation: np.ndarray
    multiplier: float
    objective: float
    degenerate: bool = False


def water_fill(gains, budget):
    """Maximize sum log2(1 + g_m s_m) subject to sum s_m <= budget, s >= 0.

    Bisection on the water level, then an exact refinement on the final
    active set so the KKT residual is at machine precision.
    """
    g = np.asarray(gains, dtype=float)
    if np.any(g < 0.0):
        raise ValueError("gains must be nonnegative")
    if budget < 0.0:
        raise ValueError("budget must be nonnegative")
    pos = g > 0.0
    if budget == 0.0 or not np.any(pos):
        zero = np.zeros_like(g)
        return WaterFillSolution(zero, np.inf, 0.0, degenerate=bool(budget > 0.0))
    inv = np.where(pos, 1.0 / np.where(pos, g, 1.0), np.inf)
    lo, hi = 0.0, budget + float(np.min(inv[pos]))
    for _ in range(200):
        w = 0.5 * (lo + hi)
        used = np.sum(np.maximum(0.0, w - inv[pos]))
        if used > budget:
            hi = w
        else:
            lo = w
        if hi - lo <= 1e-13 * max(1.0, hi):
            break
    w = 0.5 * (lo + hi)
    active = pos & (w - inv > 0.0)
    if not np.any(active):
        active = pos & (inv == np.min(inv[pos]))
    w = (budget + np.sum(inv[active])) / np.count_nonzero(active)
    s = np.where(active, np.maximum(0.0, w - inv), 0.0)
    obj = float(np.sum(np.log2(1.0 + g * s)))
    return WaterFillSolution(s, 1.0 / w, obj)


class WishartMaxEig:
    """Largest eigenvalue of W = H H^H with H an m x n standard complex
    Gaussian matrix (m <= n).

    cdf(x) = det[ gamma_low(n - m + i + j - 1, x) ]_{i,j=1..m} / K,
    K = prod_{k=1}^m Gamma(n - k + 1) Gamma(m - k + 1),
    where gamma_low is the lower incomplete gamma function.  The pdf is the
    exact row-wise derivative of that determinant.
    """

    def __init__(self, m, n):
        if not (1 <= m <= n):
            raise ValueError("requires 1 <= m <= n")
        self.m = int(m)
        self.n = int(n)
        k = np.arange(1, self.m + 1)
        self._log_k = np.sum(sp.gammaln(self.n - k + 1) + sp.gammaln(self.m - k + 1))
        i = np.arange(1, self.m + 1)[:, None]
        j = np.arange(1, self.m + 1)[None, :]
        self._orders = (self.n - self.m + i + j - 1).astype(float)

    def _psi(self, x):
        # unregularized lower incomplete gamma at every matrix position
        return sp.gammainc(self._orders, x) * np.exp(sp.gammaln(self._orders))

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        scalar = x.ndim == 0
        x = np.atleast_1d(x)
        out = np.empty(x.shape)
        for idx, xv in np.ndenumerate(x):
            if xv <= 0.0:
                out[idx] = 0.0
                continue
            psi = self._psi(xv)
            out[idx] = np.linalg.det(psi) * np.exp(-self._log_k)
        out = np.clip(out, 0.0, 1.0)
        return float(out[0]) if scalar else out

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        scalar = x.ndim == 0
        x = np.atleast_1d(x)
        out = np.empty(x.shape)
        for idx, xv in np.ndenumerate(x):
            if xv <= 0.0:
                out[idx] = 0.0
                continue
            psi = self._psi(xv)
            # d gamma_low(a, x)/dx = x^{a-1} e^{-x}; differentiate one row at
            # a time and sum the determinants
            dpsi = np.exp((self._orders - 1.0) * np.log(xv) - xv)
            total = 0.0
            for r in range(self.m):
                mat = psi.copy()
                mat[r] = dpsi[r]
                total += np.linalg.det(mat)
            out[idx] = max(total * np.exp(-self._log_k), 0.0)
        return float(out[0]) if scalar else out

    def sample(self, size, rng):
        """Draw largest eigenvalues by direct simulation."""
        h = rng.standard_normal((size, self.m, self.n)) + 1j * rng.standard_normal(
            (size, self.m, self.n)
        )
        h *= np.sqrt(0.5)
        w = h @ h.conj().swapaxes(-1, -2)
        return np.linalg.eigvalsh(w)[..., -1]
