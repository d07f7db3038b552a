"""System configuration, sensing correlation models, and fading samplers.

Random draws are keyed by (seed, stream tag, trial index) so every trial is
reproducible in isolation and batches can be generated in any order.
"""

import numpy as np
from dataclasses import dataclass, field

STREAM_DOWNLINK = 1
STREAM_UPLINK = 2
STREAM_TARGET = 3
STREAM_DESIGN = 4


def trial_rng(seed, stream, trial):
    """Independent generator for one Monte Carlo trial of one stream."""
    ss = np.random.SeedSequence(int(seed), spawn_key=(int(stream), int(trial)))
    return np.random.default_rng(ss)


def _cgauss(rng, shape):
    z = rng.standard_normal(shape + (2,))
    return np.sqrt(0.5) * (z[..., 0] + 1j * z[..., 1])


@dataclass(frozen=True)
class UTPair:
    """One near/far user-terminal pair served by a shared beam.

    Power split coefficients sum to one with the far (weak) UT taking the
    larger share; path losses are linear-scale inverse losses (eta^{-1}).
    """

    alpha_near: float = 0.2
    alpha_far: float = 0.8
    pathloss_near: float = 1e-2
    pathloss_far: float = 2.5e-3
    target_rate_near: float = 1.0
    target_rate_far: float = 1.0
    target_rate_pair: float = 2.0

    def __post_init__(self):
        if not (0.0 < self.alpha_near < self.alpha_far < 1.0):
            raise ValueError("need 0 < alpha_near < alpha_far < 1")
        if abs(self.alpha_near + self.alpha_far - 1.0) > 1e-12:
            raise ValueError("power split coefficients must sum to 1")
        if min(self.pathloss_near, self.pathloss_far) <= 0.0:
            raise ValueError("path losses must be positive")
        if self.pathloss_near < self.pathloss_far:
            raise ValueError("near UT must have the weaker path loss (larger eta^{-1})")

    @property
    def delta(self):
        """alpha_m eta_m^{-1} + alpha_m' eta_m'^{-1}, the pair's uplink gain."""
        return self.alpha_near * self.pathloss_near + self.alpha_far * self.pathloss_far


def _default_pairs():
    return tuple(UTPair() for _ in range(4))


@dataclass(frozen=True)
class SystemConfig:
    """Static system parameters shared by every experiment."""

    M: int = 4
    N: int = 4
    L: int = 30
    pairs: tuple = field(default_factory=_default_pairs)
    eigenvalues: tuple = (1.0, 0.1, 0.05, 0.01)
    kappa: float = 0.5
    mu: float = 0.5
    p_db: float = 25.0
    pc_db: float = 25.0
    ps_db: float = 10.0
    trials: int = 10_000
    seed: int = 2024

    def __post_init__(self):
        if not (1 <= self.M <= self.N):
            raise ValueError("need 1 <= M <= N")
        if self.L < self.M:
            raise ValueError("need L >= M sensing slots")
        if len(self.pairs) != self.M:
            raise ValueError("need one UT pair per transmit antenna")
        if len(self.eigenvalues) != self.M:
            raise ValueError("need M sensing correlation eigenvalues")
        if any(e <= 0 for e in self.eigenvalues):
            raise ValueError("sensing eigenvalues must be positive")
        if not (0.0 <= self.kappa <= 1.0 and 0.0 <= self.mu <= 1.0):
            raise ValueError("FDSAC splits must lie in [0, 1]")
        if self.trials < 1:
            raise ValueError("need at least one trial")

    @property
    def p(self):
        return 10.0 ** (self.p_db / 10.0)

    @property
    def pc(self):
        return 10.0 ** (self.pc_db / 10.0)

    @property
    def ps(self):
        return 10.0 ** (self.ps_db / 10.0)

    @property
    def deltas(self):
        return np.array([pr.delta for pr in self.pairs])


def haar_unitary(dim, rng):
    """Haar-distributed unitary via phase-fixed QR of a Ginibre matrix."""
    q, r = np.linalg.qr(_cgauss(rng, (dim, dim)))
    d = np.diagonal(r)
    return q * (d / np.abs(d))


@dataclass(frozen=True)
class SensingCorrelation:
    """Spatial correlation R of the target response, R = U diag(lam) U^H
    with eigenvalues sorted in decreasing order."""

    matrix: np.ndarray
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @classmethod
    def from_matrix(cls, r):
        r = np.asarray(r, dtype=complex)
        if r.ndim != 2 or r.shape[0] != r.shape[1]:
            raise ValueError("correlation must be square")
        if not np.allclose(r, r.conj().T, atol=1e-10):
            raise ValueError("correlation must be Hermitian")
        lam, u = np.linalg.eigh(r)
        if lam.min() < -1e-10 * max(1.0, lam.max()):
            raise ValueError("correlation must be positive semidefinite")
        order = np.argsort(lam)[::-1]
        return cls(r, np.maximum(lam[order], 0.0), u[:, order])

    @classmethod
    def from_eigenvalues(cls, eigenvalues, seed=0):
        lam = np.sort(np.asarray(eigenvalues, dtype=float))[::-1]
        if lam[-1] < 0:
            raise ValueError("eigenvalues must be nonnegative")
        u = haar_unitary(lam.size, np.random.default_rng(np.random.SeedSequence(seed)))
        r = (u * lam) @ u.conj().T
        return cls(r, lam, u)

    @classmethod
    def from_targets(cls, angles, strengths, m):
        """Rank-limited correlation from point targets at the given angles
        (radians) with the given reflection strengths, half-wavelength ULA."""
        angles = np.asarray(angles, dtype=float)
        strengths = np.asarray(strengths, dtype=float)
        if angles.shape != strengths.shape:
            raise ValueError("one strength per angle")
        if np.any(strengths < 0):
            raise ValueError("strengths must be nonnegative")
        k = np.arange(m)[:, None]
        b = np.exp(1j * np.pi * k * np.sin(angles)[None, :])  # (m, targets)
        r = (b.conj() * strengths) @ b.T
        return cls.from_matrix(r)

    def sqrt(self):
        return (self.eigenvectors * np.sqrt(self.eigenvalues)) @ self.eigenvectors.conj().T


def sample_downlink(config, seed, trial):
    """Fading matrices for one downlink trial.

    Returns (h_near, h_far), each (M, N, M): per pair, the N x M channel
    from the BS to that UT with unit-variance entries.
    """
    rng = trial_rng(seed, STREAM_DOWNLINK, trial)
    h = _cgauss(rng, (config.M, 2, config.N, config.M))
    return h[:, 0], h[:, 1]


def sample_uplink(config, seed, trial):
    """Fading and random null-space weights for one uplink trial.

    Returns (h_near, h_far, r) with h_* of shape (M, M, N) (BS receive side)
    and r of shape (M, 2N - M) complex, normalized so ||r||^2 = 2 per pair.
    """
    rng = trial_rng(seed, STREAM_UPLINK, trial)
    h = _cgauss(rng, (config.M, 2, config.M, config.N))
    r = _cgauss(rng, (config.M, 2 * config.N - config.M))
    r *= np.sqrt(2.0) / np.linalg.norm(r, axis=-1, keepdims=True)
    return h[:, 0], h[:, 1], r


def sample_target_response(corr, rows, seed, trial):
    """Rows-by-M target response draw with row covariance R (for checks of
    the sensing-side statistics)."""
    rng = trial_rng(seed, STREAM_TARGET, trial)
    g = _cgauss(rng, (rows, corr.matrix.shape[0]))
    return g @ corr.sqrt()
