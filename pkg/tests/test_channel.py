import numpy as np
import pytest

from isacsim.channel import (
    STREAM_DOWNLINK,
    STREAM_UPLINK,
    SensingCorrelation,
    SystemConfig,
    UTPair,
    haar_unitary,
    sample_downlink,
    sample_target_response,
    sample_uplink,
    trial_rng,
)


CFG = SystemConfig()


class TestConfig:
    def test_defaults_consistent(self):
        assert CFG.M == CFG.N == 4
        assert CFG.p == pytest.approx(10 ** 2.5)
        assert CFG.deltas == pytest.approx([0.004] * 4)

    def test_pair_validation(self):
        with pytest.raises(ValueError):
            UTPair(alpha_near=0.6, alpha_far=0.4)
        with pytest.raises(ValueError):
            UTPair(alpha_near=0.3, alpha_far=0.8)
        with pytest.raises(ValueError):
            UTPair(pathloss_near=1e-3, pathloss_far=1e-2)

    def test_config_validation(self):
        with pytest.raises(ValueError):
            SystemConfig(M=5, N=4, pairs=tuple(UTPair() for _ in range(5)),
                         eigenvalues=(1, 1, 1, 1, 1))
        with pytest.raises(ValueError):
            SystemConfig(L=2)
        with pytest.raises(ValueError):
            SystemConfig(kappa=1.5)
        with pytest.raises(ValueError):
            SystemConfig(eigenvalues=(1.0, 0.1, 0.0, -0.1))


class TestRngKeying:
    def test_deterministic(self):
        a = trial_rng(7, STREAM_DOWNLINK, 3).standard_normal(5)
        b = trial_rng(7, STREAM_DOWNLINK, 3).standard_normal(5)
        assert np.array_equal(a, b)

    def test_streams_and_trials_differ(self):
        a = trial_rng(7, STREAM_DOWNLINK, 3).standard_normal(5)
        b = trial_rng(7, STREAM_UPLINK, 3).standard_normal(5)
        c = trial_rng(7, STREAM_DOWNLINK, 4).standard_normal(5)
        d = trial_rng(8, STREAM_DOWNLINK, 3).standard_normal(5)
        assert not np.array_equal(a, b)
        assert not np.array_equal(a, c)
        assert not np.array_equal(a, d)


class TestSamplers:
    def test_downlink_shapes_and_determinism(self):
        hn, hf = sample_downlink(CFG, 11, 0)
        assert hn.shape == hf.shape == (4, 4, 4)
        hn2, _ = sample_downlink(CFG, 11, 0)
        assert np.array_equal(hn, hn2)

    def test_unit_entry_variance(self):
        acc = []
        for t in range(2000):
            hn, hf = sample_downlink(CFG, 5, t)
            acc.append(np.mean(np.abs(hn) ** 2))
            acc.append(np.mean(np.abs(hf) ** 2))
        # 2000 trials x 128 entries each ~ 2.5e5 samples per branch
        assert np.mean(acc) == pytest.approx(1.0, abs=0.01)

    def test_uplink_shapes_and_weight_norm(self):
        hn, hf, r = sample_uplink(CFG, 11, 0)
        assert hn.shape == hf.shape == (4, 4, 4)
        assert r.shape == (4, 4)
        assert np.linalg.norm(r, axis=-1) ** 2 == pytest.approx([2.0] * 4, rel=1e-12)

    def test_target_response_covariance(self):
        corr = SensingCorrelation.from_eigenvalues(CFG.eigenvalues, seed=3)
        acc = np.zeros((4, 4), dtype=complex)
        draws = 4000
        for t in range(draws):
            g = sample_target_response(corr, 8, 9, t)
            acc += g.conj().T @ g / 8
        acc /= draws
        assert np.allclose(acc, corr.matrix, atol=0.02)


class TestSensingCorrelation:
    def test_from_eigenvalues_reconstructs(self):
        corr = SensingCorrelation.from_eigenvalues([0.05, 1.0, 0.01, 0.1], seed=2)
        assert corr.eigenvalues == pytest.approx([1.0, 0.1, 0.05, 0.01])
        u = corr.eigenvectors
        assert np.allclose(u @ u.conj().T, np.eye(4), atol=1e-12)
        assert np.allclose(
            (u * corr.eigenvalues) @ u.conj().T, corr.matrix, atol=1e-12
        )

    def test_haar_unitary_is_unitary(self):
        u = haar_unitary(6, np.random.default_rng(0))
        assert np.allclose(u @ u.conj().T, np.eye(6), atol=1e-12)

    def test_from_targets(self):
        corr = SensingCorrelation.from_targets([0.3, -0.5], [1.0, 0.5], 4)
        assert corr.matrix.shape == (4, 4)
        # two point targets -> rank two
        assert np.sum(corr.eigenvalues > 1e-10) == 2
        assert np.trace(corr.matrix).real == pytest.approx(4 * 1.5, rel=1e-12)

    def test_sqrt(self):
        corr = SensingCorrelation.from_eigenvalues([1.0, 0.1, 0.05, 0.01], seed=5)
        s = corr.sqrt()
        assert np.allclose(s @ s.conj().T, corr.matrix, atol=1e-12)

    def test_rejects_non_hermitian(self):
        with pytest.raises(ValueError):
            SensingCorrelation.from_matrix(np.array([[1.0, 1.0], [0.0, 1.0]]))
