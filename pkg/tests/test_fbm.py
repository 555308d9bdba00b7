import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fbmcast.fbm import (
    EmbeddingError,
    FbmPath,
    derive_seed,
    embedding_size,
    fgn_autocovariance,
    generate_fbm,
    generate_fgn,
    write_path_csv,
)
from oracles import cholesky_fgn, fgn_cov_matrix, ols_slope

hurst_values = st.floats(0.01, 0.99)


class TestAutocovariance:
    @given(hurst_values)
    def test_unit_variance(self, h):
        assert fgn_autocovariance(0, h) == 1.0

    @pytest.mark.parametrize("k", [1, 2, 7, 100])
    def test_brownian_increments_uncorrelated(self, k):
        assert fgn_autocovariance(k, 0.5) == 0.0

    def test_lag_one_h07(self):
        # 2^{0.4} - 1
        assert fgn_autocovariance(1, 0.7) == pytest.approx(0.3195079107728942, rel=1e-14)

    @pytest.mark.parametrize("h", [0.2, 0.5, 0.8])
    def test_matches_fbm_covariance_route(self, h):
        cov = fgn_cov_matrix(12, h)
        np.testing.assert_allclose(fgn_autocovariance(np.arange(12), h), cov[0], atol=1e-12)

    @given(hurst_values, st.integers(1, 10_000))
    def test_sign_by_regime(self, h, k):
        g = fgn_autocovariance(k, h)
        if h > 0.5:
            assert g > 0
        elif h < 0.5:
            assert g < 0

    @pytest.mark.parametrize("h", [0.0, 1.0, -0.1, 1.5])
    def test_rejects_bad_hurst(self, h):
        with pytest.raises(ValueError):
            fgn_autocovariance(1, h)


class TestGenerateFgn:
    def test_single_draw_is_standard_normal(self):
        draws = np.array([generate_fgn(1, 0.8, s)[0] for s in range(20_000)])
        assert abs(draws.mean()) < 4 / np.sqrt(draws.size)
        assert abs(draws.var() - 1) < 4 * np.sqrt(2 / draws.size)

    @given(st.integers(1, 300), hurst_values, st.integers(0, 2**64 - 1))
    @settings(max_examples=40, deadline=None)
    def test_deterministic(self, n, h, seed):
        a = generate_fgn(n, h, seed)
        b = generate_fgn(n, h, seed)
        assert a.shape == (n,)
        assert np.array_equal(a, b)

    def test_seeds_differ(self):
        assert not np.array_equal(generate_fgn(16, 0.6, 1), generate_fgn(16, 0.6, 2))

    def test_embedding_size(self):
        assert [embedding_size(n) for n in (1, 2, 3, 5, 187, 1024)] == [1, 2, 4, 8, 512, 2048]

    def test_h05_independent(self):
        x = np.concatenate([generate_fgn(1000, 0.5, s) for s in range(1000)])
        lag1 = np.mean(x[:-1] * x[1:])
        assert abs(lag1) < 3 / np.sqrt(x.size)

    @pytest.mark.slow
    def test_h07_autocovariance(self):
        n, paths = 1024, 200
        per_path = np.array([
            [np.mean(x[: n - k] * x[k:]) for k in range(6)]
            for x in (generate_fgn(n, 0.7, 10_000 + s) for s in range(paths))
        ])
        est = per_path.mean(axis=0)
        se = per_path.std(axis=0, ddof=1) / np.sqrt(paths)
        expected = fgn_autocovariance(np.arange(6), 0.7)
        assert np.all(np.abs(est - expected) <= 3 * se)

    def test_extreme_hurst_still_embeds(self):
        # fGn circulant embeddings are non-negative for every h; nothing should raise.
        for h in (0.01, 0.99):
            assert np.all(np.isfinite(generate_fgn(4096, h, 0)))

    def test_negative_eigenvalue_raises(self, monkeypatch):
        import fbmcast.fbm as mod

        def not_psd(k, h):
            # gamma(1) > gamma(0) cannot be a covariance
            k = np.asarray(k)
            return np.select([k == 0, k == 1], [1.0, 2.0], 0.0)

        mod._sqrt_eigenvalues.cache_clear()
        monkeypatch.setattr(mod, "fgn_autocovariance", not_psd)
        try:
            with pytest.raises(EmbeddingError):
                generate_fgn(8, 0.7, 0)
        finally:
            mod._sqrt_eigenvalues.cache_clear()

    @pytest.mark.parametrize("n", [0, -3])
    def test_bad_length(self, n):
        with pytest.raises(ValueError):
            generate_fgn(n, 0.5, 0)


def test_small_n_matches_cholesky_oracle():
    n, h, draws = 6, 0.3, 20_000
    x = np.array([generate_fgn(n, h, s) for s in range(draws)])
    y = cholesky_fgn(n, h, draws, np.random.default_rng(7))
    sample_x = x.T @ x / draws
    sample_y = y.T @ y / draws
    sigma = fgn_cov_matrix(n, h)
    se = np.sqrt((np.outer(np.diag(sigma), np.diag(sigma)) + sigma**2) / draws)
    assert np.all(np.abs(sample_x - sample_y) <= 3 * np.sqrt(2) * se + 1e-12)


class TestGenerateFbm:
    def test_single_step(self):
        p = generate_fbm(1, 0.4, 99)
        assert p.values[0] == 0.0
        assert p.values[1] == generate_fgn(1, 0.4, 99)[0]
        assert p.horizon == 1

    @given(st.integers(1, 200), hurst_values, st.integers(0, 2**32))
    @settings(max_examples=30, deadline=None)
    def test_path_invariants(self, t, h, seed):
        p = generate_fbm(t, h, seed)
        assert p.values.size == t + 1
        assert p.values[0] == 0.0
        np.testing.assert_array_equal(p.values[1:], np.cumsum(generate_fgn(t, h, seed)))

    def test_immutable(self):
        with pytest.raises(ValueError):
            generate_fbm(4, 0.5, 0).values[1] = 3.0

    @pytest.mark.parametrize("h, t, expected", [(0.5, 100, 100.0), (0.7, 64, 337.7940251578608)])
    def test_terminal_variance(self, h, t, expected):
        ends = np.array([generate_fbm(t, h, derive_seed(5, i)).values[-1] for i in range(10_000)])
        var = np.mean(ends**2)
        se = expected * np.sqrt(2 / ends.size)
        assert abs(var - expected) <= 3 * se

    def test_self_similarity_slope(self):
        ts = np.array([8, 16, 32, 64])
        paths = np.array([generate_fbm(64, 0.7, derive_seed(11, i)).values for i in range(10_000)])
        var = np.mean(paths[:, ts] ** 2, axis=0)
        assert ols_slope(np.log(ts), np.log(var)) == pytest.approx(1.4, abs=0.1)

    def test_rejects_nonzero_start(self):
        with pytest.raises(ValueError):
            FbmPath(0.5, np.array([1.0, 2.0]))


def test_derive_seed_distinct_and_stable():
    seeds = [derive_seed(42, i) for i in range(1000)]
    assert len(set(seeds)) == 1000
    assert seeds == [derive_seed(42, i) for i in range(1000)]
    assert derive_seed(42, 0) != derive_seed(43, 0)
    assert all(0 <= s < 2**64 for s in seeds)


def test_path_dump(tmp_path):
    p = generate_fbm(3, 0.6, 1)
    write_path_csv(p, tmp_path / "p.csv")
    rows = (tmp_path / "p.csv").read_text().splitlines()
    assert rows[0] == "t,value"
    assert rows[1] == "0,0.0"
    assert [float(r.split(",")[1]) for r in rows[1:]] == list(p.values)
