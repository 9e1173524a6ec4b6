from __future__ import annotations

import numpy as np
import pytest

from gcc_reserving import ClaimsTriangle, ConfigError, SimulationError, cl_predict, fit_cl
from gcc_reserving import simulator
from gcc_reserving.gcc import GccInput, alpha_weights
from gcc_reserving.triangle import observed_mask
from gcc_reserving.simulator import (
    SimConfig,
    draw_positive,
    format_config,
    parse_config,
    run_study,
    simulate_square,
    simulate_triangle,
)

N_LLN = 100_000


@pytest.fixture(scope="module")
def cfg():
    return SimConfig.wuthrich_merz_like(replications=200, seed=11)


@pytest.fixture(scope="module")
def squares(cfg):
    return simulate_square(cfg, np.random.default_rng(1), size=N_LLN)


def noiseless(**kw):
    return SimConfig.wuthrich_merz_like(sigma2=(0.0,) * 9, **kw)


def within_3se(samples, target):
    se = samples.std(ddof=1, axis=0) / np.sqrt(samples.shape[0])
    return np.abs(samples.mean(axis=0) - target) <= 3 * se


class TestDraws:
    @pytest.mark.parametrize("family", ["gamma", "lognormal"])
    def test_moments(self, family):
        rng = np.random.default_rng(5)
        x = draw_positive(rng, np.full(N_LLN, 50.0), 400.0, family)
        assert np.all(x > 0)
        assert within_3se(x, 50.0)
        v = (x - 50.0) ** 2
        assert within_3se(v, 400.0)

    def test_zero_variance_exact(self):
        x = draw_positive(np.random.default_rng(0), np.array([1.5, 2.5]), 0.0, "gamma")
        assert x.tolist() == [1.5, 2.5]


class TestSimulate:
    def test_shapes(self, cfg):
        square, tri = simulate_triangle(cfg, np.random.default_rng(0))
        assert square.shape == (10, 10)
        assert isinstance(tri, ClaimsTriangle)
        obs = ~np.isnan(tri.values)
        np.testing.assert_array_equal(tri.values[obs], square[obs])

    def test_noiseless_development_is_cl(self):
        square, tri = simulate_triangle(noiseless(), np.random.default_rng(3))
        pred = cl_predict(tri, fit_cl(tri).f_hat)
        np.testing.assert_allclose(pred.ultimates, square[:, -1], rtol=1e-12)

    def test_seeded(self, cfg):
        a = simulate_square(cfg, np.random.default_rng(9))
        b = simulate_square(cfg, np.random.default_rng(9))
        np.testing.assert_array_equal(a, b)

    def test_development_ratios(self, cfg, squares):
        ratios = squares[:, :, 1:] / squares[:, :, :-1]
        # every year and period, conditional mean f_j
        ok = within_3se(ratios.reshape(N_LLN, -1), np.tile(cfg.factors, cfg.I))
        assert ok.mean() > 0.97
        assert np.all(within_3se(ratios[:, 0, :], np.array(cfg.factors)))

    def test_individual_kappa_unbiased(self, cfg, squares):
        d = cfg.J - np.arange(cfg.I)
        diag = squares[:, np.arange(cfg.I), d]
        kappa = diag / (cfg.beta[d] * np.array(cfg.premiums))
        assert np.all(within_3se(kappa, cfg.kappa))

    @pytest.mark.parametrize("lam", [0.0, 0.5, 1.0])
    def test_gcc_kappa_unbiased(self, cfg, squares, lam):
        d = cfg.J - np.arange(cfg.I)
        diag = squares[:, np.arange(cfg.I), d]
        kappa = diag / (cfg.beta[d] * np.array(cfg.premiums))
        tri = ClaimsTriangle(np.where(observed_mask(cfg.I), squares[0], np.nan))
        alpha = alpha_weights(GccInput(tri, cfg.premiums, cfg.beta, lam))
        assert np.all(within_3se(kappa @ alpha.T, cfg.kappa))

    @pytest.mark.filterwarnings("ignore:overflow:RuntimeWarning")
    def test_infeasible_parameters(self):
        bad = SimConfig.wuthrich_merz_like(factors=(1e300,) * 9)
        with pytest.raises(ConfigError, match="cell"):
            simulate_square(bad, np.random.default_rng(0))


class TestStudy:
    def test_replication_count(self, cfg):
        study = run_study(cfg)
        assert study.replications == 200
        assert study.predicted_ultimate.shape == (200, 3)
        assert study.kappa_gcc_true_beta.shape == (200, 3, 10)
        assert study.redraws == 0

    def test_deterministic(self, cfg):
        a, b = run_study(cfg), run_study(cfg)
        np.testing.assert_array_equal(a.predicted_ultimate, b.predicted_ultimate)
        np.testing.assert_array_equal(a.rmsep, b.rmsep)

    def test_worker_count_irrelevant(self):
        small = SimConfig.wuthrich_merz_like(replications=40, seed=3)
        a, b = run_study(small, workers=1), run_study(small, workers=3)
        np.testing.assert_array_equal(a.realized_ultimate, b.realized_ultimate)
        np.testing.assert_array_equal(a.predicted_ultimate, b.predicted_ultimate)
        np.testing.assert_array_equal(a.rmsep, b.rmsep)

    def test_seed_changes_output(self):
        a = run_study(SimConfig.wuthrich_merz_like(replications=5, seed=1))
        b = run_study(SimConfig.wuthrich_merz_like(replications=5, seed=2))
        assert not np.array_equal(a.realized_ultimate, b.realized_ultimate)

    def test_noiseless_cl(self):
        study = run_study(noiseless(replications=30), lambdas=[0.0])
        scale = study.realized_ultimate.mean()
        # exact up to floating rounding in the fitted factors
        assert study.empirical_rmse[0] < 1e-12 * scale
        assert study.mean_rmsep[0] < 1e-6 * scale

    def test_noiseless_gcc(self):
        # identical claims ratios in every year: every lambda predicts exactly
        study = run_study(noiseless(replications=10, initial_cv=0.0), lambdas=[0.0, 0.3, 1.0])
        scale = study.realized_ultimate.mean()
        assert np.all(study.empirical_rmse < 1e-12 * scale)

    @pytest.mark.slow
    def test_kappa_cc_unbiased(self):
        study = run_study(SimConfig.wuthrich_merz_like(replications=2000, seed=5), lambdas=[0.0])
        mean, se = study.kappa_cc_summary()
        assert abs(mean - 0.68) <= 3 * se

    def test_small_shape_refused(self):
        cfg = SimConfig(factors=(1.5, 1.1), sigma2=(1.0, 1.0), premiums=(1, 1, 1), kappa=0.7)
        with pytest.raises(ConfigError):
            run_study(cfg)


def corrupting(rate):
    original = simulator.simulate_square

    def fake(cfg, rng, size=None):
        square = original(cfg, rng, size)
        if rng.random() < rate:
            square[0, 0] = -1.0
        return square

    return fake


class TestRedraws:
    def test_counted(self, monkeypatch):
        monkeypatch.setattr(simulator, "simulate_square", corrupting(0.03))
        study = run_study(SimConfig.wuthrich_merz_like(replications=100, seed=8), lambdas=[0.0])
        assert 0 < study.redraws <= 10

    def test_abort(self, monkeypatch):
        monkeypatch.setattr(simulator, "simulate_square", corrupting(0.5))
        with pytest.raises(SimulationError, match="10%"):
            run_study(SimConfig.wuthrich_merz_like(replications=50, seed=8), lambdas=[0.0])


class TestConfig:
    def test_round_trip(self, cfg):
        assert parse_config(format_config(cfg)) == cfg

    def test_defaults(self):
        cfg = parse_config(
            "[simulation]\nfactors = 1.5, 1.2, 1.1\nsigma2 = 1, 1, 1\n"
            "premiums = 10 10 10 10\nkappa = 0.8\n"
        )
        assert cfg.I == 4 and cfg.family == "gamma" and cfg.replications == 10_000

    @pytest.mark.parametrize(
        "text",
        [
            "factors = 1.5\n",
            "[simulation]\nfactors = 1.5, 1.2\nsigma2 = 1, 1\npremiums = 1 1 1\n",
            "[simulation]\nfactors = 1.5, 1.2\nsigma2 = 1, 1\npremiums = 1 1 1\nkappa = 0.5\nfamily = pareto\n",
            "[simulation]\nfactors = 1.5, 1.2\nsigma2 = 1, 1\npremiums = 1 1 1\nkappa = 0.5\ncolour = red\n",
            "[simulation]\nfactors = 1.5, 1.2\nsigma2 = 1, 1\npremiums = 1 1\nkappa = 0.5\n",
            "[simulation]\nfactors = 1.5, -1.2\nsigma2 = 1, 1\npremiums = 1 1 1\nkappa = 0.5\n",
            "[simulation]\nfactors = 1.5, 1.2\nsigma2 = 1, 1\npremiums = 1 1 1\nkappa = x\n",
            "[simulation]\nI = 5\nfactors = 1.5, 1.2\nsigma2 = 1, 1\npremiums = 1 1 1\nkappa = 0.5\n",
            "[simulation]\nfactors = 1.5, 1.2\nsigma2 = 1, 1\npremiums = 1 1 1\nkappa = 0.5\nreplications = 0\n",
            "[simulation]\nfactors = 1.5, 1.2\nsigma2 = 1, 1\npremiums = 1 1 1\nkappa = 0.5\nlambdas = 0, 2\n",
        ],
    )
    def test_errors(self, text):
        with pytest.raises(ConfigError):
            parse_config(text)
