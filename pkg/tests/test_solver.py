import itertools

import numpy as np
import pytest

from gengm import objective, solver
from gengm.errors import InvalidInputError
from gengm.model import (
    CovarianceTriplet,
    Dataset,
    ParameterPair,
    RegularizationConfig,
    sample_covariances,
)
from gengm.owlqn import OwlqnSettings
from gengm.simulate import first_diff_structure, gen_scenario, ScenarioSpec, split_train_valid
from gengm.solver import FitSettings, fit, fit_lasso_baseline

import oracles


def small_problem(seed, q=2, p=8, n=200):
    spec = ScenarioSpec(id=3, p=max(p, 30), n_train=n, n_valid=10, seed=seed)
    data = gen_scenario(spec)
    train, _ = split_train_valid(data, n)
    return data, sample_covariances(train)


class TestFit:
    def test_no_predictor_mle(self, rng):
        y = rng.standard_normal((50, 1))
        cov = sample_covariances(Dataset(x=np.zeros((50, 0)), y=y))
        cfg = RegularizationConfig(0.0, 0.0, 0.0, 1.0, np.zeros((0, 0)))
        res = fit(cov, cfg)
        assert res.converged
        assert np.max(np.abs(res.theta_hat.omega_yy - 1.0 / cov.s_yy)) < 1e-6

    def test_oracle_threshold_zeroes_links(self, rng):
        q, p = 2, 5
        x = rng.standard_normal((40, p))
        y = rng.standard_normal((40, q))
        cov = sample_covariances(Dataset(x=x, y=y))
        mu = 2.0 * np.max(np.abs(cov.s_yx)) + 1e-6
        cfg = RegularizationConfig(0.0, mu, 0.0, 1.0, np.eye(p))
        truth = ParameterPair(omega_yy=np.eye(q), omega_yx=np.zeros((q, p)))
        res = fit(cov, cfg, FitSettings(variant="oracle", init=truth))
        assert np.array_equal(res.theta_hat.omega_yx, np.zeros((q, p)))

    def test_descent_and_cone(self):
        data, cov = small_problem(seed=5)
        structure = first_diff_structure(cov.p)
        cfg = RegularizationConfig(0.05, 0.05, 0.5, 2.0, structure)
        res = fit(cov, cfg)
        # monotone objective along the outer iterations, all finite
        assert np.all(np.isfinite(res.trace))
        assert np.all(np.diff(res.trace) <= 1e-10)
        # beats both the truth and the default start
        assert res.objective <= objective.eval_objective(data.truth, cov, cfg) + 1e-9
        assert res.objective <= res.trace[0] + 1e-9
        # result consistency
        assert res.objective == pytest.approx(
            objective.eval_objective(res.theta_hat, cov, cfg), abs=1e-10
        )

    def test_variant_identities(self):
        _, cov = small_problem(seed=9)
        structure = first_diff_structure(cov.p)
        base = RegularizationConfig(0.1, 0.05, 0.0, 2.0, structure)
        a = fit(cov, base, FitSettings(variant="gengm"))
        b = fit(cov, base, FitSettings(variant="gm"))
        assert np.max(np.abs(a.theta_hat.omega_yy - b.theta_hat.omega_yy)) < 1e-8
        assert np.max(np.abs(a.theta_hat.omega_yx - b.theta_hat.omega_yx)) < 1e-8

        spring = RegularizationConfig(0.0, 0.05, 0.8, 1.0, structure)
        c = fit(cov, spring, FitSettings(variant="gengm"))
        d = fit(
            cov,
            RegularizationConfig(0.3, 0.05, 0.8, 1.0, structure),
            FitSettings(variant="spr"),
        )
        assert np.max(np.abs(c.theta_hat.omega_yy - d.theta_hat.omega_yy)) < 1e-8
        assert np.max(np.abs(c.theta_hat.omega_yx - d.theta_hat.omega_yx)) < 1e-8

    def test_tiny_instance_beats_grid(self):
        rng = np.random.default_rng(2)
        for seed in range(3):
            x = np.random.default_rng(seed).standard_normal((30, 2))
            b_true = np.array([[0.8], [-0.4]])
            y = x @ b_true + 0.5 * np.random.default_rng(seed + 100).standard_normal((30, 1))
            cov = sample_covariances(Dataset(x=x, y=y))
            cfg = RegularizationConfig(0.0, 0.05, 0.3, 2.0, np.eye(2))
            res = fit(cov, cfg, FitSettings(epsilon=1e-6))
            grid_best = np.inf
            for oyy in np.linspace(0.1, 4.0, 41):
                for w1 in np.linspace(-2.0, 2.0, 41):
                    for w2 in np.linspace(-2.0, 2.0, 41):
                        val = objective.eval_objective_matrices(
                            np.array([[oyy]]), np.array([[w1, w2]]), cov, cfg
                        )
                        grid_best = min(grid_best, val)
            assert res.objective <= grid_best + 1e-6

    def test_oracle_requires_init(self):
        _, cov = small_problem(seed=1)
        cfg = RegularizationConfig(0.0, 0.1, 0.0, 1.0, first_diff_structure(cov.p))
        with pytest.raises(InvalidInputError):
            fit(cov, cfg, FitSettings(variant="oracle"))

    def test_unknown_variant(self):
        with pytest.raises(InvalidInputError):
            FitSettings(variant="ridge")


class TestLassoBaseline:
    def test_zero_solution_threshold(self, rng):
        x = rng.standard_normal((40, 6))
        y = rng.standard_normal((40, 2))
        mu = np.max(np.abs(x.T @ y / 40)) + 1e-9
        b = fit_lasso_baseline(Dataset(x=x, y=y), mu)
        assert np.array_equal(b, np.zeros((6, 2)))

    def test_unpenalized_limit(self, rng):
        x = rng.standard_normal((50, 4))
        y = rng.standard_normal((50, 2))
        b = fit_lasso_baseline(Dataset(x=x, y=y), 0.0, OwlqnSettings(grad_tol=1e-10))
        ls = np.linalg.lstsq(x, y, rcond=None)[0]
        assert np.max(np.abs(b - ls)) < 1e-6

    def test_scalar_soft_threshold(self, rng):
        x = rng.standard_normal((80, 1))
        x /= np.sqrt(np.mean(x**2))  # unit second moment
        y = 1.3 * x + 0.1 * rng.standard_normal((80, 1))
        mu = 0.4
        b = fit_lasso_baseline(Dataset(x=x, y=y), mu, OwlqnSettings(grad_tol=1e-10))
        rho = float(x[:, 0] @ y[:, 0]) / 80
        expected = np.sign(rho) * max(abs(rho) - mu, 0.0)
        assert b[0, 0] == pytest.approx(expected, abs=1e-7)

    def test_kkt_residual(self, rng):
        x = rng.standard_normal((60, 10))
        y = rng.standard_normal((60, 3))
        mu = 0.1
        b = fit_lasso_baseline(Dataset(x=x, y=y), mu, OwlqnSettings(grad_tol=1e-8))
        assert oracles.kkt_residual_lasso(x, y, b, mu) <= 1e-5
