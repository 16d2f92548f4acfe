import numpy as np
import pytest

from gengm.errors import InvalidInputError
from gengm.model import to_regression, from_regression
from gengm.simulate import (
    ScenarioSpec,
    ar_covariance,
    first_diff_structure,
    gen_scenario,
    gen_weather_like,
    rng_for,
    split_train_valid,
)
from gengm import linalg

import oracles


class TestFirstDiffStructure:
    def test_three_by_three_pattern(self):
        expected = 0.5 * np.array(
            [[1.0, -1.0, 0.0], [-1.0, 2.0, -1.0], [0.0, -1.0, 1.0]]
        )
        assert np.array_equal(first_diff_structure(3), expected)

    def test_constant_vector_in_kernel(self):
        for p in (2, 5, 17):
            m = first_diff_structure(p)
            lo, _ = linalg.eig_extremes(m)
            assert abs(lo) < 1e-10
            assert np.max(np.abs(m @ np.ones(p))) < 1e-12

    def test_quadratic_form_telescopes(self, rng):
        m = first_diff_structure(9)
        for _ in range(10):
            u = rng.standard_normal(9)
            assert float(u @ m @ u) == pytest.approx(
                oracles.first_diff_quadratic(u), rel=1e-12
            )

    def test_too_small(self):
        with pytest.raises(InvalidInputError):
            first_diff_structure(1)


class TestArCovariance:
    def test_pair_example(self):
        assert np.array_equal(ar_covariance(2, 0.5), [[1.0, 0.5], [0.5, 1.0]])

    def test_zero_correlation(self):
        assert np.array_equal(ar_covariance(4, 0.0), np.eye(4))

    def test_precision_is_tridiagonal(self):
        r = ar_covariance(3, 0.5)
        prec = np.linalg.inv(r)
        assert np.max(np.abs(prec - oracles.ar1_precision(3, 0.5))) < 1e-10
        assert abs(prec[0, 2]) < 1e-10

    def test_rejects_unit_correlation(self):
        with pytest.raises(InvalidInputError):
            ar_covariance(2, 1.0)


class TestScenarios:
    def test_spec_validation(self):
        with pytest.raises(InvalidInputError):
            ScenarioSpec(id=4)
        with pytest.raises(InvalidInputError):
            ScenarioSpec(id=3, p=29)
        with pytest.raises(InvalidInputError):
            ScenarioSpec(id=1, p=11)

    def test_reproducible(self):
        spec = ScenarioSpec(id=2, p=20, n_train=30, n_valid=10, seed=123)
        a = gen_scenario(spec)
        b = gen_scenario(spec)
        assert np.array_equal(a.x, b.x)
        assert np.array_equal(a.y, b.y)
        assert np.array_equal(a.truth.omega_yx, b.truth.omega_yx)

    def test_replication_streams_differ(self):
        spec = ScenarioSpec(id=2, p=20, n_train=30, n_valid=10, seed=123)
        a = gen_scenario(spec, rep=0)
        b = gen_scenario(spec, rep=1)
        assert not np.array_equal(a.x, b.x)

    def test_scenario_two_support(self):
        spec = ScenarioSpec(id=2, p=40, n_train=10, n_valid=0, seed=7)
        data = gen_scenario(spec)
        oyx = data.truth.omega_yx
        row_nonzero = np.abs(oyx).sum(axis=1) > 0
        assert row_nonzero.sum() == 1
        active = oyx[row_nonzero][0]
        assert np.all(np.abs(active) == 0.5)
        assert len(set(active)) == 1  # one shared draw for the whole row
        assert np.count_nonzero(oyx) == spec.p

    def test_scenario_three_support(self):
        spec = ScenarioSpec(id=3, p=60, n_train=10, n_valid=0, seed=3)
        data = gen_scenario(spec)
        oyx = data.truth.omega_yx
        assert oyx.shape == (3, 60)
        for row in oyx:
            nz = np.nonzero(row)[0]
            assert nz.size == 30
            assert np.all(np.diff(nz) == 1)  # one contiguous section
            assert len(set(row[nz])) == 1

    def test_scenario_one_sections(self):
        # 10 sections of width 3; support is the union, 30 when disjoint
        spec = ScenarioSpec(id=1, p=200, n_train=10, n_valid=0, seed=11)
        data = gen_scenario(spec)
        oyx = data.truth.omega_yx
        assert oyx.shape == (1, 200)
        support = np.count_nonzero(oyx)
        assert support <= 30
        assert np.all(np.isin(np.abs(oyx[oyx != 0]), 0.5))

    def test_noise_covariance_monte_carlo(self):
        spec = ScenarioSpec(id=2, p=12, n_train=100000, n_valid=0, seed=5)
        data = gen_scenario(spec)
        b, _ = to_regression(data.truth)
        resid = data.y - data.x @ b
        emp = resid.T @ resid / resid.shape[0]
        assert np.max(np.abs(emp - data.noise_cov)) < 0.02

    def test_truth_round_trip(self):
        spec = ScenarioSpec(id=3, p=30, n_train=10, n_valid=0, seed=2)
        truth = gen_scenario(spec).truth
        back = from_regression(*to_regression(truth))
        assert np.max(np.abs(back.omega_yy - truth.omega_yy)) < 1e-10
        assert np.max(np.abs(back.omega_yx - truth.omega_yx)) < 1e-10

    def test_split(self):
        spec = ScenarioSpec(id=2, p=15, n_train=20, n_valid=5, seed=1)
        data = gen_scenario(spec)
        train, valid = split_train_valid(data, spec.n_train)
        assert train.n == 20 and valid.n == 5
        assert np.array_equal(np.vstack([train.x, valid.x]), data.x)


class TestWeatherLike:
    def test_shape_and_determinism(self):
        a = gen_weather_like(seed=4)
        b = gen_weather_like(seed=4)
        assert a.x.shape == (35, 365) and a.y.shape == (35, 2)
        assert np.array_equal(a.x, b.x) and np.array_equal(a.y, b.y)
        assert a.truth is not None


class TestRngStreams:
    def test_spawned_streams_are_stable(self):
        a = rng_for(99, rep=3).standard_normal(4)
        b = rng_for(99, rep=3).standard_normal(4)
        c = rng_for(99, rep=4).standard_normal(4)
        assert np.array_equal(a, b)
        assert not np.array_equal(a, c)

    def test_tuple_entropy(self):
        a = rng_for((5, 2)).standard_normal(3)
        b = rng_for((5, 2)).standard_normal(3)
        assert np.array_equal(a, b)
