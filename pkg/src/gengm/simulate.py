"""Synthetic data generation for the three benchmark scenarios, plus the
structure-matrix builders and a weather-shaped stand-in dataset.

All draws go through numpy's PCG64 generator; replication k of a run with
seed s uses the child stream SeedSequence(s, spawn_key=(k,)), so
replications can be generated independently and in any order while staying
bit-reproducible.
"""
from dataclasses import dataclass

import numpy as np

from . import linalg
from .errors import InvalidInputError
from .model import Dataset, ParameterPair, to_regression

# Section sizes baked into the scenario definitions.
_SECTION_S1 = 3
_SECTIONS_S1 = 10
_SECTION_S3 = 30


def rng_for(seed, rep=None):
    """Generator for a run, or for one replication of a run.

    ``seed`` may be an int or a tuple of ints (entropy words).
    """
    if rep is None:
        return np.random.default_rng(np.random.SeedSequence(seed))
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(rep,)))


@dataclass(frozen=True)
class ScenarioSpec:
    id: int
    p: int = 100
    r: float = 0.5
    n_train: int = 150
    n_valid: int = 1000
    seed: int = 0

    def __post_init__(self):
        if self.id not in (1, 2, 3):
            raise InvalidInputError(f"scenario id must be 1, 2 or 3, got {self.id}")
        if not -1.0 < self.r < 1.0:
            raise InvalidInputError("r must lie in (-1, 1)")
        if self.n_train < 1 or self.n_valid < 0:
            raise InvalidInputError("sample sizes must be positive")
        if self.id == 1 and self.p < _SECTION_S1 + _SECTIONS_S1 - 1:
            raise InvalidInputError(
                f"scenario 1 needs p >= {_SECTION_S1 + _SECTIONS_S1 - 1} for "
                f"{_SECTIONS_S1} distinct section starts"
            )
        if self.id == 3 and self.p < _SECTION_S3:
            raise InvalidInputError(f"scenario 3 needs p >= {_SECTION_S3}")

    @property
    def q(self):
        return self.id


def first_diff_structure(p):
    """Normalized first-difference operator: half the path-graph Laplacian.

    Positive semi-definite with the constant vector in its kernel; its
    quadratic form is half the sum of squared consecutive differences.
    """
    if p < 2:
        raise InvalidInputError("first_diff_structure needs p >= 2")
    m = np.zeros((p, p))
    idx = np.arange(p)
    m[idx, idx] = 2.0
    m[0, 0] = m[p - 1, p - 1] = 1.0
    m[idx[:-1], idx[:-1] + 1] = -1.0
    m[idx[:-1] + 1, idx[:-1]] = -1.0
    return 0.5 * m


def ar_covariance(q, r):
    """First-order autoregressive covariance with entries r^|i-j|."""
    if not -1.0 < r < 1.0:
        raise InvalidInputError("|r| must be < 1")
    idx = np.arange(q)
    return r ** np.abs(idx[:, None] - idx[None, :]).astype(float)


def _draw_direct_links(spec, rng):
    """Scenario-specific sparse direct-link block (q x p)."""
    q, p = spec.q, spec.p
    oyx = np.zeros((q, p))
    if spec.id == 1:
        starts = rng.choice(p - _SECTION_S1 + 1, size=_SECTIONS_S1, replace=False)
        signs = rng.choice([-0.5, 0.5], size=_SECTIONS_S1)
        for start, omega in zip(starts, signs):
            oyx[0, start : start + _SECTION_S1] = omega
    elif spec.id == 2:
        row = int(rng.integers(q))
        omega = float(rng.choice([-0.5, 0.5]))
        oyx[row, :] = omega
    else:
        for i in range(q):
            start = int(rng.integers(p - _SECTION_S3 + 1))
            omega = float(rng.choice([-0.5, 0.5]))
            oyx[i, start : start + _SECTION_S3] = omega
    return oyx


def gen_scenario(spec, rep=None):
    """One synthetic dataset (training and validation rows concatenated).

    Rows [0, n_train) are the training block, the rest the validation
    block.  The generating parameter pair and the noise covariance are
    recorded on the returned dataset.  ``rep`` selects an independent
    per-replication stream of the seed.
    """
    rng = rng_for(spec.seed, rep)
    q, p = spec.q, spec.p

    oyx = _draw_direct_links(spec, rng)
    noise_cov = ar_covariance(q, spec.r)
    oyy = np.linalg.inv(noise_cov)
    oyy = 0.5 * (oyy + oyy.T)
    truth = ParameterPair(omega_yy=oyy, omega_yx=oyx)
    b, _ = to_regression(truth)

    n = spec.n_train + spec.n_valid
    x = rng.standard_normal((n, p))
    chol = np.linalg.cholesky(noise_cov)
    noise = rng.standard_normal((n, q)) @ chol.T
    y = x @ b + noise
    return Dataset(x=x, y=y, truth=truth, noise_cov=noise_cov)


def split_train_valid(dataset, n_train):
    """Training/validation split along the row layout of gen_scenario."""
    if not 0 < n_train <= dataset.n:
        raise InvalidInputError("n_train must lie in (0, n]")
    return dataset.rows(np.arange(n_train)), dataset.rows(
        np.arange(n_train, dataset.n)
    )


def gen_weather_like(seed, n=35, p=365, q=2, mu_noise=0.15):
    """Synthetic stand-in with the shape of a yearly weather panel.

    Predictors imitate daily temperature curves across stations (a shared
    seasonal cycle, a station offset and smooth station-level wiggles); the
    responses are driven by contiguous blocks of winter and summer days, so
    the direct links carry a row structure worth recovering.
    """
    rng = rng_for(seed)
    days = np.arange(p)
    season = 10.0 * np.sin(2.0 * np.pi * (days - 0.25 * p) / p)
    offsets = rng.uniform(-8.0, 8.0, size=n)
    phases = rng.uniform(-0.05 * p, 0.05 * p, size=n)
    x = np.empty((n, p))
    for i in range(n):
        wiggle = np.convolve(
            rng.standard_normal(p), np.ones(15) / 15.0, mode="same"
        )
        x[i] = season * (1.0 + 0.1 * phases[i] / p) + offsets[i] + 2.0 * wiggle

    oyx = np.zeros((q, p))
    winter = slice(0, min(45, p))
    summer = slice(int(0.55 * p), min(int(0.55 * p) + 40, p))
    oyx[0, winter] = -0.02
    oyx[0, summer] = 0.015
    oyx[1, winter] = -0.01
    noise_cov = ar_covariance(q, 0.32)
    oyy = np.linalg.inv(noise_cov)
    truth = ParameterPair(omega_yy=0.5 * (oyy + oyy.T), omega_yx=oyx)
    b, _ = to_regression(truth)
    y = x @ b + mu_noise * rng.standard_normal((n, q)) @ np.linalg.cholesky(
        noise_cov
    ).T
    return Dataset(x=x, y=y, truth=truth, noise_cov=noise_cov)
