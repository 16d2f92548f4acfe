"""Core statistical data types and the transforms between the
precision-block and regression parametrizations.

The estimation target is a pair theta = (omega_yy, omega_yx): a symmetric
positive definite block for the conditional response precision and a dense
block for the direct predictor-response links.  The equivalent regression
form is Y = X B + E with B = -omega_yx^t omega_yy^{-1} and noise covariance
R = omega_yy^{-1}.
"""
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import linalg
from .errors import InvalidInputError, NumericError


@dataclass(frozen=True)
class ParameterPair:
    """The estimation target: SPD q x q block plus dense q x p block."""

    omega_yy: np.ndarray
    omega_yx: np.ndarray

    def __post_init__(self):
        oyy = linalg.check_symmetric(self.omega_yy, "omega_yy")
        oyx = linalg.as_matrix(self.omega_yx, "omega_yx")
        if oyy.shape[0] != oyx.shape[0]:
            raise InvalidInputError(
                f"omega_yy dim {oyy.shape[0]} != omega_yx rows {oyx.shape[0]}"
            )
        if not linalg.is_spd(oyy):
            raise InvalidInputError("omega_yy must be symmetric positive definite")
        object.__setattr__(self, "omega_yy", oyy)
        object.__setattr__(self, "omega_yx", oyx)

    @property
    def q(self):
        return self.omega_yy.shape[0]

    @property
    def p(self):
        return self.omega_yx.shape[1]


@dataclass(frozen=True)
class CovarianceTriplet:
    """Second-moment matrices of the responses and predictors.

    Holds either empirical cross products (n = sample count) or analytic
    population blocks (n = 0).
    """

    s_yy: np.ndarray
    s_yx: np.ndarray
    s_xx: np.ndarray
    n: int = 0

    def __post_init__(self):
        syy = linalg.check_symmetric(self.s_yy, "s_yy")
        syx = linalg.as_matrix(self.s_yx, "s_yx")
        sxx = linalg.check_symmetric(self.s_xx, "s_xx")
        if syy.shape[0] != syx.shape[0] or sxx.shape[0] != syx.shape[1]:
            raise InvalidInputError(
                f"covariance blocks inconsistent: s_yy {syy.shape}, "
                f"s_yx {syx.shape}, s_xx {sxx.shape}"
            )
        if self.n < 0:
            raise InvalidInputError("sample count must be nonnegative")
        for name, block in (("s_yy", syy), ("s_xx", sxx)):
            lo, hi = linalg.eig_extremes(block)
            if lo < -1e-9 * max(hi, 1.0):
                raise InvalidInputError(f"{name} is not positive semi-definite")
        object.__setattr__(self, "s_yy", syy)
        object.__setattr__(self, "s_yx", syx)
        object.__setattr__(self, "s_xx", sxx)

    @property
    def q(self):
        return self.s_yy.shape[0]

    @property
    def p(self):
        return self.s_xx.shape[0]


@dataclass(frozen=True)
class RegularizationConfig:
    """Penalty weights, prior shape and structure matrix.

    lambda_ weights the off-diagonal L1 penalty on omega_yy, mu the
    elementwise L1 penalty on omega_yx, and eta the smooth structural term
    with exponent beta.  Joint convexity is only guaranteed for beta >= 1;
    smaller exponents must be opted into explicitly.
    """

    lambda_: float
    mu: float
    eta: float
    beta: float
    structure: np.ndarray
    allow_unguaranteed_beta: bool = False

    def __post_init__(self):
        for name, val in (("lambda", self.lambda_), ("mu", self.mu), ("eta", self.eta)):
            if not np.isfinite(val) or val < 0:
                raise InvalidInputError(f"{name} must be finite and >= 0, got {val}")
        if not np.isfinite(self.beta) or self.beta <= 0:
            raise InvalidInputError(f"beta must be positive, got {self.beta}")
        if self.beta < 1.0 and not self.allow_unguaranteed_beta:
            raise InvalidInputError(
                "beta < 1 voids the convexity guarantee; pass "
                "allow_unguaranteed_beta=True to proceed anyway"
            )
        struct = linalg.check_symmetric(self.structure, "structure")
        lo, hi = linalg.eig_extremes(struct)
        if lo < -1e-9 * max(hi, 1.0):
            raise InvalidInputError("structure matrix must be positive semi-definite")
        object.__setattr__(self, "structure", struct)

    @property
    def p(self):
        return self.structure.shape[0]


@dataclass(frozen=True)
class Dataset:
    """Observations (rows of x and y), with ground truth for synthetic runs."""

    x: np.ndarray
    y: np.ndarray
    truth: Optional[ParameterPair] = None
    noise_cov: Optional[np.ndarray] = field(default=None)

    def __post_init__(self):
        x = linalg.as_matrix(self.x, "x")
        y = linalg.as_matrix(self.y, "y")
        if x.shape[0] != y.shape[0]:
            raise InvalidInputError(
                f"x has {x.shape[0]} rows but y has {y.shape[0]}"
            )
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)
        if self.noise_cov is not None:
            object.__setattr__(
                self, "noise_cov", linalg.check_symmetric(self.noise_cov, "noise_cov")
            )

    @property
    def n(self):
        return self.x.shape[0]

    def rows(self, idx):
        """Dataset restricted to the given row indices (truth carried over)."""
        return Dataset(self.x[idx], self.y[idx], self.truth, self.noise_cov)


def sample_covariances(dataset):
    """1/n-normalized cross products of the observations.

    Returns
    -------
    CovarianceTriplet with the row count recorded in ``n``.
    """
    n = dataset.n
    if n < 1:
        raise InvalidInputError("sample_covariances needs at least one observation")
    x, y = dataset.x, dataset.y
    s_yy = (y.T @ y) / n
    s_yx = (y.T @ x) / n
    s_xx = (x.T @ x) / n
    return CovarianceTriplet(
        s_yy=0.5 * (s_yy + s_yy.T), s_yx=s_yx, s_xx=0.5 * (s_xx + s_xx.T), n=n
    )


def _spd_inverse(m, name):
    try:
        chol = np.linalg.cholesky(m)
    except np.linalg.LinAlgError as exc:
        raise NumericError(f"{name} is singular or not positive definite") from exc
    half = np.linalg.solve(chol, np.eye(m.shape[0]))
    inv = half.T @ half
    return 0.5 * (inv + inv.T)


def to_regression(theta):
    """Regression form (B, R) of a parameter pair.

    B is p x q with B = -omega_yx^t omega_yy^{-1}; R = omega_yy^{-1}.
    """
    r = _spd_inverse(theta.omega_yy, "omega_yy")
    b = -theta.omega_yx.T @ r
    return b, r


def from_regression(b, r):
    """Inverse transform of :func:`to_regression`."""
    b = linalg.as_matrix(b, "b")
    r = linalg.check_symmetric(r, "r")
    omega_yy = _spd_inverse(r, "r")
    omega_yx = -omega_yy @ b.T
    return ParameterPair(omega_yy=omega_yy, omega_yx=omega_yx)


def conditional_mean(theta, x_row):
    """Conditional mean of the response at one predictor vector."""
    x = np.asarray(x_row, dtype=float).ravel()
    if x.size != theta.p:
        raise InvalidInputError(f"x_row length {x.size} != p {theta.p}")
    rhs = theta.omega_yx @ x
    try:
        sol = np.linalg.solve(theta.omega_yy, rhs)
    except np.linalg.LinAlgError as exc:
        raise NumericError("omega_yy is singular") from exc
    return -sol


def population_covariances(truth, sigma_xx):
    """Analytic covariance blocks implied by the model at a parameter pair.

    With predictors of covariance sigma_xx and the regression form (B, R):
    sigma_yx = B^t sigma_xx and sigma_yy = B^t sigma_xx B + R.
    """
    sxx = linalg.check_symmetric(sigma_xx, "sigma_xx")
    if sxx.shape[0] != truth.p:
        raise InvalidInputError("sigma_xx dimension does not match the parameter pair")
    b, r = to_regression(truth)
    syx = b.T @ sxx
    syy = b.T @ sxx @ b + r
    return CovarianceTriplet(s_yy=0.5 * (syy + syy.T), s_yx=syx, s_xx=sxx, n=0)
