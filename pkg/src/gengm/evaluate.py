"""Model assessment: prediction error, support-recovery scores, K-fold
cross-validation over penalty grids and the repeated-subsample selection
frequency protocol.
"""
import itertools
from dataclasses import dataclass

import numpy as np

from . import solver
from .errors import GengmError, InvalidInputError
from .model import RegularizationConfig, sample_covariances
from .simulate import rng_for

# Entries of an estimated direct-link block below this magnitude count as
# zero when reading supports; the optimizer produces exact zeros, so this
# only guards numerical drift.
SUPPORT_ZERO_TOL = 1e-8


def mspe(theta, dataset):
    """Mean squared prediction error, normalized by q times the row count."""
    if dataset.n < 1:
        raise InvalidInputError("mspe needs at least one observation")
    if dataset.x.shape[1] != theta.p or dataset.y.shape[1] != theta.q:
        raise InvalidInputError("dataset dimensions do not match theta")
    w = np.linalg.solve(theta.omega_yy, theta.omega_yx)
    resid = dataset.y + dataset.x @ w.T
    return float(np.sum(resid * resid)) / (theta.q * dataset.n)


def f_score(estimated, truth, zero_tol=SUPPORT_ZERO_TOL):
    """Support-recovery F-score of the direct links.

    Returns
    -------
    (f, precision, recall) : floats in [0, 1]
    """
    if estimated.omega_yx.shape != truth.omega_yx.shape:
        raise InvalidInputError("estimated and truth shapes differ")
    est = np.abs(estimated.omega_yx) > zero_tol
    tru = np.abs(truth.omega_yx) > zero_tol
    tp = int(np.sum(est & tru))
    fp = int(np.sum(est & ~tru))
    fn = int(np.sum(~est & tru))
    if tp + fn == 0:
        raise InvalidInputError("truth has empty support; recall is undefined")
    precision = tp / (tp + fp) if tp + fp > 0 else 0.0
    recall = tp / (tp + fn)
    f = 2.0 * precision * recall / (precision + recall) if precision + recall > 0 else 0.0
    return f, precision, recall


@dataclass(frozen=True)
class CvGrid:
    lambdas: tuple
    mus: tuple
    etas: tuple
    beta: float = 1.0
    folds: int = 2

    def __post_init__(self):
        for name, axis in (("lambdas", self.lambdas), ("mus", self.mus), ("etas", self.etas)):
            vals = tuple(float(v) for v in axis)
            if not vals:
                raise InvalidInputError(f"{name} axis is empty")
            if any(v < 0 or not np.isfinite(v) for v in vals):
                raise InvalidInputError(f"{name} values must be finite and >= 0")
            object.__setattr__(self, name, vals)
        if self.folds < 2:
            raise InvalidInputError("need at least 2 folds")

    def cells(self):
        return itertools.product(self.lambdas, self.mus, self.etas)


@dataclass
class CvCell:
    lambda_: float
    mu: float
    eta: float
    fold_mspes: tuple
    mean_mspe: float
    valid: bool


def _fold_indices(n, folds, seed):
    perm = rng_for(seed).permutation(n)
    return np.array_split(perm, folds)


def cross_validate(dataset, structure, grid, settings, seed=0, allow_unguaranteed_beta=False):
    """Exhaustive grid search scored by average held-out prediction error.

    Ties in the mean error break toward the most regularized cell, i.e.
    the lexicographically largest (lambda, mu, eta).

    Returns
    -------
    (best, table) : the winning RegularizationConfig and the list of CvCell
    rows, one per grid point, with per-fold errors preserved.
    """
    n = dataset.n
    if n < grid.folds:
        raise InvalidInputError("fewer observations than folds")
    fold_idx = _fold_indices(n, grid.folds, seed)
    all_idx = np.arange(n)

    table = []
    for lam, mu, eta in grid.cells():
        cfg = RegularizationConfig(
            lambda_=lam,
            mu=mu,
            eta=eta,
            beta=grid.beta,
            structure=structure,
            allow_unguaranteed_beta=allow_unguaranteed_beta,
        )
        fold_errs = []
        valid = True
        for held in fold_idx:
            train = dataset.rows(np.setdiff1d(all_idx, held, assume_unique=False))
            try:
                cov = sample_covariances(train)
                res = solver.fit(cov, cfg, settings)
                fold_errs.append(mspe(res.theta_hat, dataset.rows(held)))
            except GengmError:
                valid = False
                break
        mean = float(np.mean(fold_errs)) if valid else float("nan")
        table.append(
            CvCell(
                lambda_=lam,
                mu=mu,
                eta=eta,
                fold_mspes=tuple(fold_errs),
                mean_mspe=mean,
                valid=valid,
            )
        )

    usable = [c for c in table if c.valid]
    if not usable:
        raise InvalidInputError("no valid grid cell; every fold failed")
    best_cell = min(
        usable, key=lambda c: (c.mean_mspe, -c.lambda_, -c.mu, -c.eta)
    )
    best = RegularizationConfig(
        lambda_=best_cell.lambda_,
        mu=best_cell.mu,
        eta=best_cell.eta,
        beta=grid.beta,
        structure=structure,
        allow_unguaranteed_beta=allow_unguaranteed_beta,
    )
    return best, table


@dataclass
class SelectionFrequency:
    """Occurrence counts of each direct link across repeated refits."""

    counts: np.ndarray
    repetitions: int
    threshold: float
    failed: int = 0

    def frequencies(self):
        if self.repetitions == 0:
            raise InvalidInputError("no successful repetition")
        return self.counts / self.repetitions

    def retained(self):
        """Boolean mask of links whose frequency exceeds the threshold."""
        return self.frequencies() > self.threshold


def selection_frequency(
    dataset, cfg, settings, repetitions, subsample, seed=0, threshold=0.5
):
    """Support stability under repeated subsampling.

    Each repetition fits the model on a random subsample of the rows and
    records which direct links come out nonzero.  Failed fits are dropped
    from the denominator.
    """
    n = dataset.n
    if not 0 < subsample <= n:
        raise InvalidInputError("subsample must lie in (0, n]")
    q = dataset.y.shape[1]
    p = dataset.x.shape[1]
    counts = np.zeros((q, p), dtype=int)
    ok = 0
    failed = 0
    for rep in range(repetitions):
        rng = rng_for(seed, rep)
        rows = rng.choice(n, size=subsample, replace=False)
        try:
            cov = sample_covariances(dataset.rows(rows))
            res = solver.fit(cov, cfg, settings)
        except GengmError:
            failed += 1
            continue
        counts += np.abs(res.theta_hat.omega_yx) > SUPPORT_ZERO_TOL
        ok += 1
    return SelectionFrequency(
        counts=counts, repetitions=ok, threshold=threshold, failed=failed
    )
