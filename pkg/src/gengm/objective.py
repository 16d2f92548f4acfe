"""Penalized objective of the generalized partial graphical model.

The single source of truth for what the solver minimizes: the smooth part
(negative conditional log-likelihood plus the structural prior term) and
the two L1 penalties.  Heavy arithmetic lives in the kernel backend; this
module adds validation, the +inf sentinel semantics and the penalty terms.
"""
import math
from dataclasses import dataclass

import numpy as np

from . import _kernels, linalg
from .errors import InvalidInputError, NumericError, SingularGradientError


@dataclass(frozen=True)
class SmoothEval:
    """Value and gradients of the smooth objective part.

    u_l is the structural term, the Frobenius pairing of the structure
    matrix with omega_yx^t omega_yy^{-1} omega_yx.
    """

    value: float
    grad_yy: np.ndarray
    grad_yx: np.ndarray
    u_l: float


def _check_dims(theta_q, theta_p, cov, cfg):
    if cov.q != theta_q or cov.p != theta_p:
        raise InvalidInputError(
            f"covariance blocks ({cov.q}, {cov.p}) do not match theta "
            f"({theta_q}, {theta_p})"
        )
    if cfg.p != theta_p:
        raise InvalidInputError(
            f"structure matrix dim {cfg.p} does not match p = {theta_p}"
        )


def structural_term(theta, structure):
    """Structural penalty base: <<L, omega_yx^t omega_yy^{-1} omega_yx>>."""
    struct = linalg.check_symmetric(structure, "structure")
    if struct.shape[0] != theta.p:
        raise InvalidInputError(
            f"structure dim {struct.shape[0]} != p {theta.p}"
        )
    try:
        w = np.linalg.solve(theta.omega_yy, theta.omega_yx)
    except np.linalg.LinAlgError as exc:
        raise NumericError("omega_yy is singular") from exc
    return float(np.sum(theta.omega_yx * (w @ struct)))


def penalty_value(omega_yy, omega_yx, cfg):
    """L1 penalties: off-diagonal on the yy block, elementwise on yx."""
    return cfg.lambda_ * linalg.offdiag_abs_sum(omega_yy) + cfg.mu * float(
        np.sum(np.abs(omega_yx))
    )


def smooth_eval_matrices(omega_yy, omega_yx, cov, cfg):
    """Kernel call on raw matrices; +inf value signals a non-SPD yy block.

    Used on the solver hot path where candidate matrices may leave the
    positive definite cone.  Raises only for the singular structural
    gradient case (beta < 1 with a vanishing structural term).
    """
    status, value, gyy, gyx, u_l = _kernels.smooth_eval(
        np.ascontiguousarray(omega_yy),
        np.ascontiguousarray(omega_yx),
        cov.s_yy,
        cov.s_yx,
        cov.s_xx,
        cfg.structure,
        cfg.eta,
        cfg.beta,
    )
    if status == _kernels.STATUS_SINGULAR_GRADIENT:
        raise SingularGradientError(
            f"structural term {u_l:g} vanished with beta={cfg.beta} < 1; "
            "the smooth gradient is unbounded there"
        )
    return status, value, gyy, gyx, u_l


def eval_smooth(theta, cov, cfg):
    """Smooth part value and its gradients with respect to both blocks."""
    _check_dims(theta.q, theta.p, cov, cfg)
    status, value, gyy, gyx, u_l = smooth_eval_matrices(
        theta.omega_yy, theta.omega_yx, cov, cfg
    )
    if status == _kernels.STATUS_NOT_SPD:
        raise NumericError("omega_yy is not positive definite")
    return SmoothEval(value=value, grad_yy=gyy, grad_yx=gyx, u_l=u_l)


def eval_objective_matrices(omega_yy, omega_yx, cov, cfg):
    """Penalized objective on raw matrices; +inf off the SPD cone."""
    status, value, _, _, _ = smooth_eval_matrices(omega_yy, omega_yx, cov, cfg)
    if status == _kernels.STATUS_NOT_SPD:
        return math.inf
    return value + penalty_value(omega_yy, omega_yx, cfg)


def eval_objective(theta, cov, cfg):
    """Full penalized objective at a valid parameter pair."""
    _check_dims(theta.q, theta.p, cov, cfg)
    return eval_objective_matrices(theta.omega_yy, theta.omega_yx, cov, cfg)
