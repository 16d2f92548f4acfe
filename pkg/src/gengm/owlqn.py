"""Orthant-wise limited-memory quasi-Newton minimizer.

Minimizes smooth(v) + sum_i w_i |v_i| for a smooth callback that may
return +inf (extended-value smooth parts are how the SPD cone constraint
reaches the line search).  Coordinates with zero weight are simply
unpenalized; the orthant machinery degenerates gracefully for them.
"""
import math
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInputError

# Sufficient-decrease constant of the backtracking line search.
_ARMIJO = 1e-4

# Curvature pairs with s^t y below this relative threshold are discarded.
_CURVATURE_RTOL = 1e-10


@dataclass(frozen=True)
class OwlqnSettings:
    memory: int = 10
    max_iters: int = 500
    grad_tol: float = 1e-6
    backtrack_factor: float = 0.5
    max_line_search: int = 50

    def __post_init__(self):
        if self.memory < 1 or self.max_iters < 1 or self.max_line_search < 1:
            raise InvalidInputError("owlqn counts must be positive")
        if self.grad_tol <= 0:
            raise InvalidInputError("grad_tol must be positive")
        if not 0.0 < self.backtrack_factor < 1.0:
            raise InvalidInputError("backtrack_factor must lie in (0, 1)")


@dataclass(frozen=True)
class L1Problem:
    """Composite problem: smooth callback plus weighted L1 term.

    smooth_eval maps a vector to (value, gradient); value may be +inf, in
    which case the gradient is ignored.
    """

    dim: int
    smooth_eval: callable
    l1_weights: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.l1_weights, dtype=float).ravel()
        if w.size != self.dim:
            raise InvalidInputError(
                f"l1_weights length {w.size} != dim {self.dim}"
            )
        if np.any(w < 0) or not np.all(np.isfinite(w)):
            raise InvalidInputError("l1_weights must be finite and nonnegative")
        object.__setattr__(self, "l1_weights", w)


@dataclass
class OwlqnResult:
    solution: np.ndarray
    value: float
    iterations: int
    converged: bool
    pseudo_grad_norm: float
    line_search_failed: bool = False
    trace: list = field(default_factory=list)


def pseudo_gradient(v, grad, weights):
    """Steepest-descent direction generator of the composite objective.

    At nonzero coordinates this is grad + w * sign(v); at zero coordinates
    the one-sided derivative closest to zero, or zero when the
    subdifferential contains it.
    """
    v = np.asarray(v, dtype=float).ravel()
    grad = np.asarray(grad, dtype=float).ravel()
    weights = np.asarray(weights, dtype=float).ravel()
    if not (v.size == grad.size == weights.size):
        raise InvalidInputError("pseudo_gradient arguments must share length")
    pg = np.where(v != 0.0, grad + weights * np.sign(v), 0.0)
    at_zero = v == 0.0
    right = grad + weights
    left = grad - weights
    pg = np.where(at_zero & (right < 0.0), right, pg)
    pg = np.where(at_zero & (left > 0.0), left, pg)
    return pg


def _two_loop(pg, pairs, gamma):
    """Standard L-BFGS two-loop recursion applied to the pseudo-gradient."""
    q = pg.copy()
    alphas = []
    for s, y, rho in reversed(pairs):
        a = rho * np.dot(s, q)
        alphas.append(a)
        q -= a * y
    q *= gamma
    for (s, y, rho), a in zip(pairs, reversed(alphas)):
        b = rho * np.dot(y, q)
        q += (a - b) * s
    return q


def _composite(problem, v):
    value, grad = problem.smooth_eval(v)
    if math.isinf(value):
        return math.inf, None
    return value + float(np.dot(problem.l1_weights, np.abs(v))), grad


def minimize(problem, start, settings=OwlqnSettings()):
    """Minimize the composite objective from a feasible starting point.

    The returned objective sequence is nonincreasing; if the line search
    stalls the best iterate found so far comes back with converged False
    and the line_search_failed flag set.
    """
    x = np.asarray(start, dtype=float).ravel().copy()
    if x.size != problem.dim:
        raise InvalidInputError(f"start length {x.size} != dim {problem.dim}")
    if not np.all(np.isfinite(x)):
        raise InvalidInputError("start must be finite")
    weights = problem.l1_weights

    f, grad = _composite(problem, x)
    if grad is None:
        raise InvalidInputError("smooth part must be finite at the start point")
    grad = np.asarray(grad, dtype=float).ravel()

    pairs = deque(maxlen=settings.memory)
    gamma = 1.0
    trace = [f]
    best_x, best_f = x.copy(), f
    line_search_failed = False
    iterations = 0

    pg = pseudo_gradient(x, grad, weights)
    pg_norm = float(np.max(np.abs(pg))) if pg.size else 0.0

    while iterations < settings.max_iters:
        if pg_norm <= settings.grad_tol:
            return OwlqnResult(
                solution=best_x,
                value=best_f,
                iterations=iterations,
                converged=True,
                pseudo_grad_norm=pg_norm,
                trace=trace,
            )
        iterations += 1

        d = -_two_loop(pg, pairs, gamma)
        # Penalized direction coordinates fighting the negative
        # pseudo-gradient are zeroed, which keeps the projected path a
        # descent direction for the composite objective.  Unpenalized
        # coordinates are smooth everywhere, so the orthant machinery
        # leaves them alone (aligning them too degrades the quasi-Newton
        # direction badly on ill-conditioned problems).
        penalized = weights > 0.0
        d[penalized & (d * pg >= 0.0)] = 0.0
        # Orthant fixed for this step: current signs, steepest feasible
        # descent signs at zero coordinates.
        xi = np.where(x != 0.0, np.sign(x), np.sign(-pg))

        alpha = 1.0
        accepted = False
        for _ in range(settings.max_line_search):
            x_new = x + alpha * d
            x_new[penalized & (x_new * xi <= 0.0)] = 0.0
            f_new, grad_new = _composite(problem, x_new)
            dir_deriv = float(np.dot(pg, x_new - x))
            if dir_deriv >= 0.0:
                # Projection left nothing to move along; shrink and retry.
                alpha *= settings.backtrack_factor
                continue
            if f_new <= f + _ARMIJO * dir_deriv:
                accepted = True
                break
            alpha *= settings.backtrack_factor
        if not accepted:
            line_search_failed = True
            break

        grad_new = np.asarray(grad_new, dtype=float).ravel()
        s = x_new - x
        y = grad_new - grad
        sty = float(np.dot(s, y))
        norms = float(np.linalg.norm(s) * np.linalg.norm(y))
        if sty > _CURVATURE_RTOL * max(norms, 1e-300):
            pairs.append((s, y, 1.0 / sty))
            gamma = sty / float(np.dot(y, y))

        x, f, grad = x_new, f_new, grad_new
        trace.append(f)
        if f < best_f:
            best_x, best_f = x.copy(), f
        pg = pseudo_gradient(x, grad, weights)
        pg_norm = float(np.max(np.abs(pg)))

    converged = pg_norm <= settings.grad_tol and not line_search_failed
    return OwlqnResult(
        solution=best_x,
        value=best_f,
        iterations=iterations,
        converged=converged,
        pseudo_grad_norm=pg_norm,
        line_search_failed=line_search_failed,
        trace=trace,
    )
