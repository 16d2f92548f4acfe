"""Pure numpy implementation of the hot kernel.

Mirrors the compiled extension exactly; selected at import time when the
extension is unavailable (or forced via GENGM_BACKEND=numpy).
"""
import numpy as np

STATUS_OK = 0
STATUS_NOT_SPD = 1
STATUS_SINGULAR_GRADIENT = 2

# Pivot rule shared with linalg.is_spd so the +inf sentinel and the SPD
# test never disagree.
_PIVOT_RTOL = 1e-12

# Floor under the structural term when raising it to a fractional power.
_UL_FLOOR = 1e-300
_UL_SINGULAR = 1e-12


def _structural_coeff(u_l, eta, beta):
    """eta * beta * u_l**(beta-1) with the limit cases pinned down."""
    if eta == 0.0:
        return 0.0, STATUS_OK
    if beta == 1.0:
        return eta, STATUS_OK
    if beta > 1.0:
        if u_l <= 0.0:
            return 0.0, STATUS_OK
        return eta * beta * np.exp((beta - 1.0) * np.log(max(u_l, _UL_FLOOR))), STATUS_OK
    # beta < 1: gradient blows up as the structural term vanishes.
    if u_l < _UL_SINGULAR:
        return 0.0, STATUS_SINGULAR_GRADIENT
    return eta * beta * np.exp((beta - 1.0) * np.log(u_l)), STATUS_OK


def smooth_eval(oyy, oyx, syy, syx, sxx, structure, eta, beta):
    """Smooth objective value and gradients for one parameter pair.

    Returns ``(status, value, grad_yy, grad_yx, u_l)``.  When the yy block
    has no Cholesky factorization with acceptable pivots, status is
    STATUS_NOT_SPD and value is +inf (grads are zero and must be ignored).
    """
    q = oyy.shape[0]
    max_diag = np.max(np.diag(oyy)) if q else 0.0
    zyy = np.zeros_like(oyy)
    zyx = np.zeros_like(oyx)
    if max_diag <= 0.0:
        return STATUS_NOT_SPD, np.inf, zyy, zyx, np.nan
    try:
        chol = np.linalg.cholesky(oyy)
    except np.linalg.LinAlgError:
        return STATUS_NOT_SPD, np.inf, zyy, zyx, np.nan
    piv = np.diag(chol) ** 2
    if np.any(piv <= _PIVOT_RTOL * q * max_diag):
        return STATUS_NOT_SPD, np.inf, zyy, zyx, np.nan

    logdet = 2.0 * float(np.sum(np.log(np.diag(chol))))
    eye = np.eye(q)
    half = np.linalg.solve(chol, eye)
    oinv = half.T @ half

    w = oinv @ oyx
    g = w @ sxx
    t = w @ structure
    u_l = float(np.sum(oyx * t))

    value = (
        -logdet
        + float(np.sum(syy * oyy))
        + 2.0 * float(np.sum(syx * oyx))
        + float(np.sum(oyx * g))
    )
    if eta != 0.0:
        value += eta * (max(u_l, 0.0) ** beta)

    coeff, status = _structural_coeff(u_l, eta, beta)
    if status != STATUS_OK:
        return status, value, zyy, zyx, u_l

    inner = g + coeff * t if coeff != 0.0 else g
    grad_yy = -oinv + syy - inner @ w.T
    grad_yy = 0.5 * (grad_yy + grad_yy.T)
    grad_yx = 2.0 * (syx + inner)
    return STATUS_OK, value, grad_yy, grad_yx, u_l
