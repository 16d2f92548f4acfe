"""Independent reference implementations used only by the tests.

Each oracle takes a deliberately different route from the library code it
checks (explicit loops, rotations, enumeration), so agreement is evidence
rather than tautology.
"""
import itertools

import numpy as np


def jacobi_eigenvalues(m, tol=1e-12, max_sweeps=100):
    """Full symmetric spectrum via cyclic Jacobi rotations."""
    a = np.array(m, dtype=float)
    d = a.shape[0]
    if d == 1:
        return a.ravel().copy()
    for _ in range(max_sweeps):
        off = np.sqrt(np.sum(np.tril(a, -1) ** 2))
        if off <= tol * max(1.0, np.max(np.abs(np.diag(a)))):
            break
        for i in range(d - 1):
            for j in range(i + 1, d):
                if a[i, j] == 0.0:
                    continue
                theta = 0.5 * np.arctan2(2.0 * a[i, j], a[j, j] - a[i, i])
                c, s = np.cos(theta), np.sin(theta)
                rot = np.eye(d)
                rot[i, i] = rot[j, j] = c
                rot[i, j] = s
                rot[j, i] = -s
                a = rot.T @ a @ rot
    return np.sort(np.diag(a))


def loop_covariances(x, y):
    """Sample second moments accumulated observation by observation."""
    n, p = x.shape
    q = y.shape[1]
    s_yy = np.zeros((q, q))
    s_yx = np.zeros((q, p))
    s_xx = np.zeros((p, p))
    for i in range(n):
        s_yy += np.outer(y[i], y[i])
        s_yx += np.outer(y[i], x[i])
        s_xx += np.outer(x[i], x[i])
    return s_yy / n, s_yx / n, s_xx / n


def triple_product_trace(structure, oyy, oyx):
    """tr(L . oyx^t . oyy^{-1} . oyx) via explicit products and np.trace."""
    return float(np.trace(structure @ oyx.T @ np.linalg.inv(oyy) @ oyx))


def smooth_value_reference(oyy, oyx, cov, cfg):
    """Objective smooth part recomputed term by term with plain numpy."""
    sign, logdet = np.linalg.slogdet(oyy)
    assert sign > 0
    oinv = np.linalg.inv(oyy)
    quad = oyx.T @ oinv @ oyx
    val = (
        -logdet
        + np.trace(cov.s_yy @ oyy)
        + 2.0 * np.trace(cov.s_yx.T @ oyx)
        + np.trace(cov.s_xx @ quad)
    )
    if cfg.eta:
        val += cfg.eta * max(np.trace(cfg.structure @ quad), 0.0) ** cfg.beta
    return float(val)


def fd_smooth_gradients(value_fn, oyy, oyx, rel_step=1e-6):
    """Central finite differences of a smooth scalar in both blocks.

    The yy block is probed along symmetric two-entry directions; the
    returned yy array holds the directional derivatives, i.e. twice the
    off-diagonal gradient entries of the symmetric-gradient convention.
    """
    q, p = oyx.shape
    g_yy = np.zeros((q, q))
    for i in range(q):
        for j in range(i, q):
            h = rel_step * (abs(oyy[i, j]) + 1.0)
            d = np.zeros((q, q))
            d[i, j] = d[j, i] = 1.0
            g_yy[i, j] = g_yy[j, i] = (
                value_fn(oyy + h * d, oyx) - value_fn(oyy - h * d, oyx)
            ) / (2.0 * h)
    g_yx = np.zeros((q, p))
    for i in range(q):
        for j in range(p):
            h = rel_step * (abs(oyx[i, j]) + 1.0)
            d = np.zeros((q, p))
            d[i, j] = 1.0
            g_yx[i, j] = (
                value_fn(oyy, oyx + h * d) - value_fn(oyy, oyx - h * d)
            ) / (2.0 * h)
    return g_yy, g_yx


def cd_lasso(x, y, lam, sweeps=20000, tol=1e-13):
    """Coordinate-descent lasso on (1/2n)||y - Xw||^2 + lam ||w||_1."""
    n, p = x.shape
    w = np.zeros(p)
    gram = x.T @ x / n
    xty = x.T @ y / n
    for _ in range(sweeps):
        w_old = w.copy()
        for j in range(p):
            rho = xty[j] - gram[j] @ w + gram[j, j] * w[j]
            w[j] = np.sign(rho) * max(abs(rho) - lam, 0.0) / gram[j, j]
        if np.max(np.abs(w - w_old)) < tol:
            break
    return w


def first_diff_quadratic(u):
    """Telescoping form: half the sum of squared consecutive differences."""
    u = np.asarray(u, dtype=float)
    return 0.5 * float(np.sum(np.diff(u) ** 2))


def ar1_precision(q, r):
    """Analytic tridiagonal inverse of the AR(1) covariance."""
    m = np.zeros((q, q))
    if q == 1:
        m[0, 0] = 1.0
        return m
    scale = 1.0 / (1.0 - r * r)
    for i in range(q):
        m[i, i] = scale * (1.0 + r * r if 0 < i < q - 1 else 1.0)
    for i in range(q - 1):
        m[i, i + 1] = m[i + 1, i] = -scale * r
    return m


def naive_rip(sigma, emp, s, omega_yx=None):
    """All-supports restricted-isometry check via inv + nonsymmetric eig."""
    p = sigma.shape[0]
    lo, hi = np.inf, -np.inf
    for size in range(1, min(s, p) + 1):
        for support in itertools.combinations(range(p), size):
            idx = np.asarray(support)
            pencil = np.linalg.inv(sigma[np.ix_(idx, idx)]) @ emp[np.ix_(idx, idx)]
            eigs = np.linalg.eigvals(pencil).real
            lo = min(lo, eigs.min())
            hi = max(hi, eigs.max())
    holds = lo >= 0.5 and hi <= 1.5
    lam_ok = True
    if omega_yx is not None:
        top_emp = np.max(np.linalg.eigvalsh(omega_yx @ emp @ omega_yx.T))
        top_pop = np.max(np.linalg.eigvalsh(omega_yx @ sigma @ omega_yx.T))
        lam_ok = top_emp <= 1.4 * top_pop
    return holds and lam_ok, lo, hi, lam_ok


def kkt_residual_lasso(x, y, b_hat, mu):
    """Worst first-order violation of the matrix lasso optimality system."""
    n = x.shape[0]
    grad = x.T @ (x @ b_hat - y) / n
    active = b_hat != 0.0
    res_active = np.abs(grad + mu * np.sign(b_hat))[active]
    res_zero = np.maximum(np.abs(grad[~active]) - mu, 0.0)
    worst = 0.0
    if res_active.size:
        worst = max(worst, float(res_active.max()))
    if res_zero.size:
        worst = max(worst, float(res_zero.max()))
    return worst
