"""Non-asymptotic error-bound machinery: eigenvalue bounds at the true
parameters, the prior constants, the admissible penalty region, the local
strong-convexity constant, the deviation matrices of the empirical
covariances, the resulting estimation-error bound, and a brute-force
restricted-isometry check at toy scale.

Everything here is a deterministic function of the true model quantities
(and, where stated, of empirical covariances); nothing is estimated.
"""
import itertools
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import linalg
from .errors import (
    CapacityError,
    HypothesisError,
    InvalidInputError,
    NumericError,
    ValidityError,
)
from .model import ParameterPair

# Brute-force support enumeration caps for the isometry check.
RIP_MAX_P = 20
RIP_MAX_S = 6


@dataclass(frozen=True)
class TheoryInputs:
    """True model quantities plus the free constants of the guarantees.

    The multiplier pairs must satisfy d > c > 1 on each axis; e_lambda and
    e_mu are the slack constants entering the eta ceiling and the error
    bound.  epsilon_s / epsilon_l control the strong-convexity split and
    may be left unset to be chosen automatically.
    """

    truth: ParameterPair
    sigma_xx: np.ndarray
    sigma_yx: np.ndarray
    sigma_yy: np.ndarray
    structure: np.ndarray
    beta: float = 1.0
    active_set_size: int = 1
    c_lambda: float = 2.0
    d_lambda: float = 4.0
    e_lambda: float = 1.0
    c_mu: float = 2.0
    d_mu: float = 4.0
    e_mu: float = 1.0
    epsilon_s: Optional[float] = None
    epsilon_l: Optional[float] = None
    b3: float = 0.05

    def __post_init__(self):
        object.__setattr__(self, "sigma_xx", linalg.check_symmetric(self.sigma_xx, "sigma_xx"))
        object.__setattr__(self, "sigma_yy", linalg.check_symmetric(self.sigma_yy, "sigma_yy"))
        object.__setattr__(self, "sigma_yx", linalg.as_matrix(self.sigma_yx, "sigma_yx"))
        object.__setattr__(self, "structure", linalg.check_symmetric(self.structure, "structure"))
        if self.beta < 1.0:
            raise InvalidInputError("the guarantees need beta >= 1")
        if not self.d_lambda > self.c_lambda > 1.0:
            raise InvalidInputError("need d_lambda > c_lambda > 1")
        if not self.d_mu > self.c_mu > 1.0:
            raise InvalidInputError("need d_mu > c_mu > 1")
        if self.e_lambda <= 0 or self.e_mu <= 0:
            raise InvalidInputError("e_lambda and e_mu must be positive")
        if self.active_set_size < 1:
            raise InvalidInputError("active_set_size must be >= 1")
        if not 0.0 < self.b3 < 1.0:
            raise InvalidInputError("b3 must lie in (0, 1)")
        for name in ("epsilon_s", "epsilon_l"):
            val = getattr(self, name)
            if val is not None and val <= 0:
                raise InvalidInputError(f"{name} must be positive when given")

    @property
    def p(self):
        return self.sigma_xx.shape[0]

    @property
    def q(self):
        return self.truth.q


@dataclass
class TheoryReport:
    """Every constant of the guarantee pipeline, in evaluation order."""

    omega_l_lower: float
    omega_l_upper: float
    omega_s_upper: float
    s_l: float
    ell_a: float
    ell_b: float
    r_star: float
    r_components: tuple
    lambda_interval: tuple
    mu_interval: tuple
    eta_bar: float
    lambda_: float
    mu: float
    eta: float
    alpha: float
    s_alpha: float
    epsilon_s: float
    epsilon_l: float
    gamma: float
    c_lambda_mu: float
    m_star: float
    h_a: float
    h_b: float
    bound_value: float
    n0_partial: float
    n0_complete: bool = False
    notes: dict = field(default_factory=dict)


def check_hypotheses(inputs, allow_null=False):
    """Validate the structural hypotheses, naming the violated clause.

    With allow_null=True a zero direct-link block passes (diagnostics
    only); constants that divide by it then degenerate.
    """
    if not linalg.is_spd(inputs.sigma_xx):
        raise HypothesisError("sigma_xx must be positive definite")
    if not linalg.is_spd(inputs.truth.omega_yy):
        raise HypothesisError("true omega_yy must be positive definite")
    null = not np.any(inputs.truth.omega_yx)
    if null and not allow_null:
        raise HypothesisError("true omega_yx is identically zero (no direct link)")
    if not null:
        oyx = inputs.truth.omega_yx
        core = oyx @ inputs.structure @ oyx.T
        if not linalg.is_spd(0.5 * (core + core.T)):
            raise HypothesisError(
                "omega_yx L omega_yx^t must be positive definite"
            )


def _core_eigs(inputs):
    oyx = inputs.truth.omega_yx
    core_l = oyx @ inputs.structure @ oyx.T
    core_s = oyx @ inputs.sigma_xx @ oyx.T
    lo_l, hi_l = linalg.eig_extremes(0.5 * (core_l + core_l.T))
    _, hi_s = linalg.eig_extremes(0.5 * (core_s + core_s.T))
    lo_yy, hi_yy = linalg.eig_extremes(inputs.truth.omega_yy)
    return lo_l, hi_l, hi_s, lo_yy, hi_yy


def eigen_bounds(inputs, allow_null=False):
    """Eigenvalue envelopes of the recurring matrix products.

    Returns (omega_l_lower, omega_l_upper, omega_s_upper).
    """
    check_hypotheses(inputs, allow_null)
    lo_l, hi_l, hi_s, lo_yy, hi_yy = _core_eigs(inputs)
    return (
        lo_l / (4.0 * hi_yy),
        4.0 * hi_l / lo_yy,
        4.0 * hi_s / lo_yy,
    )


def prior_constants(inputs, allow_null=False):
    """Structural-term value at the truth and the two max-norm constants.

    Returns (s_l, ell_a, ell_b).
    """
    check_hypotheses(inputs, allow_null)
    oyy = inputs.truth.omega_yy
    oyx = inputs.truth.omega_yx
    w = np.linalg.solve(oyy, oyx)
    s_l = float(np.sum(oyx * (w @ inputs.structure)))
    mid = w @ inputs.structure @ w.T
    ell_a = float(np.max(np.abs(mid))) if mid.size else 0.0
    ell_b = 2.0 * float(np.max(np.abs(w @ inputs.structure)))
    return s_l, ell_a, ell_b


def _beta_power(base, expo):
    """base**expo with the zero-exponent limit pinned to 1."""
    if expo == 0.0:
        return 1.0
    if base <= 0.0:
        return 0.0
    return math.exp(expo * math.log(base))


def validity_region(inputs, h_a, h_b, allow_null=False):
    """Admissible penalty box for the guarantee to apply.

    Returns ((lambda_lo, lambda_hi), (mu_lo, mu_hi), eta_bar) where the
    eta ceiling is evaluated conservatively at the lower lambda and mu
    endpoints, so any (lambda, mu) inside the intervals is covered.
    """
    if h_a < 0 or h_b < 0:
        raise InvalidInputError("h_a and h_b must be nonnegative")
    s_l, ell_a, ell_b = prior_constants(inputs, allow_null)
    lam_iv = (inputs.c_lambda * h_a, inputs.d_lambda * h_a)
    mu_iv = (inputs.c_mu * h_b, inputs.d_mu * h_b)
    denom = inputs.beta * _beta_power(s_l, inputs.beta - 1.0)
    if ell_a <= 0.0 or ell_b <= 0.0:
        return lam_iv, mu_iv, math.inf
    lam, mu = lam_iv[0], mu_iv[0]
    ceiling = min(
        (inputs.c_lambda - 1.0) * lam / (inputs.c_lambda * ell_a),
        (inputs.c_mu - 1.0) * mu / (inputs.c_mu * ell_b),
        inputs.e_lambda * h_a / ell_a,
        inputs.e_mu * h_b / ell_b,
    )
    return lam_iv, mu_iv, ceiling / denom


def alpha_and_salpha(inputs, lambda_, mu, eta, allow_null=False):
    """Cone-opening ratio of the estimation error and the sparsity level
    entering the restricted-isometry requirement.

    Returns (alpha, s_alpha).
    """
    s_l, ell_a, ell_b = prior_constants(inputs, allow_null)
    shift = eta * inputs.beta * _beta_power(s_l, inputs.beta - 1.0)
    num = max(
        (inputs.c_lambda + 1.0) * lambda_ / inputs.c_lambda + shift * ell_a,
        (inputs.c_mu + 1.0) * mu / inputs.c_mu + shift * ell_b,
    )
    den = min(
        (inputs.c_lambda - 1.0) * lambda_ / inputs.c_lambda - shift * ell_a,
        (inputs.c_mu - 1.0) * mu / inputs.c_mu - shift * ell_b,
    )
    if den <= 0.0:
        raise ValidityError(
            "penalties lie outside the admissible region (nonpositive "
            "denominator in the cone-opening ratio)"
        )
    alpha = num / den
    lo, hi = linalg.eig_extremes(inputs.sigma_xx)
    if lo <= 0.0:
        raise HypothesisError("sigma_xx must be positive definite")
    s_alpha = inputs.active_set_size * (1.0 + 12.0 * alpha**2 * hi / lo)
    return alpha, s_alpha


def r_star(inputs, allow_null=False):
    """Radius of the neighborhood on which local strong convexity holds.

    Returns (r_star, (r1, r2, r3, r4)); with a null direct-link block the
    two structure-dependent components are reported as nan.
    """
    check_hypotheses(inputs, allow_null)
    lo_l, hi_l, hi_s, lo_yy, _ = _core_eigs(inputs)
    _, hi_sxx = linalg.eig_extremes(inputs.sigma_xx)
    _, hi_struct = linalg.eig_extremes(inputs.structure)
    r1 = lo_yy / 2.0
    r2 = ((math.sqrt(10.0) - math.sqrt(7.0)) / math.sqrt(5.0)) * math.sqrt(hi_s) / (
        (3.0 * math.sqrt(3.0) / (2.0 * math.sqrt(2.0))) * math.sqrt(hi_sxx)
    )
    null = not np.any(inputs.truth.omega_yx)
    if null:
        r3 = r4 = math.nan
        total = min(r1, r2)
    else:
        denom = linalg.spectral_norm(inputs.structure @ inputs.truth.omega_yx.T)
        r3 = lo_l / (4.0 * denom) if denom > 0 else math.inf
        r4 = (
            (math.sqrt(2.0) - 1.0) * math.sqrt(hi_l) / math.sqrt(hi_struct)
            if hi_struct > 0
            else math.inf
        )
        total = min(r1, r2, r3, r4)
    return total, (r1, r2, r3, r4)


def gamma_constant(inputs, eta, p, epsilon_s=None, epsilon_l=None, allow_null=False):
    """Local strong-convexity constant of the smooth objective part.

    epsilon_s and epsilon_l must keep the leading coefficient positive;
    when omitted they fall back to the automatic choice.
    """
    if epsilon_s is None or epsilon_l is None:
        eps_s, eps_l = choose_epsilons(inputs, eta, p, allow_null)
        epsilon_s = epsilon_s if epsilon_s is not None else eps_s
        epsilon_l = epsilon_l if epsilon_l is not None else eps_l
    w_lo, w_hi, w_s = eigen_bounds(inputs, allow_null)
    load = epsilon_s * w_s + eta * inputs.beta * _beta_power(p, inputs.beta - 1.0) * _beta_power(
        w_hi, inputs.beta
    ) * epsilon_l
    if load >= 1.0:
        raise InvalidInputError(
            f"epsilon_s/epsilon_l too large: convexity load {load:g} >= 1; "
            "choose smaller values"
        )
    _, _, _, _, hi_yy = _core_eigs(inputs)
    lo_struct, _ = linalg.eig_extremes(inputs.structure)
    lo_sxx, _ = linalg.eig_extremes(inputs.sigma_xx)
    a1 = 1.0 - load
    a2 = 2.0 * epsilon_s / (2.0 + epsilon_s)
    a3 = eta * inputs.beta * _beta_power(p * w_lo, inputs.beta - 1.0) * (
        2.0 * epsilon_l / (2.0 + epsilon_l)
    )
    gamma = min(
        a1 / (8.0 * hi_yy**2),
        a2 * max(lo_struct, 0.0) / (4.0 * hi_yy) + a3 * lo_sxx / (40.0 * hi_yy),
    )
    if gamma <= 0.0:
        raise NumericError(
            f"strong-convexity constant came out nonpositive ({gamma:g})"
        )
    return gamma


def choose_epsilons(inputs, eta, p, allow_null=False, grid_size=50):
    """Pick the convexity-split constants by direct search.

    Scans a log grid of ``grid_size`` points per axis and keeps the pair
    maximizing the strong-convexity constant subject to its precondition.
    """
    w_lo, w_hi, w_s = eigen_bounds(inputs, allow_null)
    _, _, _, _, hi_yy = _core_eigs(inputs)
    lo_struct, _ = linalg.eig_extremes(inputs.structure)
    lo_sxx, _ = linalg.eig_extremes(inputs.sigma_xx)
    struct_load = eta * inputs.beta * _beta_power(p, inputs.beta - 1.0) * _beta_power(
        w_hi, inputs.beta
    )
    a3_scale = eta * inputs.beta * _beta_power(p * w_lo, inputs.beta - 1.0)

    grid = np.logspace(-6, 2, grid_size)
    best = None
    best_pair = (grid[0], grid[0])
    for eps_s in grid:
        load_s = eps_s * w_s
        if load_s >= 1.0:
            continue
        a2 = 2.0 * eps_s / (2.0 + eps_s)
        for eps_l in grid:
            load = load_s + struct_load * eps_l
            if load >= 1.0:
                continue
            a1 = 1.0 - load
            a3 = a3_scale * 2.0 * eps_l / (2.0 + eps_l)
            gamma = min(
                a1 / (8.0 * hi_yy**2),
                a2 * max(lo_struct, 0.0) / (4.0 * hi_yy)
                + a3 * lo_sxx / (40.0 * hi_yy),
            )
            if best is None or gamma > best:
                best = gamma
                best_pair = (float(eps_s), float(eps_l))
    if best is None or best <= 0.0:
        raise InvalidInputError(
            "no admissible epsilon pair found; the structural load is too large"
        )
    return best_pair


def c_lambda_mu(inputs):
    """Penalty amplification constant of the final bound."""
    return max(
        (inputs.c_lambda + 1.0) * inputs.d_lambda / inputs.c_lambda + inputs.e_lambda,
        (inputs.c_mu + 1.0) * inputs.d_mu / inputs.c_mu + inputs.e_mu,
    )


def empirical_noise(truth, pop, emp):
    """Deviation matrices of the empirical covariances and their max norms.

    Returns (a_n, b_n, h_a, h_b, m_star).  m_star only involves population
    quantities and bounds the sub-Gaussian scale of the deviations.
    """
    if pop.q != emp.q or pop.p != emp.p or truth.q != pop.q or truth.p != pop.p:
        raise InvalidInputError("dimension mismatch between truth and covariances")
    try:
        w = np.linalg.solve(truth.omega_yy, truth.omega_yx)
    except np.linalg.LinAlgError as exc:
        raise NumericError("true omega_yy is singular") from exc
    dxx = emp.s_xx - pop.s_xx
    a_n = (emp.s_yy - pop.s_yy) - w @ dxx @ w.T
    b_n = 2.0 * ((emp.s_yx - pop.s_yx) + w @ dxx)
    h_a = float(np.max(np.abs(a_n)))
    h_b = float(np.max(np.abs(b_n)))
    cross = w @ pop.s_xx @ w.T
    m_star = float(np.max(np.abs(np.diag(pop.s_xx)))) + float(
        np.max(np.abs(np.diag(cross)))
    )
    return a_n, b_n, h_a, h_b, m_star


def error_bound(gamma, c_lm, m_star, s_size, n, p, q, b3):
    """Right-hand side of the estimation-error guarantee."""
    if gamma <= 0.0:
        raise InvalidInputError("gamma must be positive")
    if n < 1:
        raise InvalidInputError("n must be >= 1")
    log_term = math.log(10.0 * (p + q) ** 2) - math.log(b3)
    return (
        16.0 * m_star * c_lm * math.sqrt(s_size) / gamma * math.sqrt(log_term / n)
    )


def min_observations_partial(gamma, c_lm, m_star, s_size, r_val, p, q, b3):
    """Computable branches of the minimal sample size.

    The guarantee's sample-size floor is the maximum of three branches; the
    middle one depends on absolute constants that are never quantified, so
    only the first and third are evaluated.  The caller must treat the
    result as a lower bound on the true floor.
    """
    log_term = math.log(10.0 * (p + q) ** 2) - math.log(b3)
    branch1 = log_term * c_lm**2 * s_size * (16.0 * m_star) ** 2 / (
        r_val**2 * gamma**2
    )
    return max(branch1, log_term)


def build_report(inputs, emp, eta=None, lambda_=None, mu=None, n=None, allow_null=False):
    """Assemble the full constant report for one model and one sample.

    The penalties default to the conservative corner of the admissible
    region: lambda and mu at their lower endpoints, eta at ninety percent
    of its ceiling (or zero when the ceiling is infinite and no value is
    given).
    """
    from .model import CovarianceTriplet

    pop = CovarianceTriplet(
        s_yy=inputs.sigma_yy, s_yx=inputs.sigma_yx, s_xx=inputs.sigma_xx, n=0
    )

    w_lo, w_hi, w_s = eigen_bounds(inputs, allow_null)
    s_l, ell_a, ell_b = prior_constants(inputs, allow_null)
    _, _, h_a, h_b, m_star = empirical_noise(inputs.truth, pop, emp)
    lam_iv, mu_iv, eta_bar = validity_region(inputs, h_a, h_b, allow_null)

    if lambda_ is None:
        lambda_ = lam_iv[0]
    if mu is None:
        mu = mu_iv[0]
    if eta is None:
        eta = 0.9 * eta_bar if math.isfinite(eta_bar) else 0.0

    alpha, s_alpha = alpha_and_salpha(inputs, lambda_, mu, eta, allow_null)
    r_val, r_comp = r_star(inputs, allow_null)
    eps_s, eps_l = (
        (inputs.epsilon_s, inputs.epsilon_l)
        if inputs.epsilon_s is not None and inputs.epsilon_l is not None
        else choose_epsilons(inputs, eta, inputs.p, allow_null)
    )
    gamma = gamma_constant(inputs, eta, inputs.p, eps_s, eps_l, allow_null)
    c_lm = c_lambda_mu(inputs)

    n_eff = n if n is not None else (emp.n if emp.n > 0 else 1)
    bound = error_bound(
        gamma, c_lm, m_star, inputs.active_set_size, n_eff, inputs.p, inputs.q, inputs.b3
    )
    n0 = min_observations_partial(
        gamma, c_lm, m_star, inputs.active_set_size, r_val, inputs.p, inputs.q, inputs.b3
    )
    return TheoryReport(
        omega_l_lower=w_lo,
        omega_l_upper=w_hi,
        omega_s_upper=w_s,
        s_l=s_l,
        ell_a=ell_a,
        ell_b=ell_b,
        r_star=r_val,
        r_components=r_comp,
        lambda_interval=lam_iv,
        mu_interval=mu_iv,
        eta_bar=eta_bar,
        lambda_=lambda_,
        mu=mu,
        eta=eta,
        alpha=alpha,
        s_alpha=s_alpha,
        epsilon_s=eps_s,
        epsilon_l=eps_l,
        gamma=gamma,
        c_lambda_mu=c_lm,
        m_star=m_star,
        h_a=h_a,
        h_b=h_b,
        bound_value=bound,
        n0_partial=n0,
        n0_complete=False,
        notes={
            "n_used": n_eff,
            "n0_branches": "sample-size branch with unquantified absolute "
            "constants omitted",
        },
    )


def check_rip(sigma_xx, s_xx, s, omega_yx=None):
    """Brute-force restricted-isometry check of an empirical covariance.

    Verifies that every quadratic form on supports of size at most ``s``
    is sandwiched between one half and three halves of its population
    value; supports of maximal size dominate the smaller ones, so only
    those are enumerated.  When ``omega_yx`` is given, the companion
    condition capping the top eigenvalue of the sandwiched empirical
    covariance at 7/5 of its population value is checked too.

    Returns (holds, worst_ratio_low, worst_ratio_high, lambda_condition).
    """
    sigma = linalg.check_symmetric(sigma_xx, "sigma_xx")
    emp = linalg.check_symmetric(s_xx, "s_xx")
    p = sigma.shape[0]
    if emp.shape[0] != p:
        raise InvalidInputError("sigma_xx and s_xx must share dimensions")
    if s < 1:
        raise InvalidInputError("support size must be >= 1")
    if p > RIP_MAX_P or s > RIP_MAX_S:
        raise CapacityError(
            f"exact check limited to p <= {RIP_MAX_P} and s <= {RIP_MAX_S}; "
            "use a Monte-Carlo sample of random supports beyond that"
        )
    size = min(s, p)
    worst_low = math.inf
    worst_high = -math.inf
    for support in itertools.combinations(range(p), size):
        idx = np.asarray(support)
        sig_t = sigma[np.ix_(idx, idx)]
        try:
            chol = np.linalg.cholesky(sig_t)
        except np.linalg.LinAlgError as exc:
            raise NumericError(
                "population covariance is singular on a support"
            ) from exc
        half = np.linalg.solve(chol, np.eye(size))
        pencil = half @ emp[np.ix_(idx, idx)] @ half.T
        lo, hi = linalg.eig_extremes(0.5 * (pencil + pencil.T))
        worst_low = min(worst_low, lo)
        worst_high = max(worst_high, hi)
    holds = worst_low >= 0.5 and worst_high <= 1.5

    lambda_condition = True
    if omega_yx is not None:
        oyx = linalg.as_matrix(omega_yx, "omega_yx")
        _, top_emp = linalg.eig_extremes(
            0.5 * ((oyx @ emp @ oyx.T) + (oyx @ emp @ oyx.T).T)
        )
        _, top_pop = linalg.eig_extremes(
            0.5 * ((oyx @ sigma @ oyx.T) + (oyx @ sigma @ oyx.T).T)
        )
        lambda_condition = top_emp <= 1.4 * top_pop
    return holds and lambda_condition, worst_low, worst_high, lambda_condition
