"""Conjugate linear-model core under the Zellner-Siow prior.

With B the current design (intercept included), beta | sigma2, tau ~
N(0, tau sigma2 (B'B)^-1), pi(sigma2) ~ 1/sigma2 and tau ~
IG(1/2, n/2), the coefficients and variance integrate out of the
likelihood, leaving

    pi(y | B, tau) propto (1 + tau)^(-K/2) * Q^(-n/2),

with K the non-intercept column count and Q = y'y - tau/(1+tau) *
y'B (B'B)^-1 B'y. All linear algebra runs through one Cholesky
factorization of B'B; no explicit inverse is ever formed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import qr, solve_triangular

from .errors import SingularDesign

# Squared ratio of extreme Cholesky diagonal entries above which the
# Gram matrix is treated as rank deficient.
CONDITION_LIMIT = 1e12

# Slack on the projection bound ssq_fit <= y'y before a cache is
# declared numerically unusable.
PROJECTION_SLACK = 1e-8


@dataclass(frozen=True)
class GramCache:
    """Cholesky factorization of B'B with the response cross-products.

    ``chol`` is lower triangular with B'B = chol chol'. ``ssq_fit`` is
    the fitted sum of squares y'B (B'B)^-1 B'y.
    """

    chol: np.ndarray
    bty: np.ndarray
    yty: float
    ssq_fit: float
    n_obs: int
    n_col: int


def gram_cache(basis: np.ndarray, y: np.ndarray) -> GramCache:
    """Factorize a design against the response.

    The lower-triangular factor of B'B is taken from a QR factorization
    of B itself (chol = R', so chol chol' = B'B): unlike a direct
    Cholesky of the Gram matrix this keeps the fitted sum of squares
    accurate up to the condition number of B rather than its square,
    which matters because near-collinear ridge proposals approach the
    rejection threshold. Raises SingularDesign when the factor is
    rank deficient, the diagonal condition estimate exceeds
    CONDITION_LIMIT, or the fitted sum of squares breaches the
    projection bound ssq_fit <= y'y beyond PROJECTION_SLACK.
    """
    if basis.shape[1] > basis.shape[0]:
        raise SingularDesign("design has more columns than rows")
    r_factor = qr(basis, mode="r", check_finite=False)[0][: basis.shape[1]]
    signs = np.sign(np.diagonal(r_factor))
    if np.any(signs == 0.0):
        raise SingularDesign("Gram matrix is not positive definite")
    chol = (r_factor * signs[:, None]).T
    diag = np.diagonal(chol)
    if (diag.max() / diag.min()) ** 2 > CONDITION_LIMIT:
        raise SingularDesign("Gram matrix condition estimate too large")
    bty = basis.T @ y
    w = solve_triangular(chol, bty, lower=True, check_finite=False)
    ssq_fit = float(w @ w)
    yty = float(y @ y)
    if ssq_fit > yty + PROJECTION_SLACK:
        raise SingularDesign("fitted sum of squares exceeds y'y")
    return GramCache(
        chol=np.ascontiguousarray(chol),
        bty=bty,
        yty=yty,
        ssq_fit=ssq_fit,
        n_obs=basis.shape[0],
        n_col=basis.shape[1],
    )


def log_marginal(cache: GramCache, tau: float) -> float:
    """Log marginal likelihood of the design given tau, up to terms
    shared by all designs on the same response."""
    shrink = tau / (1.0 + tau)
    quadform = cache.yty - shrink * cache.ssq_fit
    if not np.isfinite(quadform) or quadform <= 0.0:
        raise SingularDesign("marginal quadratic form is not positive")
    n_spline = cache.n_col - 1
    return -0.5 * n_spline * np.log1p(tau) - 0.5 * cache.n_obs * np.log(quadform)


def gibbs_beta(cache: GramCache, sigma2: float, tau: float, rng) -> np.ndarray:
    """Draw beta ~ N(c (B'B)^-1 B'y, sigma2 c (B'B)^-1), c = tau/(1+tau).

    ``sigma2`` and ``tau`` are the values from the previous iteration.
    """
    shrink = tau / (1.0 + tau)
    w = solve_triangular(cache.chol, cache.bty, lower=True, check_finite=False)
    mean = shrink * solve_triangular(
        cache.chol.T, w, lower=False, check_finite=False
    )
    z = rng.standard_normal(cache.n_col)
    noise = solve_triangular(cache.chol.T, z, lower=False, check_finite=False)
    return mean + np.sqrt(sigma2 * shrink) * noise


def gibbs_sigma2(resid_ssq: float, n_obs: float, rng) -> float:
    """Draw sigma2 ~ IG(n/2, ||y - B beta||^2 / 2)."""
    return 0.5 * resid_ssq / rng.standard_gamma(0.5 * n_obs)


def gibbs_tau(fit_ssq: float, sigma2: float, k_total: int, n_obs: float, rng) -> float:
    """Draw tau ~ IG(1 + K_total/2, (n + ||B beta||^2 / sigma2) / 2).

    ``fit_ssq`` is ||B beta||^2 with the intercept column included;
    ``k_total`` counts non-intercept columns.
    """
    shape = 1.0 + 0.5 * k_total
    rate = 0.5 * (n_obs + fit_ssq / sigma2)
    return rate / rng.standard_gamma(shape)
