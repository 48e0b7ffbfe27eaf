"""Multivariate responses via an orthogonal response basis.

Responses are column-centered and projected onto the top right singular
vectors of the centered response matrix; each score column gets its own
independent univariate chain with a seed derived deterministically from
the master seed, and predictions map the per-component draws back
through the basis. The truncation residual is ignored.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from typing import Optional, Sequence

import numpy as np
import pandas as pd

from .data import Dataset, build_standardization
from .errors import InputError, NumericError
from .model import Hyperparams
from .sampler import posterior_mean_draws, run_chain


def derive_component_seed(seed: int, index: int) -> int:
    """Deterministic per-component seed: splitmix64 finalizer over the
    master seed advanced ``index + 1`` times."""
    z = (seed + (index + 1) * 0x9E3779B97F4A7C15) & 0xFFFFFFFFFFFFFFFF
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & 0xFFFFFFFFFFFFFFFF
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & 0xFFFFFFFFFFFFFFFF
    return int(z ^ (z >> 31))


@dataclass(frozen=True)
class ResponseBasis:
    """Orthonormal response basis with the stored column means.

    ``h`` is D x D_minus with orthonormal columns ordered by
    nonincreasing explained variance (squared singular value / (n-1)).
    """

    h: np.ndarray
    y_mean: np.ndarray
    explained_variance: np.ndarray

    @property
    def n_components(self) -> int:
        return self.h.shape[1]


def fit_response_basis(y_mat: np.ndarray, n_components: Optional[int] = None,
                       var_threshold: Optional[float] = None) -> ResponseBasis:
    """Top right singular vectors of the column-centered response.

    Exactly one of ``n_components`` and ``var_threshold`` selects the
    truncation: a fixed count, or the smallest count whose cumulative
    share of total variance reaches the threshold.
    """
    y_mat = np.asarray(y_mat, dtype=float)
    if y_mat.ndim != 2 or y_mat.shape[0] < 2:
        raise InputError("response matrix must be 2-D with n >= 2 rows")
    if (n_components is None) == (var_threshold is None):
        raise InputError("specify exactly one of n_components/var_threshold")
    n_obs, n_dim = y_mat.shape
    y_mean = y_mat.mean(axis=0)
    centered = y_mat - y_mean
    _, singular, vt = np.linalg.svd(centered, full_matrices=False)
    if singular[0] == 0.0:
        raise NumericError("degenerate response: all rows identical")
    variance = singular ** 2 / (n_obs - 1)
    if var_threshold is not None:
        if not 0.0 < var_threshold <= 1.0:
            raise InputError("var_threshold must lie in (0, 1]")
        share = np.cumsum(variance) / variance.sum()
        n_components = int(np.searchsorted(share, var_threshold) + 1)
    if not 1 <= n_components <= min(n_obs, n_dim):
        raise InputError(
            f"n_components must lie in [1, {min(n_obs, n_dim)}], "
            f"got {n_components}"
        )
    return ResponseBasis(
        h=vt[:n_components].T.copy(),
        y_mean=y_mean,
        explained_variance=variance[:n_components],
    )


def transform(basis: ResponseBasis, y_mat: np.ndarray) -> np.ndarray:
    """Per-row scores H'(y - mean)."""
    y_mat = np.asarray(y_mat, dtype=float)
    if y_mat.shape[-1] != basis.h.shape[0]:
        raise InputError("response dimension mismatch")
    return (y_mat - basis.y_mean) @ basis.h


def reconstruct(basis: ResponseBasis, eta: np.ndarray) -> np.ndarray:
    """Per-row responses mean + H eta."""
    eta = np.asarray(eta, dtype=float)
    if eta.shape[-1] != basis.h.shape[1]:
        raise InputError("score dimension mismatch")
    return basis.y_mean + eta @ basis.h.T


@dataclass(frozen=True)
class MultivariateChain:
    """Independent per-component chains plus the response basis."""

    chains: tuple
    basis: ResponseBasis

    @property
    def n_components(self) -> int:
        return len(self.chains)


def _fit_component(args):
    dataset, hyper = args
    return run_chain(dataset, hyper)


def fit_multivariate(x_df: pd.DataFrame, y_mat: np.ndarray,
                     hyper: Hyperparams = Hyperparams(),
                     categorical: Sequence[str] = (),
                     n_components: Optional[int] = None,
                     var_threshold: Optional[float] = None,
                     n_workers: int = 1) -> MultivariateChain:
    """One independent chain per retained response component.

    Component d runs with seed derive_component_seed(hyper.seed, d), so
    results are identical whether components run serially or in a
    worker pool (``n_workers`` > 1).
    """
    y_mat = np.asarray(y_mat, dtype=float)
    if len(x_df) != y_mat.shape[0]:
        raise InputError("feature rows and response rows differ")
    basis = fit_response_basis(y_mat, n_components, var_threshold)
    scores = transform(basis, y_mat)
    x_std, d_raw, std = build_standardization(
        x_df, categorical=categorical,
        response=tuple(f"score{d}" for d in range(basis.n_components)),
    )
    jobs = []
    for d in range(basis.n_components):
        # Contiguous copy: a strided column view can steer BLAS onto a
        # different kernel than the contiguous array workers unpickle,
        # breaking bitwise invariance across worker counts.
        dataset = Dataset(x_std=x_std, d_raw=d_raw,
                          y=np.ascontiguousarray(scores[:, d]),
                          standardization=std)
        jobs.append(
            (dataset, replace(hyper, seed=derive_component_seed(hyper.seed, d)))
        )
    if n_workers > 1:
        with ProcessPoolExecutor(max_workers=n_workers) as pool:
            chains = tuple(pool.map(_fit_component, jobs))
    else:
        chains = tuple(_fit_component(job) for job in jobs)
    return MultivariateChain(chains=chains, basis=basis)


@dataclass(frozen=True)
class MultivariatePrediction:
    """Pointwise summaries per output dimension, each (n_new, D)."""

    mean: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    level: float


def predict_multivariate(fit: MultivariateChain, x_new, *,
                         level: float = 0.95, seed: int = 0,
                         include_noise: bool = False) -> MultivariatePrediction:
    """Map per-component posterior draws back through the basis.

    Draw s of the response surface stacks the s-th draw of every
    component; intervals are equal-tailed over draws, computed in
    output-dimension chunks to bound memory. ``include_noise`` adds
    each component's observation noise before reconstruction.
    """
    score_draws = [posterior_mean_draws(chain, x_new) for chain in fit.chains]
    n_states = {draws.shape[0] for draws in score_draws}
    if len(n_states) != 1:
        raise InputError("component chains retain different draw counts")
    if include_noise:
        rng = np.random.default_rng(seed)
        score_draws = [
            draws + np.sqrt([st.sigma2 for st in chain.states])[:, None]
            * rng.standard_normal(draws.shape)
            for chain, draws in zip(fit.chains, score_draws)
        ]
    stacked = np.stack(score_draws, axis=-1)  # (S, n_new, D_minus)
    n_draws, n_new, _ = stacked.shape
    n_dim = fit.basis.h.shape[0]
    mean = np.empty((n_new, n_dim))
    lower = np.empty((n_new, n_dim))
    upper = np.empty((n_new, n_dim))
    lo_q, hi_q = 0.5 * (1.0 - level), 0.5 * (1.0 + level)
    chunk = max(1, int(2e7) // (n_draws * n_new))
    for start in range(0, n_dim, chunk):
        h_block = fit.basis.h[start:start + chunk]  # (c, D_minus)
        block = stacked @ h_block.T + fit.basis.y_mean[start:start + chunk]
        mean[:, start:start + chunk] = block.mean(axis=0)
        lower[:, start:start + chunk] = np.quantile(block, lo_q, axis=0)
        upper[:, start:start + chunk] = np.quantile(block, hi_q, axis=0)
    return MultivariatePrediction(mean=mean, lower=lower, upper=upper,
                                  level=level)
