"""Chain diagnostics and marginal-effect summaries.

Effective sample size uses the initial-positive-sequence truncation:
autocorrelations are summed in consecutive pairs and the sum stops
before the first nonpositive pair, which caps ESS at the trace length.
Split R-hat slices one trace into contiguous sub-chains and compares
within- to between-segment variance. ALE curves accumulate average
local prediction differences across quantile bins of one feature.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputError
from .sampler import posterior_mean_draws


def effective_sample_size(trace) -> float:
    """ESS with Geyer's initial-positive-sequence truncation.

    Autocorrelations come from direct lagged sums, computed lag by lag
    only as far as the truncation needs: pair sums rho_1 + rho_2,
    rho_3 + rho_4, ... accumulate while positive and the sum stops
    before the first nonpositive pair, so ESS = n / (1 + 2 * sum) <= n.
    """
    x = np.asarray(trace, dtype=float)
    n = x.size
    if n < 10:
        raise InputError("trace too short for an ESS estimate")
    x = x - x.mean()
    acov0 = float(x @ x) / n
    if acov0 == 0.0:
        raise InputError("zero variance: constant trace")

    def rho(k):
        return float(x[:-k] @ x[k:]) / (n * acov0)

    acc = 0.0
    k = 1
    while k + 1 < n:
        pair = rho(k) + rho(k + 1)
        if pair <= 0.0:
            break
        acc += pair
        k += 2
    return n / (1.0 + 2.0 * acc)


def split_rhat(trace, n_split: int = 5) -> float:
    """Split R-hat over ``n_split`` contiguous sub-chains.

    sqrt(((m-1)/m * W + B/m) / W) with m the sub-chain length, W the
    mean within-segment variance and B the between-segment variance.
    """
    trace = np.asarray(trace, dtype=float)
    seg_len = trace.size // n_split
    if seg_len < 10:
        raise InputError("trace too short to split")
    segments = trace[: seg_len * n_split].reshape(n_split, seg_len)
    within = segments.var(axis=1, ddof=1).mean()
    if within == 0.0:
        raise InputError("zero within-segment variance")
    between = seg_len * segments.mean(axis=1).var(ddof=1)
    return float(np.sqrt(((seg_len - 1) / seg_len * within + between / seg_len)
                         / within))


def interval_coverage(lower, upper, truth) -> float:
    """Fraction of truths inside their pointwise intervals."""
    lower = np.asarray(lower, dtype=float)
    upper = np.asarray(upper, dtype=float)
    truth = np.asarray(truth, dtype=float)
    return float(np.mean((lower <= truth) & (truth <= upper)))


@dataclass(frozen=True)
class AleCurve:
    """One-feature accumulated-local-effects summary.

    ``centers`` are bin midpoints; ``mean`` the posterior mean effect
    and the bounds equal-tailed quantiles over posterior draws. Effects
    are centered so their count-weighted average over bins is zero.
    """

    centers: np.ndarray
    mean: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    counts: np.ndarray
    level: float


def ale_from_draw_fn(draw_fn, x_raw, column: np.ndarray, n_bins: int,
                     level: float = 0.95,
                     set_column=None) -> AleCurve:
    """ALE over an arbitrary draw function.

    ``draw_fn(x)`` maps a raw input table to an (n_draws, n_rows) mean
    matrix; ``column`` holds the raw values of the feature being
    swept and ``set_column(x, values)`` returns a copy of ``x`` with
    that feature overwritten.
    """
    edges = np.quantile(column, np.linspace(0.0, 1.0, n_bins + 1))
    if np.unique(edges).size != edges.size:
        raise InputError(
            "feature has too few distinct values for the requested bins; "
            "reduce n_bins"
        )
    bins = np.clip(np.searchsorted(edges, column, side="right") - 1, 0, n_bins - 1)
    counts = np.bincount(bins, minlength=n_bins)

    at_edge = [draw_fn(set_column(x_raw, np.full(column.size, e))) for e in edges]
    n_draws = at_edge[0].shape[0]
    deltas = np.empty((n_draws, n_bins))
    for k in range(n_bins):
        in_bin = bins == k
        deltas[:, k] = (at_edge[k + 1][:, in_bin]
                        - at_edge[k][:, in_bin]).mean(axis=1)
    accumulated = np.concatenate(
        [np.zeros((n_draws, 1)), np.cumsum(deltas, axis=1)], axis=1
    )
    per_bin = 0.5 * (accumulated[:, :-1] + accumulated[:, 1:])
    per_bin -= (per_bin * counts).sum(axis=1, keepdims=True) / counts.sum()

    lo_q, hi_q = 0.5 * (1.0 - level), 0.5 * (1.0 + level)
    return AleCurve(
        centers=0.5 * (edges[:-1] + edges[1:]),
        mean=per_bin.mean(axis=0),
        lower=np.quantile(per_bin, lo_q, axis=0),
        upper=np.quantile(per_bin, hi_q, axis=0),
        counts=counts,
        level=level,
    )


def ale_curve(chain, x_raw, feature: str, n_bins: int = 10,
              level: float = 0.95) -> AleCurve:
    """One-way ALE of a real-valued feature under a fitted chain.

    ``x_raw`` is a raw-scale DataFrame containing the training feature
    columns; ``feature`` must be one of the real (non-categorical)
    features.
    """
    std = chain.standardization
    if feature not in std.source_cols:
        raise InputError(f"unknown feature '{feature}'")
    if feature in std.cat_levels:
        raise InputError(f"feature '{feature}' is categorical; ALE needs a "
                         "real-valued feature")
    column = np.asarray(x_raw[feature], dtype=float)

    def set_column(x, values):
        out = x.copy()
        out[feature] = values
        return out

    return ale_from_draw_fn(
        lambda x: posterior_mean_draws(chain, x),
        x_raw, column, n_bins, level, set_column,
    )
