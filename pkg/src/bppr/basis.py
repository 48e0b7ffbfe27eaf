"""Ridge basis construction: knots, modified natural splines, indicators.

A spline ridge over projections u = X theta uses a basis that is
identically zero left of an initial knot t0, piecewise cubic with C2
smoothness across its interior knots, and affine right of the final
knot. The first column is the hinge (u - t0)_+; column l (l >= 2) is
d_{l-1}(u) - d_K(u) with

    d_l(u) = [(u - t_l)_+^3 - (u - t_{K+1})_+^3] / (t_{K+1} - t_l),

so the cubic growth cancels beyond t_{K+1}. A ridge over dummy columns
only is the single indicator 1 - prod_j (1 - d_j), the "any level
active" column, with no knots.
"""

from __future__ import annotations

import numpy as np

from .errors import DegenerateKnots, DegenerateProjection


def knot_bounds(proj: np.ndarray, q_upper: float, prob_relu: float):
    """Admissible interval (lower, upper) for the initial knot t0.

    The upper bound is the q_upper quantile of the projections; the
    lower bound stretches the interval below the minimum so that t0
    exceeds the minimum with prior probability prob_relu.
    """
    lo = float(np.min(proj))
    hi = float(np.max(proj))
    if hi == lo:
        raise DegenerateProjection("all projections coincide")
    upper = float(np.quantile(proj, q_upper))
    lower = upper - (upper - lo) / prob_relu
    return lower, upper


def interior_knots(proj: np.ndarray, knot0: float, n_basis: int) -> np.ndarray:
    """Knots t_1..t_{K+1}: evenly spaced quantiles of the projections
    strictly above the initial knot."""
    above = proj[proj > knot0]
    if above.size < n_basis + 1:
        raise DegenerateKnots(
            f"only {above.size} projections exceed the initial knot; "
            f"need {n_basis + 1}"
        )
    probs = np.arange(n_basis + 1) / n_basis
    knots = np.quantile(above, probs)
    if np.any(knots[:-1] == knots[-1]):
        raise DegenerateKnots("interior knot ties the boundary knot")
    return knots


def spline_basis(u, knot0: float, knots: np.ndarray) -> np.ndarray:
    """Evaluate the K basis functions at projections ``u``; (len(u), K)."""
    u = np.atleast_1d(np.asarray(u, dtype=float))
    t = np.asarray(knots, dtype=float)
    n_basis = t.size - 1
    out = np.empty((u.size, n_basis))
    out[:, 0] = np.maximum(u - knot0, 0.0)
    if n_basis >= 2:
        top = t[-1]
        hinge_top_cubed = np.maximum(u - top, 0.0) ** 3

        def scaled_diff(t_l):
            return (np.maximum(u - t_l, 0.0) ** 3 - hinge_top_cubed) / (top - t_l)

        d_last = scaled_diff(t[n_basis - 1])
        for ell in range(2, n_basis + 1):
            out[:, ell - 1] = scaled_diff(t[ell - 2]) - d_last
    return out


def indicator_column(d_block: np.ndarray) -> np.ndarray:
    """1 - prod_j (1 - d_j): one when any selected dummy is active."""
    return 1.0 - np.prod(1.0 - d_block, axis=1)


def component_columns(component, x_std, d_raw, dummy_index_set) -> np.ndarray:
    """Design columns for one ridge component on an encoded input set."""
    if component.kind == "cat":
        positions = np.searchsorted(np.asarray(dummy_index_set), component.feat)
        return indicator_column(d_raw[:, positions])[:, None]
    proj = x_std[:, component.feat] @ component.proj_dir
    return spline_basis(proj, component.knot0, component.knots)


def build_design(components, x_std, d_raw, dummy_index_set) -> np.ndarray:
    """Full design: intercept column, then each component's block."""
    n_obs = x_std.shape[0]
    blocks = [np.ones((n_obs, 1))]
    for component in components:
        blocks.append(component_columns(component, x_std, d_raw, dummy_index_set))
    return np.concatenate(blocks, axis=1) if len(blocks) > 1 else blocks[0]
