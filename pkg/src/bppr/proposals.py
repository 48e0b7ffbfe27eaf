"""Adaptive reversible-jump proposals.

Birth proposals reuse structure already in the model: the active
dimension count a* is drawn from counts of existing ridge sizes and the
feature set J* by sequential weighted sampling without replacement from
feature-inclusion counts (a Wallenius draw), both with constant floors
so nothing has probability zero. Directions are uniform on the active
subsphere at birth and power spherical around the current direction on
change moves.
"""

from __future__ import annotations

from itertools import permutations
from math import lgamma, log

import numpy as np
from scipy.special import logsumexp

# The exhaustive Wallenius pmf enumerates a! draw orders; above this
# size the enumeration is refused rather than silently approximated.
WALLENIUS_MAX_SET = 8


def adaptive_weights(components, n_act_max: int, n_feat: int,
                     w_n_act0: float, w_feat0: float):
    """Proposal weights (w_n_act, w_feat) from the current components.

    w_n_act[a-1] = w_n_act0 + #{m : a_m = a}, a = 1..n_act_max;
    w_feat[j] = w_feat0 + #{m : j in J_m}.
    """
    w_n_act = np.full(n_act_max, w_n_act0)
    w_feat = np.full(n_feat, w_feat0)
    for component in components:
        w_n_act[component.n_act - 1] += 1.0
        w_feat[component.feat] += 1.0
    return w_n_act, w_feat


def sample_n_act(w_n_act: np.ndarray, rng) -> int:
    """Draw the active dimension count, 1-based."""
    return int(rng.choice(w_n_act.size, p=w_n_act / w_n_act.sum())) + 1


def sample_feature_set(w_feat: np.ndarray, n_act: int, rng) -> np.ndarray:
    """Draw a sorted feature set of size n_act.

    Singletons are uniform over all features; larger sets come from
    sequential weighted draws without replacement.
    """
    n_feat = w_feat.size
    if n_act == 1:
        return np.array([rng.integers(n_feat)])
    weights = w_feat.astype(float).copy()
    chosen = np.empty(n_act, dtype=int)
    for k in range(n_act):
        j = int(rng.choice(n_feat, p=weights / weights.sum()))
        chosen[k] = j
        weights[j] = 0.0
    return np.sort(chosen)


def wallenius_log_pmf(feat: np.ndarray, w_feat: np.ndarray) -> float:
    """Log probability that sequential weighted sampling without
    replacement yields exactly the unordered set ``feat``.

    Sums the a! draw orders in log space. Exact, hence refused for sets
    larger than WALLENIUS_MAX_SET.
    """
    n_act = len(feat)
    if n_act > WALLENIUS_MAX_SET:
        raise ValueError(
            f"exact Wallenius pmf unsupported for sets larger than "
            f"{WALLENIUS_MAX_SET} (got {n_act})"
        )
    if n_act == 0:
        return 0.0
    total = float(w_feat.sum())
    log_w = {j: log(w_feat[j]) for j in feat}
    terms = []
    for order in permutations(feat):
        acc = 0.0
        remaining = total
        for j in order:
            acc += log_w[j] - log(remaining)
            remaining -= w_feat[j]
        terms.append(acc)
    return float(logsumexp(terms))


def log_binomial(n: int, k: int) -> float:
    """log of the binomial coefficient C(n, k)."""
    return lgamma(n + 1) - lgamma(k + 1) - lgamma(n - k + 1)


def sample_uniform_direction(n_act: int, rng) -> np.ndarray:
    """Uniform draw on the unit sphere in n_act dimensions."""
    z = rng.standard_normal(n_act)
    return z / np.linalg.norm(z)


def sample_power_spherical(mu: np.ndarray, kappa: float, rng) -> np.ndarray:
    """Draw from the power spherical density proportional to
    (1 + mu'theta)^kappa on the unit sphere.

    The cosine against mu is 2 Beta(kappa + (a-1)/2, (a-1)/2) - 1; the
    draw is assembled in the frame of the first axis and reflected onto
    mu by a Householder map. kappa = 0 reduces to the uniform sphere.
    In one dimension the two-point weights (1 + mu theta)^kappa put zero
    mass on -mu whenever kappa > 0, so the draw returns mu itself.
    """
    mu = np.asarray(mu, dtype=float)
    n_act = mu.size
    if n_act == 1:
        if kappa == 0.0:
            return np.array([1.0]) if rng.random() < 0.5 else np.array([-1.0])
        return mu.copy()
    shape_b = 0.5 * (n_act - 1)
    z = rng.beta(kappa + shape_b, shape_b)
    t = 2.0 * z - 1.0
    v = sample_uniform_direction(n_act - 1, rng)
    y = np.concatenate(([t], np.sqrt(max(1.0 - t * t, 0.0)) * v))
    u = -mu.copy()
    u[0] += 1.0  # e_1 - mu
    norm_u = np.linalg.norm(u)
    if norm_u < 1e-12:
        theta = y
    else:
        u /= norm_u
        theta = y - 2.0 * (u @ y) * u
    return theta / np.linalg.norm(theta)
