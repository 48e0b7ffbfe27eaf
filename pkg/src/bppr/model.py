"""Core model types: hyperparameters, ridge components, sampler states.

The regression function is an adaptive sum of ridge functions,

    f(x) = beta_0 + sum_m beta_m' b_m(x' theta_m),

where each b_m is either a spline basis over a one-dimensional
projection of the standardized inputs or a single indicator column
built from raw dummy columns. The number of ridges, their active
feature sets, directions and knots are all sampled.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np


def default_n_act_max(n_real: int, n_dummy: int) -> int:
    """Default cap on active features per ridge.

    min(3, p) for all-real inputs; with categorical inputs the real and
    dummy budgets are separate: min(3, n_real) + min(3, ceil(n_dummy/2)).
    """
    if n_dummy == 0:
        return min(3, n_real)
    return min(3, n_real) + min(3, math.ceil(n_dummy / 2))


def default_q_upper(n_obs: int) -> float:
    """Default upper-knot quantile, leaving max(20, ceil(0.05 n)) points
    above the largest admissible initial knot. Clamped to [0.5, 1)."""
    n_above = max(20, math.ceil(0.05 * n_obs))
    q = (n_obs - n_above) / n_obs
    return min(max(q, 0.5), 1.0 - 1e-12)


@dataclass(frozen=True)
class Hyperparams:
    """Sampler configuration.

    Fields
    ------
    n_ridge_mean : Poisson prior mean for the number of ridge functions.
    n_basis : spline basis functions per ridge (fixed across ridges).
    n_act_max : max active features per ridge; None resolves to the
        data-dependent default (see ``default_n_act_max``).
    prob_relu : prior probability that a ridge is zero for at least one
        training point, i.e. that its initial knot sits above the
        smallest projection.
    q_upper : quantile of the projections bounding the initial knot from
        above; None resolves to the data-size default.
    w_n_act0 : baseline weight added to every active-dimension count in
        the adaptive proposal.
    w_feat0 : baseline weight added to every feature-inclusion count in
        the adaptive proposal.
    kappa_prop : power spherical concentration for direction-change
        proposals (0 = uniform on the sphere).
    n_mcmc : total sampler iterations.
    n_burn : iterations discarded before states are retained.
    seed : RNG seed for the chain.
    """

    n_ridge_mean: float = 10.0
    n_basis: int = 4
    n_act_max: Optional[int] = None
    prob_relu: float = 2.0 / 3.0
    q_upper: Optional[float] = None
    w_n_act0: float = 1.0
    w_feat0: float = 1.0
    kappa_prop: float = 1000.0
    n_mcmc: int = 10000
    n_burn: int = 9000
    seed: int = 0

    def __post_init__(self):
        if not self.n_ridge_mean > 0:
            raise ValueError("n_ridge_mean must be positive")
        if not (isinstance(self.n_basis, (int, np.integer)) and self.n_basis >= 1):
            raise ValueError("n_basis must be a positive integer")
        if self.n_act_max is not None and self.n_act_max < 1:
            raise ValueError("n_act_max must be at least 1")
        if not 0.0 < self.prob_relu <= 1.0:
            raise ValueError("prob_relu must lie in (0, 1]")
        if self.q_upper is not None and not 0.0 < self.q_upper < 1.0:
            raise ValueError("q_upper must lie in (0, 1)")
        if self.w_n_act0 <= 0 or self.w_feat0 <= 0:
            raise ValueError("adaptive weight floors must be positive")
        if self.kappa_prop < 0:
            raise ValueError("kappa_prop must be nonnegative")
        if self.n_mcmc < 1:
            raise ValueError("n_mcmc must be positive")
        if not 0 <= self.n_burn < self.n_mcmc:
            raise ValueError("n_burn must lie in [0, n_mcmc)")

    def resolve(self, n_obs: int, n_real: int, n_dummy: int) -> "Hyperparams":
        """Fill data-dependent defaults so every field is concrete."""
        resolved = self
        if resolved.n_act_max is None:
            resolved = replace(resolved, n_act_max=default_n_act_max(n_real, n_dummy))
        if resolved.q_upper is None:
            resolved = replace(resolved, q_upper=default_q_upper(n_obs))
        return resolved


@dataclass(frozen=True)
class RidgeComponent:
    """One ridge function.

    ``feat`` holds sorted feature indices into the standardized design.
    Spline ridges carry a unit projection direction over those features,
    an initial knot ``knot0`` and ``n_basis + 1`` further knots (the last
    one is the boundary knot where the basis turns affine). Categorical
    ridges (``kind == "cat"``) are a single indicator column over raw
    dummy features and carry no knots; their direction is the fixed
    uniform unit vector, kept so serialization stays uniform.
    """

    feat: np.ndarray
    proj_dir: np.ndarray
    knot0: Optional[float]
    knots: Optional[np.ndarray]
    kind: str = "spline"

    @property
    def n_act(self) -> int:
        return self.feat.size

    @property
    def n_col(self) -> int:
        """Columns this component contributes to the design."""
        if self.kind == "cat":
            return 1
        return self.knots.size - 1


@dataclass(frozen=True)
class ModelState:
    """One sampler state: structure plus coefficients.

    ``basis`` caches the n x (1 + sum_m K_m) design (intercept first,
    then each component's block in order) and ``gram`` its factorization
    against the training response. Both are None on states rebuilt from
    a model file; they are reconstructed lazily when needed.
    """

    components: tuple
    beta: np.ndarray
    sigma2: float
    tau: float
    basis: Optional[np.ndarray] = field(default=None, repr=False, compare=False)
    gram: object = field(default=None, repr=False, compare=False)

    @property
    def n_ridge(self) -> int:
        return len(self.components)


@dataclass(frozen=True)
class StepOutcome:
    """What one reversible-jump move did.

    ``kind`` is "birth", "death", "change", or "skip" (death/change drawn
    at M=0). ``log_accept_ratio`` is the log Metropolis-Hastings ratio of
    the evaluated proposal, None when the move was skipped or aborted on
    a degenerate/singular proposal before the ratio existed. ``index``
    is the insertion slot (birth) or victim index (death/change).
    """

    kind: str
    accepted: bool
    log_accept_ratio: Optional[float] = None
    index: Optional[int] = None


@dataclass(frozen=True)
class PosteriorChain:
    """Output of one sampler run.

    ``states`` are the post-burn-in snapshots. The traces cover every
    iteration (length n_mcmc): ``sigma_trace`` stores the error standard
    deviation, ``n_ridge_trace`` the ridge count, ``tau_trace`` the
    coefficient-scale mixing parameter. ``hyper`` is fully resolved and
    ``standardization`` carries everything needed to map raw prediction
    inputs onto the training design.
    """

    states: tuple
    sigma_trace: np.ndarray
    n_ridge_trace: np.ndarray
    tau_trace: np.ndarray
    hyper: Hyperparams
    standardization: object

    @property
    def n_states(self) -> int:
        return len(self.states)
