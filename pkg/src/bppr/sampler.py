"""Reversible-jump MCMC over ridge-function models.

Each iteration draws a move type uniformly from {birth, death, change},
runs the corresponding Metropolis-Hastings proposal on the model
structure, then refreshes (beta, sigma2, tau) by Gibbs on the post-move
design: beta uses the previous sigma2 and tau, sigma2 conditions on the
new beta, tau conditions on both. Within a move, coefficients never
enter the accept ratio; the marginal likelihood handles them.

RNG draw order is part of the contract so that tests can replay
proposals against independent oracles:

    birth:  a*, J*, [theta*, t0* when the set has a real feature],
            slot, accept-u
    death:  victim, accept-u
    change: victim, [fresh J | theta*, t0*], accept-u
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .data import apply_standardization
from .basis import (
    build_design,
    component_columns,
    interior_knots,
    knot_bounds,
)
from .conjugate import (
    gibbs_beta,
    gibbs_sigma2,
    gibbs_tau,
    gram_cache,
    log_marginal,
)
from .errors import DegenerateKnots, DegenerateProjection, SingularDesign
from .model import Hyperparams, ModelState, PosteriorChain, RidgeComponent, StepOutcome
from .proposals import (
    adaptive_weights,
    log_binomial,
    sample_feature_set,
    sample_n_act,
    sample_power_spherical,
    sample_uniform_direction,
    wallenius_log_pmf,
)

DEFAULT_MOVE_PROBS = (1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0)


def _column_offset(components, index: int) -> int:
    """First design column of component ``index`` (intercept is col 0)."""
    return 1 + sum(c.n_col for c in components[:index])


def _log_feature_mass(feat, w_feat, n_feat: int) -> float:
    """Log proposal mass of a feature set: uniform for singletons,
    Wallenius otherwise."""
    if len(feat) == 1:
        return -math.log(n_feat)
    return wallenius_log_pmf(feat, w_feat)


def _is_dummy_only(feat, dummy_index_set) -> bool:
    return len(dummy_index_set) > 0 and bool(
        np.all(np.isin(feat, np.asarray(dummy_index_set)))
    )


def _rejected(state, kind, log_alpha=None, index=None):
    return state, StepOutcome(kind, False, log_alpha, index)


def birth_step(state, dataset, hyper, rng, weights=None, *, unit_likelihood=False):
    """Propose inserting one new ridge at a uniform slot."""
    n_feat = dataset.n_feat
    if weights is None:
        weights = adaptive_weights(
            state.components, hyper.n_act_max, n_feat,
            hyper.w_n_act0, hyper.w_feat0,
        )
    w_n_act, w_feat = weights
    n_act = sample_n_act(w_n_act, rng)
    feat = sample_feature_set(w_feat, n_act, rng)

    if _is_dummy_only(feat, dataset.dummy_index_set):
        comp = RidgeComponent(
            feat=feat,
            proj_dir=np.full(n_act, 1.0 / math.sqrt(n_act)),
            knot0=None,
            knots=None,
            kind="cat",
        )
    elif unit_likelihood:
        comp = RidgeComponent(feat=feat, proj_dir=None, knot0=None, knots=None)
    else:
        direction = sample_uniform_direction(n_act, rng)
        proj = dataset.x_std[:, feat] @ direction
        try:
            lower, upper = knot_bounds(proj, hyper.q_upper, hyper.prob_relu)
        except DegenerateProjection:
            return _rejected(state, "birth")
        knot0 = rng.uniform(lower, upper)
        try:
            knots = interior_knots(proj, knot0, hyper.n_basis)
        except DegenerateKnots:
            return _rejected(state, "birth")
        comp = RidgeComponent(
            feat=feat, proj_dir=direction, knot0=float(knot0), knots=knots
        )

    slot = int(rng.integers(state.n_ridge + 1))

    log_alpha = (
        math.log(hyper.n_ridge_mean)
        - math.log(state.n_ridge + 1)
        - math.log(hyper.n_act_max)
        - log_binomial(n_feat, n_act)
        - math.log(w_n_act[n_act - 1] / w_n_act.sum())
        - _log_feature_mass(feat, w_feat, n_feat)
    )

    if unit_likelihood:
        cand_basis = cand_gram = None
    else:
        block = component_columns(
            comp, dataset.x_std, dataset.d_raw, dataset.dummy_index_set
        )
        offset = _column_offset(state.components, slot)
        cand_basis = np.concatenate(
            [state.basis[:, :offset], block, state.basis[:, offset:]], axis=1
        )
        try:
            cand_gram = gram_cache(cand_basis, dataset.y)
            log_alpha += log_marginal(cand_gram, state.tau) - log_marginal(
                state.gram, state.tau
            )
        except SingularDesign:
            return _rejected(state, "birth", index=slot)

    accepted = math.log(rng.random()) < log_alpha
    if not accepted:
        return state, StepOutcome("birth", False, log_alpha, slot)
    components = state.components[:slot] + (comp,) + state.components[slot:]
    beta = None if unit_likelihood else np.zeros(cand_gram.n_col)
    new_state = replace(
        state, components=components, beta=beta, basis=cand_basis, gram=cand_gram
    )
    return new_state, StepOutcome("birth", True, log_alpha, slot)


def death_step(state, dataset, hyper, rng, *, unit_likelihood=False):
    """Propose deleting a uniformly chosen ridge."""
    if state.n_ridge == 0:
        return state, StepOutcome("skipped", False)
    victim = int(rng.integers(state.n_ridge))
    comp = state.components[victim]
    components = state.components[:victim] + state.components[victim + 1:]
    n_feat = dataset.n_feat
    w_n_act, w_feat = adaptive_weights(
        components, hyper.n_act_max, n_feat, hyper.w_n_act0, hyper.w_feat0
    )

    log_alpha = (
        math.log(state.n_ridge)
        - math.log(hyper.n_ridge_mean)
        + math.log(hyper.n_act_max)
        + log_binomial(n_feat, comp.n_act)
        + math.log(w_n_act[comp.n_act - 1] / w_n_act.sum())
        + _log_feature_mass(comp.feat, w_feat, n_feat)
    )

    if unit_likelihood:
        cand_basis = cand_gram = None
    else:
        offset = _column_offset(state.components, victim)
        cand_basis = np.concatenate(
            [state.basis[:, :offset], state.basis[:, offset + comp.n_col:]], axis=1
        )
        try:
            cand_gram = gram_cache(cand_basis, dataset.y)
            log_alpha += log_marginal(cand_gram, state.tau) - log_marginal(
                state.gram, state.tau
            )
        except SingularDesign:
            return _rejected(state, "death", index=victim)

    accepted = math.log(rng.random()) < log_alpha
    if not accepted:
        return state, StepOutcome("death", False, log_alpha, victim)
    beta = None if unit_likelihood else np.zeros(cand_gram.n_col)
    new_state = replace(
        state, components=components, beta=beta, basis=cand_basis, gram=cand_gram
    )
    return new_state, StepOutcome("death", True, log_alpha, victim)


def change_step(state, dataset, hyper, rng, *, unit_likelihood=False):
    """Propose redrawing one ridge's direction and knots in place.

    The direction moves by a power spherical step around its current
    value and the initial knot is redrawn from its prior under the new
    projections, so the accept ratio is a pure marginal-likelihood
    ratio. Categorical-indicator ridges redraw their dummy set
    uniformly among same-size sets instead.
    """
    if state.n_ridge == 0:
        return state, StepOutcome("skipped", False)
    victim = int(rng.integers(state.n_ridge))
    comp = state.components[victim]

    if unit_likelihood:
        return state, StepOutcome("change", True, 0.0, victim)

    if comp.kind == "cat":
        dummies = np.asarray(dataset.dummy_index_set)
        feat = np.sort(rng.choice(dummies, size=comp.n_act, replace=False))
        new_comp = replace(comp, feat=feat)
    else:
        direction = sample_power_spherical(comp.proj_dir, hyper.kappa_prop, rng)
        proj = dataset.x_std[:, comp.feat] @ direction
        try:
            lower, upper = knot_bounds(proj, hyper.q_upper, hyper.prob_relu)
        except DegenerateProjection:
            return _rejected(state, "change", index=victim)
        knot0 = rng.uniform(lower, upper)
        try:
            knots = interior_knots(proj, knot0, hyper.n_basis)
        except DegenerateKnots:
            return _rejected(state, "change", index=victim)
        new_comp = replace(
            comp, proj_dir=direction, knot0=float(knot0), knots=knots
        )

    block = component_columns(
        new_comp, dataset.x_std, dataset.d_raw, dataset.dummy_index_set
    )
    offset = _column_offset(state.components, victim)
    cand_basis = np.concatenate(
        [state.basis[:, :offset], block, state.basis[:, offset + comp.n_col:]],
        axis=1,
    )
    try:
        cand_gram = gram_cache(cand_basis, dataset.y)
        log_alpha = log_marginal(cand_gram, state.tau) - log_marginal(
            state.gram, state.tau
        )
    except SingularDesign:
        return _rejected(state, "change", index=victim)

    accepted = math.log(rng.random()) < log_alpha
    if not accepted:
        return state, StepOutcome("change", False, log_alpha, victim)
    components = (
        state.components[:victim] + (new_comp,) + state.components[victim + 1:]
    )
    new_state = replace(
        state, components=components, basis=cand_basis, gram=cand_gram
    )
    return new_state, StepOutcome("change", True, log_alpha, victim)


def mcmc_step(state, dataset, hyper, rng, *, move_probs=DEFAULT_MOVE_PROBS,
              unit_likelihood=False):
    """One full iteration: move proposal, then Gibbs refresh.

    ``unit_likelihood`` is a test-only hook that forces the marginal
    likelihood ratio to one and skips the Gibbs refresh, leaving the
    prior over model structures as the stationary law; it is not
    reachable from the CLI.
    """
    u = rng.random()
    if u < move_probs[0]:
        mover = birth_step
    elif u < move_probs[0] + move_probs[1]:
        mover = death_step
    else:
        mover = change_step
    state, outcome = mover(
        state, dataset, hyper, rng, unit_likelihood=unit_likelihood
    )
    if unit_likelihood:
        return state, outcome

    beta = gibbs_beta(state.gram, state.sigma2, state.tau, rng)
    fitted = state.basis @ beta
    resid = dataset.y - fitted
    n_obs = dataset.n_obs
    sigma2 = gibbs_sigma2(float(resid @ resid), n_obs, rng)
    tau = gibbs_tau(
        float(fitted @ fitted), sigma2, state.gram.n_col - 1, n_obs, rng
    )
    return replace(state, beta=beta, sigma2=sigma2, tau=tau), outcome


def initial_state(dataset) -> ModelState:
    """Empty model: intercept only, tau = 1, sigma2 = var(y)."""
    basis = np.ones((dataset.n_obs, 1))
    gram = gram_cache(basis, dataset.y)
    return ModelState(
        components=(),
        beta=np.array([float(np.mean(dataset.y))]),
        sigma2=float(np.var(dataset.y, ddof=1)),
        tau=1.0,
        basis=basis,
        gram=gram,
    )


def run_chain(dataset, hyper: Hyperparams, *, move_probs=DEFAULT_MOVE_PROBS,
              unit_likelihood=False) -> PosteriorChain:
    """Run the sampler; returns traces for every iteration and state
    snapshots after burn-in."""
    std = dataset.standardization
    hyper = hyper.resolve(dataset.n_obs, std.n_real, std.n_dummy)
    if hyper.n_act_max > dataset.n_feat:
        hyper = replace(hyper, n_act_max=dataset.n_feat)
    rng = np.random.default_rng(hyper.seed)
    state = initial_state(dataset)
    n_mcmc, n_burn = hyper.n_mcmc, hyper.n_burn
    sigma_trace = np.empty(n_mcmc)
    n_ridge_trace = np.empty(n_mcmc, dtype=int)
    tau_trace = np.empty(n_mcmc)
    states = []
    for it in range(n_mcmc):
        state, _ = mcmc_step(
            state, dataset, hyper, rng,
            move_probs=move_probs, unit_likelihood=unit_likelihood,
        )
        sigma_trace[it] = math.sqrt(state.sigma2)
        n_ridge_trace[it] = state.n_ridge
        tau_trace[it] = state.tau
        if it >= n_burn:
            states.append(state)
    return PosteriorChain(
        states=tuple(states),
        sigma_trace=sigma_trace,
        n_ridge_trace=n_ridge_trace,
        tau_trace=tau_trace,
        hyper=hyper,
        standardization=std,
    )


@dataclass(frozen=True)
class PredictionResult:
    """Pointwise posterior prediction summaries on new inputs.

    ``draws`` holds one noiseless mean curve per retained state,
    shape (n_states, n_new). Credible bounds are equal-tailed quantiles
    of the noiseless draws; prediction bounds add per-draw Gaussian
    observation noise.
    """

    draws: np.ndarray
    mean: np.ndarray
    cred_lower: np.ndarray
    cred_upper: np.ndarray
    pred_lower: np.ndarray
    pred_upper: np.ndarray
    level: float


def posterior_mean_draws(chain: PosteriorChain, x_new) -> np.ndarray:
    """Noiseless f(x) for every retained state; (n_states, n_new)."""
    std = chain.standardization
    x_std, d_raw = apply_standardization(x_new, std)
    out = np.empty((chain.n_states, x_std.shape[0]))
    for s, state in enumerate(chain.states):
        design = build_design(state.components, x_std, d_raw, std.dummy_index_set)
        out[s] = design @ state.beta
    return out


def predict(chain: PosteriorChain, x_new, *, level: float = 0.95,
            seed: int = 0) -> PredictionResult:
    """Posterior predictive summaries on raw-scale inputs.

    ``seed`` drives only the observation-noise draws behind the
    prediction interval; the noiseless draws are deterministic given
    the chain.
    """
    draws = posterior_mean_draws(chain, x_new)
    lo_q, hi_q = 0.5 * (1.0 - level), 0.5 * (1.0 + level)
    sigma = np.sqrt([state.sigma2 for state in chain.states])
    noise = np.random.default_rng(seed).standard_normal(draws.shape)
    noisy = draws + sigma[:, None] * noise
    return PredictionResult(
        draws=draws,
        mean=draws.mean(axis=0),
        cred_lower=np.quantile(draws, lo_q, axis=0),
        cred_upper=np.quantile(draws, hi_q, axis=0),
        pred_lower=np.quantile(noisy, lo_q, axis=0),
        pred_upper=np.quantile(noisy, hi_q, axis=0),
        level=level,
    )
