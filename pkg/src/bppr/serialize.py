"""Model-file serialization.

One JSON document per fitted model. Univariate layout:

    {"schema_version": 1,
     "hyperparams": {...},
     "standardization": {...},
     "states": [{"components": [...], "beta": [...],
                 "sigma2": ..., "tau": ...}, ...],
     "traces": {"sigma": [...], "n_ridge": [...], "tau": [...]}}

Multivariate files extend this: states/traces move into a per-component
list and a "basis" object stores the response basis:

    {"schema_version": 1, "hyperparams": {...}, "standardization": {...},
     "basis": {"h": [[...]], "y_mean": [...], "d_minus": ...,
               "explained_variance": [...]},
     "components": [{"seed": ..., "states": [...], "traces": {...}}, ...]}

Floats are emitted as Python's shortest round-trip decimal repr, which
reproduces every float64 bit-exactly; integers stay integers. Cached
design matrices and Gram factors are training-data products and are
never persisted; they are rebuilt on demand. serialize(deserialize(s))
is the identity byte-for-byte on files this module wrote.
"""

from __future__ import annotations

import json
from dataclasses import asdict, replace

import numpy as np

from .data import Standardization
from .errors import ChainFormatError, InputError
from .model import Hyperparams, ModelState, PosteriorChain, RidgeComponent
from .multivariate import MultivariateChain, ResponseBasis

SCHEMA_VERSION = 1


def _component_dict(comp: RidgeComponent) -> dict:
    return {
        "kind": comp.kind,
        "feat": [int(j) for j in comp.feat],
        "proj_dir": [float(v) for v in comp.proj_dir],
        "knot0": None if comp.knot0 is None else float(comp.knot0),
        "knots": None if comp.knots is None else [float(t) for t in comp.knots],
    }


def _state_dict(state: ModelState) -> dict:
    return {
        "components": [_component_dict(c) for c in state.components],
        "beta": [float(b) for b in state.beta],
        "sigma2": float(state.sigma2),
        "tau": float(state.tau),
    }


def _standardization_dict(std: Standardization) -> dict:
    return {
        "source_cols": list(std.source_cols),
        "real_cols": list(std.real_cols),
        "cat_levels": {c: list(v) for c, v in std.cat_levels.items()},
        "feature_names": list(std.feature_names),
        "col_means": [float(v) for v in std.col_means],
        "col_sds": [float(v) for v in std.col_sds],
        "dummy_index_set": [int(j) for j in std.dummy_index_set],
        "response": list(std.response),
    }


def _chain_body(chain: PosteriorChain) -> dict:
    if chain.n_states == 0:
        raise InputError("cannot serialize a chain with no retained states")
    return {
        "states": [_state_dict(s) for s in chain.states],
        "traces": {
            "sigma": [float(v) for v in chain.sigma_trace],
            "n_ridge": [int(v) for v in chain.n_ridge_trace],
            "tau": [float(v) for v in chain.tau_trace],
        },
    }


def serialize_chain(chain: PosteriorChain) -> str:
    doc = {
        "schema_version": SCHEMA_VERSION,
        "hyperparams": asdict(chain.hyper),
        "standardization": _standardization_dict(chain.standardization),
        **_chain_body(chain),
    }
    return json.dumps(doc, allow_nan=False)


def serialize_multivariate(fit: MultivariateChain) -> str:
    if not fit.chains:
        raise InputError("cannot serialize an empty multivariate fit")
    master = fit.chains[0].hyper
    doc = {
        "schema_version": SCHEMA_VERSION,
        "hyperparams": asdict(master),
        "standardization": _standardization_dict(
            fit.chains[0].standardization
        ),
        "basis": {
            "h": [[float(v) for v in row] for row in fit.basis.h],
            "y_mean": [float(v) for v in fit.basis.y_mean],
            "d_minus": int(fit.basis.n_components),
            "explained_variance": [
                float(v) for v in fit.basis.explained_variance
            ],
        },
        "components": [
            {"seed": int(c.hyper.seed), **_chain_body(c)} for c in fit.chains
        ],
    }
    return json.dumps(doc, allow_nan=False)


def serialize_model(model) -> str:
    """Serialize either model kind; dispatches on the type."""
    if isinstance(model, MultivariateChain):
        return serialize_multivariate(model)
    return serialize_chain(model)


def _require(mapping, key, context):
    if not isinstance(mapping, dict) or key not in mapping:
        raise ChainFormatError(f"model file missing '{key}' in {context}")
    return mapping[key]


def _parse_component(raw) -> RidgeComponent:
    kind = _require(raw, "kind", "component")
    if kind not in ("spline", "cat"):
        raise ChainFormatError(f"unknown component kind '{kind}'")
    knots = _require(raw, "knots", "component")
    knot0 = _require(raw, "knot0", "component")
    if kind == "spline" and (knots is None or knot0 is None):
        raise ChainFormatError("spline component without knots")
    return RidgeComponent(
        feat=np.asarray(_require(raw, "feat", "component"), dtype=int),
        proj_dir=np.asarray(_require(raw, "proj_dir", "component"), dtype=float),
        knot0=None if knot0 is None else float(knot0),
        knots=None if knots is None else np.asarray(knots, dtype=float),
        kind=kind,
    )


def _parse_state(raw) -> ModelState:
    components = tuple(
        _parse_component(c) for c in _require(raw, "components", "state")
    )
    return ModelState(
        components=components,
        beta=np.asarray(_require(raw, "beta", "state"), dtype=float),
        sigma2=float(_require(raw, "sigma2", "state")),
        tau=float(_require(raw, "tau", "state")),
    )


def _parse_standardization(raw) -> Standardization:
    return Standardization(
        source_cols=tuple(_require(raw, "source_cols", "standardization")),
        real_cols=tuple(_require(raw, "real_cols", "standardization")),
        cat_levels={
            c: tuple(v)
            for c, v in _require(raw, "cat_levels", "standardization").items()
        },
        feature_names=tuple(_require(raw, "feature_names", "standardization")),
        col_means=np.asarray(
            _require(raw, "col_means", "standardization"), dtype=float
        ),
        col_sds=np.asarray(
            _require(raw, "col_sds", "standardization"), dtype=float
        ),
        dummy_index_set=tuple(
            int(j) for j in _require(raw, "dummy_index_set", "standardization")
        ),
        response=tuple(_require(raw, "response", "standardization")),
    )


def _parse_hyper(raw) -> Hyperparams:
    if not isinstance(raw, dict):
        raise ChainFormatError("hyperparams must be an object")
    try:
        return Hyperparams(**raw)
    except (TypeError, ValueError) as exc:
        raise ChainFormatError(f"bad hyperparams: {exc}") from exc


def _parse_traces(raw):
    sigma = np.asarray(_require(raw, "sigma", "traces"), dtype=float)
    n_ridge = np.asarray(_require(raw, "n_ridge", "traces"), dtype=int)
    tau = np.asarray(_require(raw, "tau", "traces"), dtype=float)
    return sigma, n_ridge, tau


def _parse_body(doc, hyper, std) -> PosteriorChain:
    states = tuple(_parse_state(s) for s in _require(doc, "states", "model"))
    sigma, n_ridge, tau = _parse_traces(_require(doc, "traces", "model"))
    return PosteriorChain(
        states=states,
        sigma_trace=sigma,
        n_ridge_trace=n_ridge,
        tau_trace=tau,
        hyper=hyper,
        standardization=std,
    )


def _loads(text: str) -> dict:
    def reject_constant(token):
        raise ChainFormatError(f"non-finite literal '{token}' in model file")

    try:
        doc = json.loads(text, parse_constant=reject_constant)
    except json.JSONDecodeError as exc:
        raise ChainFormatError(
            f"model file is not valid JSON: {exc.msg} at byte {exc.pos}",
            byte_offset=exc.pos,
        ) from exc
    if not isinstance(doc, dict):
        raise ChainFormatError("model file must be a JSON object")
    version = _require(doc, "schema_version", "model")
    if version != SCHEMA_VERSION:
        raise ChainFormatError(f"unsupported schema_version {version!r}")
    return doc


def deserialize_chain(text: str) -> PosteriorChain:
    doc = _loads(text)
    hyper = _parse_hyper(_require(doc, "hyperparams", "model"))
    std = _parse_standardization(_require(doc, "standardization", "model"))
    return _parse_body(doc, hyper, std)


def deserialize_model(text: str):
    """Parse either model kind; multivariate files carry a basis."""
    doc = _loads(text)
    hyper = _parse_hyper(_require(doc, "hyperparams", "model"))
    std = _parse_standardization(_require(doc, "standardization", "model"))
    if "basis" not in doc:
        return _parse_body(doc, hyper, std)
    raw_basis = doc["basis"]
    basis = ResponseBasis(
        h=np.asarray(_require(raw_basis, "h", "basis"), dtype=float),
        y_mean=np.asarray(_require(raw_basis, "y_mean", "basis"), dtype=float),
        explained_variance=np.asarray(
            _require(raw_basis, "explained_variance", "basis"), dtype=float
        ),
    )
    if basis.h.ndim != 2 or basis.h.shape[1] != int(
        _require(raw_basis, "d_minus", "basis")
    ):
        raise ChainFormatError("basis shape disagrees with d_minus")
    chains = []
    for raw in _require(doc, "components", "model"):
        seed = int(_require(raw, "seed", "component chain"))
        chains.append(_parse_body(raw, replace(hyper, seed=seed), std))
    return MultivariateChain(chains=tuple(chains), basis=basis)


def save_model(model, path) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(serialize_model(model))


def load_model(path):
    with open(path, "r", encoding="utf-8") as handle:
        return deserialize_model(handle.read())
