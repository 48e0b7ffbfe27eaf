"""Shared fixtures: small deterministic datasets and short fitted chains."""

from __future__ import annotations

import numpy as np
import pandas as pd
import pytest

from bppr import Hyperparams, prepare_dataset, run_chain


def make_frame(n_obs: int, n_feat: int, seed: int, *, cat_col: bool = False):
    """A small regression table with a smooth signal and unit noise."""
    rng = np.random.default_rng(seed)
    x = rng.uniform(size=(n_obs, n_feat))
    frame = pd.DataFrame(x, columns=[f"x{j + 1}" for j in range(n_feat)])
    y = np.sin(2.0 * np.pi * x[:, 0]) + x[:, 1] ** 2
    if cat_col:
        levels = np.array(["red", "green", "blue"])
        frame["color"] = levels[rng.integers(3, size=n_obs)]
        y = y + np.where(frame["color"] == "red", 1.0, 0.0)
    frame["y"] = y + 0.3 * rng.standard_normal(n_obs)
    return frame


@pytest.fixture(scope="session")
def small_dataset():
    return prepare_dataset(make_frame(60, 4, seed=11), response="y")


@pytest.fixture(scope="session")
def mixed_dataset():
    frame = make_frame(80, 3, seed=7, cat_col=True)
    return prepare_dataset(frame, response="y", categorical=("color",))


@pytest.fixture(scope="session")
def short_chain(small_dataset):
    hyper = Hyperparams(n_mcmc=400, n_burn=300, seed=5)
    return run_chain(small_dataset, hyper)


@pytest.fixture(scope="session")
def mixed_chain(mixed_dataset):
    hyper = Hyperparams(n_mcmc=400, n_burn=300, seed=9)
    return run_chain(mixed_dataset, hyper)
