"""Benchmark data generators with seeded train/test splits.

Two univariate scenarios ship: "friedman" (the standard five-active-
feature benchmark surface plus optional inert features) and "noise"
(pure standard-normal response with inert features). ``SCENARIOS`` is
the extension point: registering a name -> mean_function(x_matrix)
callable makes it available to ``simulate`` and the CLI. A functional
variant of the Friedman surface generates multivariate responses for
the multivariate fitter.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import pandas as pd

from .errors import InputError


def friedman(x) -> np.ndarray:
    """10 sin(pi x1 x2) + 20 (x3 - 0.5)^2 + 10 x4 + 5 x5; rows of 5+
    entries in [0,1], entries past the fifth are inert."""
    x = np.atleast_2d(np.asarray(x, dtype=float))
    if x.shape[1] < 5:
        raise InputError("friedman needs at least 5 features")
    return (
        10.0 * np.sin(np.pi * x[:, 0] * x[:, 1])
        + 20.0 * (x[:, 2] - 0.5) ** 2
        + 10.0 * x[:, 3]
        + 5.0 * x[:, 4]
    )


def _noise_mean(x) -> np.ndarray:
    return np.zeros(np.atleast_2d(x).shape[0])


SCENARIOS = {
    "friedman": friedman,
    "noise": _noise_mean,
}

_MIN_FEATURES = {"friedman": 5, "noise": 1}


@dataclass(frozen=True)
class SimulatedData:
    """Raw-scale train/test tables plus the noiseless means."""

    x_train: pd.DataFrame
    y_train: np.ndarray
    f_train: np.ndarray
    x_test: pd.DataFrame
    y_test: np.ndarray
    f_test: np.ndarray

    def train_frame(self) -> pd.DataFrame:
        """Feature columns plus the observed response, ready to fit."""
        out = self.x_train.copy()
        out["y"] = self.y_train
        return out

    def test_frame(self) -> pd.DataFrame:
        """Features, observed response, and the noiseless truth
        (column f_true) for scoring."""
        out = self.x_test.copy()
        out["y"] = self.y_test
        out["f_true"] = self.f_test
        return out


def simulate(scenario: str, n_train: int, n_feat: int, noise_sd: float = 1.0,
             seed: int = 0, n_test: int = 2000) -> SimulatedData:
    """Uniform [0,1] inputs, Gaussian noise, deterministic under seed."""
    if scenario not in SCENARIOS:
        raise InputError(
            f"unknown scenario '{scenario}'; available: {sorted(SCENARIOS)}"
        )
    if n_feat < _MIN_FEATURES.get(scenario, 1):
        raise InputError(
            f"scenario '{scenario}' needs at least "
            f"{_MIN_FEATURES[scenario]} features"
        )
    mean_fn = SCENARIOS[scenario]
    rng = np.random.default_rng(seed)
    names = [f"x{j + 1}" for j in range(n_feat)]

    def draw(n):
        x = rng.uniform(size=(n, n_feat))
        f = mean_fn(x)
        y = f + noise_sd * rng.standard_normal(n)
        return pd.DataFrame(x, columns=names), y, f

    x_train, y_train, f_train = draw(n_train)
    x_test, y_test, f_test = draw(n_test)
    return SimulatedData(x_train, y_train, f_train, x_test, y_test, f_test)


@dataclass(frozen=True)
class SimulatedFunctionalData:
    """Train/test tables with one response column per grid point."""

    grid: np.ndarray
    x_train: pd.DataFrame
    y_train: np.ndarray
    f_train: np.ndarray
    x_test: pd.DataFrame
    y_test: np.ndarray
    f_test: np.ndarray


def friedman_functional(n_train: int, n_grid: int = 50, n_feat: int = 9,
                        noise_sd: float = 1.0, seed: int = 0,
                        n_test: int = 500) -> SimulatedFunctionalData:
    """Friedman surface with the first active variable swept over a grid.

    Each row's response is a curve over ``n_grid`` points t in [0,1]:

        f(u, t) = 10 sin(pi t u1) + 20 (u2 - 0.5)^2 + 10 u3 + 5 u4,

    so four of the ``n_feat`` uniform inputs matter and the rest are
    inert. Gaussian noise is added independently at every grid point.
    """
    if n_feat < 4:
        raise InputError("friedman_functional needs at least 4 features")
    grid = np.linspace(0.0, 1.0, n_grid)
    rng = np.random.default_rng(seed)
    names = [f"x{j + 1}" for j in range(n_feat)]

    def draw(n):
        u = rng.uniform(size=(n, n_feat))
        f = (
            10.0 * np.sin(np.pi * grid[None, :] * u[:, [0]])
            + 20.0 * (u[:, [1]] - 0.5) ** 2
            + 10.0 * u[:, [2]]
            + 5.0 * u[:, [3]]
        )
        y = f + noise_sd * rng.standard_normal((n, n_grid))
        return pd.DataFrame(u, columns=names), y, f

    x_train, y_train, f_train = draw(n_train)
    x_test, y_test, f_test = draw(n_test)
    return SimulatedFunctionalData(
        grid, x_train, y_train, f_train, x_test, y_test, f_test
    )
