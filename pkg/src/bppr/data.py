"""Input preparation: dummy coding, standardization, validation.

Real feature columns are standardized to mean zero and unit sample
standard deviation (denominator n-1). Each L-level categorical column
expands to L-1 dummy columns, one per level in first-appearance order
with the last-appearing level as reference; the dummies join the
standardized design like real columns but their raw {0,1} values are
kept separately for indicator ridges. The response is never rescaled.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
import pandas as pd

from .errors import InputError, SchemaError


@dataclass(frozen=True)
class Standardization:
    """Everything needed to rebuild the training design on new raw data.

    ``source_cols`` is the original feature-column order; categorical
    columns expand in place into their dummies, producing
    ``feature_names``. ``cat_levels`` maps each categorical column to
    all its observed levels in first-appearance order (reference last).
    ``dummy_index_set`` holds the expanded-design indices of the dummy
    columns, sorted ascending.
    """

    source_cols: tuple
    real_cols: tuple
    cat_levels: dict
    feature_names: tuple
    col_means: np.ndarray
    col_sds: np.ndarray
    dummy_index_set: tuple
    response: tuple

    @property
    def n_feat(self) -> int:
        return len(self.feature_names)

    @property
    def n_dummy(self) -> int:
        return len(self.dummy_index_set)

    @property
    def n_real(self) -> int:
        return self.n_feat - self.n_dummy


@dataclass(frozen=True)
class Dataset:
    """Prepared training data.

    ``x_std`` is the n x p standardized design (reals and dummies),
    ``d_raw`` the n x p_d raw {0,1} dummy submatrix in
    ``dummy_index_set`` order, ``y`` the raw-scale response.
    """

    x_std: np.ndarray
    d_raw: np.ndarray
    y: np.ndarray
    standardization: Standardization

    @property
    def n_obs(self) -> int:
        return self.x_std.shape[0]

    @property
    def n_feat(self) -> int:
        return self.x_std.shape[1]

    @property
    def dummy_index_set(self) -> tuple:
        return self.standardization.dummy_index_set

    def dummy_block(self, feat: np.ndarray) -> np.ndarray:
        """Raw dummy columns for global feature indices ``feat``."""
        positions = np.searchsorted(np.asarray(self.dummy_index_set), feat)
        return self.d_raw[:, positions]


def _as_float_column(values, name: str) -> np.ndarray:
    try:
        col = np.asarray(values, dtype=float)
    except (TypeError, ValueError) as exc:
        raise InputError(f"column '{name}' is not numeric") from exc
    if not np.all(np.isfinite(col)):
        raise InputError(f"column '{name}' contains missing or non-finite values")
    return col


def _expand_features(x_df: pd.DataFrame, source_cols, cat_levels, *, fitting: bool):
    """Expand raw feature columns into (raw design, names, dummy indices).

    With ``fitting`` the categorical levels are read off the data;
    otherwise the recorded levels are enforced and unseen values are a
    schema violation.
    """
    columns = []
    names = []
    dummy_idx = []
    for col in source_cols:
        if col not in x_df.columns:
            raise SchemaError(f"missing feature column '{col}'")
        values = x_df[col]
        if values.isna().any():
            raise InputError(f"column '{col}' contains missing values")
        if col in cat_levels:
            if fitting:
                levels = list(pd.unique(values))
                if len(levels) < 2:
                    raise InputError(
                        f"categorical column '{col}' has fewer than 2 levels"
                    )
                cat_levels[col] = tuple(levels)
            levels = cat_levels[col]
            known = set(levels)
            unseen = [v for v in pd.unique(values) if v not in known]
            if unseen:
                raise SchemaError(
                    f"column '{col}' has unseen level {unseen[0]!r}"
                )
            for level in levels[:-1]:
                dummy_idx.append(len(names))
                names.append(f"{col}={level}")
                columns.append((values == level).to_numpy(dtype=float))
        else:
            names.append(col)
            columns.append(_as_float_column(values, col))
    x_raw = np.column_stack(columns) if columns else np.empty((len(x_df), 0))
    return x_raw, names, dummy_idx


def build_standardization(
    x_df: pd.DataFrame,
    categorical: Sequence[str] = (),
    response: Sequence[str] = ("y",),
) -> tuple[np.ndarray, np.ndarray, Standardization]:
    """Fit the encoding on training features and apply it.

    Returns (x_std, d_raw, standardization).
    """
    if len(set(x_df.columns)) != len(x_df.columns):
        raise InputError("duplicate feature column names")
    unknown = [c for c in categorical if c not in x_df.columns]
    if unknown:
        raise SchemaError(f"categorical column '{unknown[0]}' not in data")
    if len(x_df) < 2:
        raise InputError("need at least 2 observations")
    source_cols = tuple(x_df.columns)
    cat_levels = {c: None for c in categorical}
    x_raw, names, dummy_idx = _expand_features(
        x_df, source_cols, cat_levels, fitting=True
    )
    if x_raw.shape[1] == 0:
        raise InputError("no feature columns")
    means = x_raw.mean(axis=0)
    sds = x_raw.std(axis=0, ddof=1)
    constant = np.flatnonzero(sds == 0)
    if constant.size:
        raise InputError(f"column '{names[constant[0]]}' is constant")
    std = Standardization(
        source_cols=source_cols,
        real_cols=tuple(c for c in source_cols if c not in cat_levels),
        cat_levels={c: tuple(v) for c, v in cat_levels.items()},
        feature_names=tuple(names),
        col_means=means,
        col_sds=sds,
        dummy_index_set=tuple(dummy_idx),
        response=tuple(response),
    )
    x_std = (x_raw - means) / sds
    d_raw = x_raw[:, dummy_idx]
    return x_std, d_raw, std


def apply_standardization(x_new, std: Standardization):
    """Map raw prediction inputs onto the training design.

    Accepts a DataFrame with the training feature columns (extra columns
    are ignored) or, when the schema has no categorical columns, a plain
    array whose columns follow ``std.source_cols``.
    """
    if isinstance(x_new, pd.DataFrame):
        df = x_new
    else:
        arr = np.asarray(x_new)
        if arr.ndim != 2 or arr.shape[1] != len(std.source_cols):
            raise SchemaError(
                f"expected {len(std.source_cols)} feature columns, "
                f"got shape {arr.shape}"
            )
        if std.cat_levels:
            raise SchemaError(
                "categorical schema requires a DataFrame with named columns"
            )
        df = pd.DataFrame(arr, columns=list(std.source_cols))
    cat_levels = dict(std.cat_levels)
    x_raw, names, dummy_idx = _expand_features(
        df, std.source_cols, cat_levels, fitting=False
    )
    x_std = (x_raw - std.col_means) / std.col_sds
    d_raw = x_raw[:, dummy_idx]
    return x_std, d_raw


def prepare_dataset(
    df: pd.DataFrame,
    response: str = "y",
    categorical: Sequence[str] = (),
) -> Dataset:
    """Validate and encode a raw table into a training Dataset."""
    if response not in df.columns:
        raise SchemaError(f"missing response column '{response}'")
    if response in categorical:
        raise InputError("response column cannot be categorical")
    y = _as_float_column(df[response], response)
    x_df = df.drop(columns=[response])
    x_std, d_raw, std = build_standardization(
        x_df, categorical=categorical, response=(response,)
    )
    return Dataset(x_std=x_std, d_raw=d_raw, y=y, standardization=std)
