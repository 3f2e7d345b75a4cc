from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass
class ScalerParams:
    mean: np.ndarray
    std: np.ndarray

    def to_dict(self) -> dict:
        return {"mean": [float(v) for v in self.mean], "std": [float(v) for v in self.std]}

    @classmethod
    def from_dict(cls, data: dict) -> "ScalerParams":
        return cls(np.asarray(data["mean"], dtype=float), np.asarray(data["std"], dtype=float))


def zscore_fit(X) -> ScalerParams:
    """Per-column mean and population standard deviation."""
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[0] == 0:
        raise ValueError("z-score fitting needs a 2-D matrix with at least one row")
    mean = X.mean(axis=0)
    std = X.std(axis=0)
    # a constant column must map to exact zeros
    const = np.ptp(X, axis=0) == 0
    mean[const] = X[0, const]
    std[const] = 0.0
    return ScalerParams(mean, std)


def zscore_apply(X, params: ScalerParams) -> np.ndarray:
    """``(x - mean) / std`` per column; columns with zero std become 0."""
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[1] != len(params.mean):
        raise ValueError(f"scaler was fitted on {len(params.mean)} columns, got shape {X.shape}")
    safe = np.where(params.std > 0, params.std, 1.0)
    out = (X - params.mean) / safe
    out[:, params.std == 0] = 0.0
    return out
