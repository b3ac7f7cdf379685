"""
Feature scalers for the linear model
"""

from typing import Any, Dict, Optional

import numpy as np

from src.app.schemas.learn import ScalerKind


class Scaler:
    """
    Per-column (or per-row for unit_norm) rescaling fitted on training data.
    Constant columns keep a unit divisor so they map to 0 instead of NaN.
    """

    def __init__(self, kind: ScalerKind = ScalerKind.NONE):
        self.kind = ScalerKind(kind)
        self.offset: Optional[np.ndarray] = None
        self.scale: Optional[np.ndarray] = None

    def fit(self, X: np.ndarray) -> "Scaler":
        X = np.asarray(X, dtype=float)
        n_features = X.shape[1]
        if self.kind == ScalerKind.MIN_MAX:
            low, high = X.min(axis=0), X.max(axis=0)
            self.offset, self.scale = low, _safe(high - low)
        elif self.kind == ScalerKind.ROBUST:
            q1, median, q3 = np.percentile(X, [25, 50, 75], axis=0)
            self.offset, self.scale = median, _safe(q3 - q1)
        elif self.kind == ScalerKind.STANDARD:
            self.offset, self.scale = X.mean(axis=0), _safe(X.std(axis=0))
        else:
            self.offset, self.scale = np.zeros(n_features), np.ones(n_features)
        return self

    def transform(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        if self.kind == ScalerKind.UNIT_NORM:
            norms = np.linalg.norm(X, axis=1, keepdims=True)
            return X / _safe(norms)
        if self.kind == ScalerKind.NONE:
            return X
        return (X - self.offset) / self.scale

    def fit_transform(self, X: np.ndarray) -> np.ndarray:
        return self.fit(X).transform(X)

    def get_state(self) -> Dict[str, Any]:
        return {
            "kind": self.kind.value,
            "offset": None if self.offset is None else self.offset.tolist(),
            "scale": None if self.scale is None else self.scale.tolist(),
        }

    @classmethod
    def from_state(cls, state: Dict[str, Any]) -> "Scaler":
        scaler = cls(ScalerKind(state["kind"]))
        if state.get("offset") is not None:
            scaler.offset = np.array(state["offset"], dtype=float)
            scaler.scale = np.array(state["scale"], dtype=float)
        return scaler


def _safe(divisor: np.ndarray) -> np.ndarray:
    divisor = np.asarray(divisor, dtype=float).copy()
    divisor[divisor == 0] = 1.0
    return divisor
