"""
Common interface of the fitted classifiers
"""

from abc import ABC, abstractmethod
from typing import Any, Dict, Optional

import numpy as np

from src.app.schemas.error import TrainingError


class Classifier(ABC):
    """
    Binary classifier over float feature matrices with labels in {0, 1}
    """

    algorithm: str = ""

    def __init__(self, seed: int = 0):
        self.seed = seed
        self.n_features: Optional[int] = None
        self._importances: Optional[np.ndarray] = None

    @abstractmethod
    def fit(self, X: np.ndarray, y: np.ndarray, sample_weight: Optional[np.ndarray] = None) -> "Classifier":
        ...

    @abstractmethod
    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        """Score of the positive class per row, in [0, 1]"""
        ...

    def predict(self, X: np.ndarray) -> np.ndarray:
        return (self.predict_proba(X) >= 0.5).astype(int)

    @property
    def feature_importances(self) -> np.ndarray:
        if self._importances is None:
            raise TrainingError(f"{self.algorithm} is not fitted")
        return self._importances

    @abstractmethod
    def get_state(self) -> Dict[str, Any]:
        """JSON-serializable fitted state"""
        ...

    @classmethod
    @abstractmethod
    def from_state(cls, state: Dict[str, Any]) -> "Classifier":
        ...

    @staticmethod
    def check_training_data(X: np.ndarray, y: np.ndarray) -> None:
        """
        Raises:
            TrainingError: empty, single-class or non-finite input
        """
        if X.ndim != 2 or X.shape[0] == 0:
            raise TrainingError("training set is empty")
        if X.shape[0] != y.shape[0]:
            raise TrainingError("feature and label counts differ")
        if not np.isfinite(X).all():
            raise TrainingError("training set contains non-finite feature values")
        if len(np.unique(y)) < 2:
            raise TrainingError("training set contains a single class")
