"""
Discrete AdaBoost (SAMME, two classes) over shallow trees
"""

import logging
from typing import Any, Dict, List, Optional

import numpy as np

from src.app.models.base import Classifier
from src.app.models.decision_tree import DecisionTree
from src.app.utils.seeding import derive_seed

logger = logging.getLogger(__name__)


class AdaBoost(Classifier):
    """
    Score = (sum(alpha * h) / sum(alpha) + 1) / 2 with h in {-1, +1}
    """

    algorithm = "adaboost"

    def __init__(
        self,
        n_estimators: int = 50,
        learning_rate: float = 1.0,
        max_depth: int = 1,
        seed: int = 0,
    ):
        super().__init__(seed)
        self.n_estimators = int(n_estimators)
        self.learning_rate = float(learning_rate)
        self.max_depth = int(max_depth)
        self.members: List[DecisionTree] = []
        self.alphas: List[float] = []

    def fit(self, X: np.ndarray, y: np.ndarray, sample_weight: Optional[np.ndarray] = None) -> "AdaBoost":
        X = np.asarray(X, dtype=float)
        y = np.asarray(y, dtype=int)
        self.n_features = X.shape[1]
        weights = np.full(len(y), 1.0 / len(y)) if sample_weight is None else np.asarray(sample_weight, float)
        weights = weights / weights.sum()
        self.members, self.alphas = [], []

        for round_index in range(self.n_estimators):
            tree = DecisionTree(max_depth=self.max_depth, seed=derive_seed(self.seed, "round", round_index))
            tree.fit(X, y, sample_weight=weights)
            wrong = tree.predict(X) != y
            error = float(weights[wrong].sum())

            if error <= 0.0:
                # perfect learner: it decides alone
                self.members.append(tree)
                self.alphas.append(1.0)
                break
            if error >= 0.5:
                if not self.members:
                    self.members.append(tree)
                    self.alphas.append(1.0)
                logger.debug(f"AdaBoost stopped at round {round_index}: weighted error {error:.4f}")
                break

            alpha = self.learning_rate * np.log((1.0 - error) / error)
            self.members.append(tree)
            self.alphas.append(float(alpha))
            weights = weights * np.exp(alpha * wrong)
            weights = weights / weights.sum()

        alphas = np.array(self.alphas)
        importances = np.sum([a * member.feature_importances for a, member in zip(alphas, self.members)], axis=0)
        total = importances.sum()
        self._importances = importances / total if total > 0 else importances
        return self

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        alphas = np.array(self.alphas)
        votes = np.array([2.0 * member.predict(X) - 1.0 for member in self.members])
        return (alphas @ votes / alphas.sum() + 1.0) / 2.0

    def get_state(self) -> Dict[str, Any]:
        return {
            "params": {
                "n_estimators": self.n_estimators,
                "learning_rate": self.learning_rate,
                "max_depth": self.max_depth,
                "seed": self.seed,
            },
            "n_features": self.n_features,
            "alphas": list(self.alphas),
            "members": [member.get_state() for member in self.members],
            "importances": self.feature_importances.tolist(),
        }

    @classmethod
    def from_state(cls, state: Dict[str, Any]) -> "AdaBoost":
        model = cls(**state["params"])
        model.n_features = state["n_features"]
        model.alphas = [float(alpha) for alpha in state["alphas"]]
        model.members = [DecisionTree.from_state(member) for member in state["members"]]
        model._importances = np.array(state["importances"], dtype=float)
        return model
