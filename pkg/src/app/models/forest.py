"""
Random forest and extremely randomized trees
"""

import logging
from typing import Any, Dict, List, Optional

import numpy as np
from joblib import Parallel, delayed

from src.app.models.base import Classifier
from src.app.models.decision_tree import DecisionTree, MaxFeatures
from src.app.utils.seeding import derive_rng, derive_seed

logger = logging.getLogger(__name__)


def _fit_member(tree: DecisionTree, X: np.ndarray, y: np.ndarray, bootstrap: bool, seed: int) -> DecisionTree:
    if bootstrap:
        rows = derive_rng(seed, "bootstrap").integers(0, X.shape[0], size=X.shape[0])
        return tree.fit(X[rows], y[rows])
    return tree.fit(X, y)


class TreeEnsemble(Classifier):
    """
    Averaged probability of independently grown trees. Member i is seeded with
    derive_seed(seed, "member", i), so results do not depend on n_jobs.
    """

    bootstrap_default = True
    splitter = "best"

    def __init__(
        self,
        n_estimators: int = 100,
        criterion: str = "gini",
        max_depth: Optional[int] = None,
        min_samples_split: int = 2,
        min_samples_leaf: int = 1,
        max_features: MaxFeatures = "sqrt",
        bootstrap: Optional[bool] = None,
        n_jobs: int = 1,
        seed: int = 0,
    ):
        super().__init__(seed)
        self.n_estimators = int(n_estimators)
        self.criterion = criterion
        self.max_depth = max_depth
        self.min_samples_split = min_samples_split
        self.min_samples_leaf = min_samples_leaf
        self.max_features = max_features
        self.bootstrap = self.bootstrap_default if bootstrap is None else bool(bootstrap)
        self.n_jobs = n_jobs
        self.members: List[DecisionTree] = []

    def _make_member(self, index: int) -> DecisionTree:
        return DecisionTree(
            criterion=self.criterion,
            max_depth=self.max_depth,
            min_samples_split=self.min_samples_split,
            min_samples_leaf=self.min_samples_leaf,
            max_features=self.max_features,
            splitter=self.splitter,
            seed=derive_seed(self.seed, "member", index),
        )

    def fit(self, X: np.ndarray, y: np.ndarray, sample_weight: Optional[np.ndarray] = None) -> "TreeEnsemble":
        X = np.asarray(X, dtype=float)
        y = np.asarray(y, dtype=float)
        self.n_features = X.shape[1]
        members = [self._make_member(i) for i in range(self.n_estimators)]
        self.members = Parallel(n_jobs=self.n_jobs)(
            delayed(_fit_member)(member, X, y, self.bootstrap, member.seed) for member in members
        )
        importances = np.mean([member.feature_importances for member in self.members], axis=0)
        total = importances.sum()
        self._importances = importances / total if total > 0 else importances
        logger.debug(f"Fitted {self.algorithm} with {len(self.members)} trees")
        return self

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        return np.mean([member.predict_proba(X) for member in self.members], axis=0)

    def get_state(self) -> Dict[str, Any]:
        return {
            "params": {
                "n_estimators": self.n_estimators,
                "criterion": self.criterion,
                "max_depth": self.max_depth,
                "min_samples_split": self.min_samples_split,
                "min_samples_leaf": self.min_samples_leaf,
                "max_features": self.max_features,
                "bootstrap": self.bootstrap,
                "seed": self.seed,
            },
            "n_features": self.n_features,
            "members": [member.get_state() for member in self.members],
            "importances": self.feature_importances.tolist(),
        }

    @classmethod
    def from_state(cls, state: Dict[str, Any]) -> "TreeEnsemble":
        ensemble = cls(**state["params"])
        ensemble.n_features = state["n_features"]
        ensemble.members = [DecisionTree.from_state(member) for member in state["members"]]
        ensemble._importances = np.array(state["importances"], dtype=float)
        return ensemble


class RandomForest(TreeEnsemble):
    """Bootstrap samples, best splits over a random feature subset"""
    algorithm = "random_forest"
    bootstrap_default = True
    splitter = "best"


class ExtraTrees(TreeEnsemble):
    """Whole training set, one uniform random threshold per candidate feature"""
    algorithm = "extra_trees"
    bootstrap_default = False
    splitter = "random"
