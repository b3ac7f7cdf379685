"""
CART decision tree for binary classification
"""

import logging
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Union

import numpy as np

from src.app.models.base import Classifier
from src.app.utils.seeding import derive_rng

logger = logging.getLogger(__name__)

LEAF = -1
# relative tolerance when comparing impurity decreases
TIE_EPS = 1e-12

MaxFeatures = Union[None, str, int, float]


def gini(p: np.ndarray) -> np.ndarray:
    return 2.0 * p * (1.0 - p)


def entropy(p: np.ndarray) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    q = 1.0 - p
    with np.errstate(divide="ignore", invalid="ignore"):
        result = -(np.where(p > 0, p * np.log2(p), 0.0) + np.where(q > 0, q * np.log2(q), 0.0))
    return result


CRITERIA = {"gini": gini, "entropy": entropy}


def resolve_max_features(max_features: MaxFeatures, n_features: int) -> int:
    """Number of candidate features examined per node"""
    if max_features is None or max_features == "all":
        return n_features
    if max_features == "sqrt":
        return max(1, int(np.floor(np.sqrt(n_features))))
    if max_features == "log2":
        return max(1, int(np.floor(np.log2(n_features))))
    if isinstance(max_features, float) and 0.0 < max_features <= 1.0:
        return max(1, int(max_features * n_features))
    return max(1, min(n_features, int(max_features)))


@dataclass
class Split:
    feature: int
    threshold: float
    decrease: float


class DecisionTree(Classifier):
    """
    CART with Gini (default) or entropy impurity.

    Rows with x[f] <= threshold go left. Best-split thresholds are midpoints
    between consecutive distinct values; ties go to the lowest feature index,
    then the lowest threshold. Zero-gain splits are accepted while a node is
    impure, so depth-limited trees stay the only way to stop early.
    """

    algorithm = "decision_tree"

    def __init__(
        self,
        criterion: str = "gini",
        max_depth: Optional[int] = None,
        min_samples_split: int = 2,
        min_samples_leaf: int = 1,
        max_features: MaxFeatures = None,
        splitter: str = "best",
        seed: int = 0,
    ):
        super().__init__(seed)
        if criterion not in CRITERIA:
            raise ValueError(f"unknown criterion {criterion}")
        if splitter not in ("best", "random"):
            raise ValueError(f"unknown splitter {splitter}")
        self.criterion = criterion
        self.max_depth = None if max_depth is None else int(max_depth)
        self.min_samples_split = max(2, int(min_samples_split))
        self.min_samples_leaf = max(1, int(min_samples_leaf))
        self.max_features = max_features
        self.splitter = splitter

        self.feature: np.ndarray = np.zeros(0, dtype=int)
        self.threshold: np.ndarray = np.zeros(0)
        self.left: np.ndarray = np.zeros(0, dtype=int)
        self.right: np.ndarray = np.zeros(0, dtype=int)
        self.value: np.ndarray = np.zeros(0)

    @property
    def impurity(self):
        return CRITERIA[self.criterion]

    @property
    def node_count(self) -> int:
        return len(self.feature)

    def fit(self, X: np.ndarray, y: np.ndarray, sample_weight: Optional[np.ndarray] = None) -> "DecisionTree":
        X = np.asarray(X, dtype=float)
        y = np.asarray(y, dtype=float)
        w = np.ones(len(y)) if sample_weight is None else np.asarray(sample_weight, dtype=float)
        rng = derive_rng(self.seed, "tree")
        n_rows, n_features = X.shape
        self.n_features = n_features

        feature: List[int] = []
        threshold: List[float] = []
        left: List[int] = []
        right: List[int] = []
        value: List[float] = []
        node_impurity: List[float] = []
        node_weight: List[float] = []
        importances = np.zeros(n_features)

        def new_node(indices: np.ndarray) -> int:
            weight = float(w[indices].sum())
            p = float((w[indices] * y[indices]).sum() / weight) if weight > 0 else 0.0
            feature.append(LEAF)
            threshold.append(0.0)
            left.append(LEAF)
            right.append(LEAF)
            value.append(p)
            node_impurity.append(float(self.impurity(np.array(p))))
            node_weight.append(weight)
            return len(feature) - 1

        root_indices = np.arange(n_rows)
        stack = [(new_node(root_indices), root_indices, 0)]
        while stack:
            node, indices, depth = stack.pop()
            if node_impurity[node] <= 0.0:
                continue
            if self.max_depth is not None and depth >= self.max_depth:
                continue
            if len(indices) < self.min_samples_split or len(indices) < 2 * self.min_samples_leaf:
                continue

            split = self._find_split(X, y, w, indices, node_impurity[node], rng)
            if split is None:
                continue

            goes_left = X[indices, split.feature] <= split.threshold
            left_indices, right_indices = indices[goes_left], indices[~goes_left]
            left_node = new_node(left_indices)
            right_node = new_node(right_indices)
            feature[node] = split.feature
            threshold[node] = split.threshold
            left[node] = left_node
            right[node] = right_node
            importances[split.feature] += (
                node_weight[node] * node_impurity[node]
                - node_weight[left_node] * node_impurity[left_node]
                - node_weight[right_node] * node_impurity[right_node]
            )
            stack.append((right_node, right_indices, depth + 1))
            stack.append((left_node, left_indices, depth + 1))

        self.feature = np.array(feature, dtype=int)
        self.threshold = np.array(threshold, dtype=float)
        self.left = np.array(left, dtype=int)
        self.right = np.array(right, dtype=int)
        self.value = np.array(value, dtype=float)
        importances = np.clip(importances, 0.0, None)
        total = importances.sum()
        self._importances = importances / total if total > 0 else importances
        return self

    def find_best_split(self, X: np.ndarray, y: np.ndarray, sample_weight: Optional[np.ndarray] = None) -> Optional[Split]:
        """Best split of the root node over every feature (exhaustive, for inspection)"""
        X = np.asarray(X, dtype=float)
        y = np.asarray(y, dtype=float)
        w = np.ones(len(y)) if sample_weight is None else np.asarray(sample_weight, dtype=float)
        p = float((w * y).sum() / w.sum())
        saved, self.max_features, self.splitter = (self.max_features, self.splitter), None, "best"
        try:
            return self._find_split(X, y, w, np.arange(len(y)), float(self.impurity(np.array(p))), None)
        finally:
            self.max_features, self.splitter = saved

    def _find_split(
        self,
        X: np.ndarray,
        y: np.ndarray,
        w: np.ndarray,
        indices: np.ndarray,
        parent_impurity: float,
        rng: Optional[np.random.Generator],
    ) -> Optional[Split]:
        n_features = X.shape[1]
        k = resolve_max_features(self.max_features, n_features)
        if k < n_features and rng is not None:
            candidates = np.sort(rng.choice(n_features, size=k, replace=False))
        else:
            candidates = np.arange(n_features)

        weights = w[indices]
        total_weight = weights.sum()
        tolerance = TIE_EPS * max(total_weight, 1.0)
        best: Optional[Split] = None
        for f in candidates:
            if self.splitter == "random":
                split = self._random_split(X[indices, f], y[indices], weights, parent_impurity, rng)
            else:
                split = self._best_threshold(X[indices, f], y[indices], weights, parent_impurity, tolerance)
            if split is None:
                continue
            if best is None or split.decrease > best.decrease + tolerance:
                best = Split(feature=int(f), threshold=split.threshold, decrease=split.decrease)
        return best

    def _best_threshold(
        self,
        x: np.ndarray,
        y: np.ndarray,
        w: np.ndarray,
        parent_impurity: float,
        tolerance: float,
    ) -> Optional[Split]:
        order = np.argsort(x, kind="stable")
        xs, ys, ws = x[order], y[order], w[order]
        n = len(xs)
        if n < 2:
            return None
        cumulative_weight = np.cumsum(ws)
        cumulative_positive = np.cumsum(ws * ys)
        total_weight = cumulative_weight[-1]
        total_positive = cumulative_positive[-1]

        left_weight = cumulative_weight[:-1]
        left_positive = cumulative_positive[:-1]
        right_weight = total_weight - left_weight
        right_positive = total_positive - left_positive

        left_count = np.arange(1, n)
        valid = (xs[:-1] < xs[1:]) & (left_count >= self.min_samples_leaf) & (n - left_count >= self.min_samples_leaf)
        valid &= (left_weight > 0) & (right_weight > 0)
        if not valid.any():
            return None

        with np.errstate(divide="ignore", invalid="ignore"):
            left_impurity = self.impurity(np.where(left_weight > 0, left_positive / left_weight, 0.0))
            right_impurity = self.impurity(np.where(right_weight > 0, right_positive / right_weight, 0.0))
        decrease = total_weight * parent_impurity - left_weight * left_impurity - right_weight * right_impurity
        decrease = np.where(valid, decrease, -np.inf)

        top = decrease.max()
        position = int(np.flatnonzero(decrease >= top - tolerance)[0])
        threshold = (xs[position] + xs[position + 1]) / 2.0
        if threshold >= xs[position + 1]:
            threshold = float(xs[position])
        return Split(feature=-1, threshold=float(threshold), decrease=float(decrease[position]))

    def _random_split(
        self,
        x: np.ndarray,
        y: np.ndarray,
        w: np.ndarray,
        parent_impurity: float,
        rng: Optional[np.random.Generator],
    ) -> Optional[Split]:
        low, high = float(x.min()), float(x.max())
        if low == high:
            return None
        draw = rng.random() if rng is not None else 0.5
        threshold = low + draw * (high - low)
        if threshold >= high:
            threshold = low
        goes_left = x <= threshold
        n_left = int(goes_left.sum())
        if n_left < self.min_samples_leaf or len(x) - n_left < self.min_samples_leaf:
            return None
        left_weight, right_weight = w[goes_left].sum(), w[~goes_left].sum()
        if left_weight <= 0 or right_weight <= 0:
            return None
        left_p = (w[goes_left] * y[goes_left]).sum() / left_weight
        right_p = (w[~goes_left] * y[~goes_left]).sum() / right_weight
        decrease = (
            (left_weight + right_weight) * parent_impurity
            - left_weight * float(self.impurity(np.array(left_p)))
            - right_weight * float(self.impurity(np.array(right_p)))
        )
        return Split(feature=-1, threshold=float(threshold), decrease=float(decrease))

    def apply(self, X: np.ndarray) -> np.ndarray:
        """Leaf index reached by every row"""
        X = np.asarray(X, dtype=float)
        node = np.zeros(X.shape[0], dtype=int)
        while True:
            split_feature = self.feature[node]
            active = np.flatnonzero(split_feature != LEAF)
            if len(active) == 0:
                return node
            current = node[active]
            goes_left = X[active, split_feature[active]] <= self.threshold[current]
            node[active] = np.where(goes_left, self.left[current], self.right[current])

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        return self.value[self.apply(X)]

    def get_state(self) -> Dict[str, Any]:
        return {
            "params": {
                "criterion": self.criterion,
                "max_depth": self.max_depth,
                "min_samples_split": self.min_samples_split,
                "min_samples_leaf": self.min_samples_leaf,
                "max_features": self.max_features,
                "splitter": self.splitter,
                "seed": self.seed,
            },
            "n_features": self.n_features,
            "feature": self.feature.tolist(),
            "threshold": self.threshold.tolist(),
            "left": self.left.tolist(),
            "right": self.right.tolist(),
            "value": self.value.tolist(),
            "importances": self.feature_importances.tolist(),
        }

    @classmethod
    def from_state(cls, state: Dict[str, Any]) -> "DecisionTree":
        tree = cls(**state["params"])
        tree.n_features = state["n_features"]
        tree.feature = np.array(state["feature"], dtype=int)
        tree.threshold = np.array(state["threshold"], dtype=float)
        tree.left = np.array(state["left"], dtype=int)
        tree.right = np.array(state["right"], dtype=int)
        tree.value = np.array(state["value"], dtype=float)
        tree._importances = np.array(state["importances"], dtype=float)
        return tree
