"""
L2-regularized logistic regression fitted by full-batch gradient descent
"""

import logging
from typing import Any, Dict, List, Optional

import numpy as np

from src.app.models.base import Classifier
from src.app.models.scalers import Scaler
from src.app.schemas.learn import ScalerKind

logger = logging.getLogger(__name__)

ARMIJO = 1e-4
MIN_STEP = 1e-16
MAX_STEP = 1e6


def sigmoid(z: np.ndarray) -> np.ndarray:
    return np.exp(-np.logaddexp(0.0, -z))


class LogisticRegression(Classifier):
    """
    Minimizes (1/n) * [sum(log-loss) + ||w||^2 / (2C)] (intercept not penalized)
    with backtracking line search; stops when the gradient norm drops below
    tol or after max_iter iterations.
    """

    algorithm = "logistic_regression"

    def __init__(
        self,
        C: float = 1.0,
        tol: float = 1e-6,
        max_iter: int = 10000,
        scaler: ScalerKind = ScalerKind.NONE,
        seed: int = 0,
    ):
        super().__init__(seed)
        if C <= 0:
            raise ValueError("C must be positive")
        self.C = float(C)
        self.tol = float(tol)
        self.max_iter = int(max_iter)
        self.scaler = Scaler(scaler)
        self.coef = np.zeros(0)
        self.intercept = 0.0
        self.loss_history: List[float] = []
        self.n_iter = 0

    def _loss(self, X: np.ndarray, y: np.ndarray, coef: np.ndarray, intercept: float) -> float:
        z = X @ coef + intercept
        data_term = np.sum(np.logaddexp(0.0, z) - y * z)
        return float((data_term + coef @ coef / (2.0 * self.C)) / len(y))

    def _gradient(self, X: np.ndarray, y: np.ndarray, coef: np.ndarray, intercept: float):
        residual = sigmoid(X @ coef + intercept) - y
        n = len(y)
        return (X.T @ residual + coef / self.C) / n, float(residual.sum() / n)

    def fit(self, X: np.ndarray, y: np.ndarray, sample_weight: Optional[np.ndarray] = None) -> "LogisticRegression":
        X = self.scaler.fit_transform(np.asarray(X, dtype=float))
        y = np.asarray(y, dtype=float)
        self.n_features = X.shape[1]
        coef = np.zeros(X.shape[1])
        intercept = 0.0
        loss = self._loss(X, y, coef, intercept)
        self.loss_history = [loss]
        step = 1.0

        iteration = 0
        for iteration in range(1, self.max_iter + 1):
            grad_coef, grad_intercept = self._gradient(X, y, coef, intercept)
            grad_sq = float(grad_coef @ grad_coef + grad_intercept ** 2)
            if np.sqrt(grad_sq) < self.tol:
                break

            step = min(step * 2.0, MAX_STEP)
            while True:
                candidate_coef = coef - step * grad_coef
                candidate_intercept = intercept - step * grad_intercept
                candidate_loss = self._loss(X, y, candidate_coef, candidate_intercept)
                if candidate_loss <= loss - ARMIJO * step * grad_sq:
                    break
                step *= 0.5
                if step < MIN_STEP:
                    break
            if step < MIN_STEP:
                logger.debug("Line search stalled, stopping gradient descent")
                break

            coef, intercept, loss = candidate_coef, candidate_intercept, candidate_loss
            self.loss_history.append(loss)

        self.n_iter = iteration
        self.coef = coef
        self.intercept = float(intercept)
        self._importances = np.abs(coef)
        return self

    def decision_function(self, X: np.ndarray) -> np.ndarray:
        return self.scaler.transform(np.asarray(X, dtype=float)) @ self.coef + self.intercept

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        return sigmoid(self.decision_function(X))

    def get_state(self) -> Dict[str, Any]:
        return {
            "params": {
                "C": self.C,
                "tol": self.tol,
                "max_iter": self.max_iter,
                "scaler": self.scaler.kind.value,
                "seed": self.seed,
            },
            "n_features": self.n_features,
            "scaler_state": self.scaler.get_state(),
            "coef": self.coef.tolist(),
            "intercept": self.intercept,
            "n_iter": self.n_iter,
        }

    @classmethod
    def from_state(cls, state: Dict[str, Any]) -> "LogisticRegression":
        model = cls(**state["params"])
        model.n_features = state["n_features"]
        model.scaler = Scaler.from_state(state["scaler_state"])
        model.coef = np.array(state["coef"], dtype=float)
        model.intercept = float(state["intercept"])
        model.n_iter = int(state.get("n_iter", 0))
        model._importances = np.abs(model.coef)
        return model
