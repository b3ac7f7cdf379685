"""
Schemas for learners, hyper-parameter search and trial logs
"""

from enum import Enum
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, Field, field_validator, model_validator

from src.app.schemas.sampling import SamplerSpec

ADABOOST_LEARNING_RATES = (1.0, 0.1, 0.01, 0.001, 0.0001)


class Algorithm(str, Enum):
    LOGISTIC_REGRESSION = "logistic_regression"
    DECISION_TREE = "decision_tree"
    RANDOM_FOREST = "random_forest"
    EXTRA_TREES = "extra_trees"
    ADABOOST = "adaboost"


class ScalerKind(str, Enum):
    NONE = "none"
    MIN_MAX = "min_max"
    UNIT_NORM = "unit_norm"
    ROBUST = "robust"
    STANDARD = "standard"


class AlgorithmSpec(BaseModel):
    """A learner plus its hyper-parameters"""
    algorithm: Algorithm
    hyperparams: Dict[str, Any] = Field(default_factory=dict)
    scaler: ScalerKind = ScalerKind.NONE
    seed: int = 0

    @model_validator(mode="after")
    def validate_scaler(self):
        """Scaling only applies to the linear model"""
        if self.scaler != ScalerKind.NONE and self.algorithm != Algorithm.LOGISTIC_REGRESSION:
            raise ValueError("scaler is only valid for logistic_regression")
        return self


class SearchConfig(BaseModel):
    """Random search with stratified k-fold cross-validation"""
    n_trials: int = Field(10, ge=1)
    k_folds: int = Field(5, ge=2)
    objective: str = Field("balanced_accuracy", frozen=True)
    sampler: SamplerSpec = Field(default_factory=SamplerSpec)
    seed: int = 0

    @field_validator("objective")
    @classmethod
    def validate_objective(cls, v):
        if v != "balanced_accuracy":
            raise ValueError("the search objective is fixed to balanced_accuracy")
        return v


class SearchSpace(BaseModel):
    """Candidate values per algorithm and hyper-parameter"""
    algorithms: Dict[Algorithm, Dict[str, List[Any]]]

    @model_validator(mode="after")
    def validate_grids(self):
        for algorithm, grid in self.algorithms.items():
            for name, values in grid.items():
                if not values:
                    raise ValueError(f"empty grid for {algorithm.value}.{name}")
        rates = self.algorithms.get(Algorithm.ADABOOST, {}).get("learning_rate", [])
        if any(float(rate) not in ADABOOST_LEARNING_RATES for rate in rates):
            raise ValueError("adaboost learning_rate must be drawn from 10^{0..-4}")
        scalers = self.algorithms.get(Algorithm.LOGISTIC_REGRESSION, {}).get("scaler", [])
        for scaler in scalers:
            ScalerKind(scaler)
        return self


class TrialRecord(BaseModel):
    """One hyper-parameter draw and its fold scores"""
    trial: int
    hyperparams: Dict[str, Any]
    fold_scores: List[float] = Field(default_factory=list)
    mean_score: Optional[float] = None
    error: Optional[str] = None


class RankingRow(BaseModel):
    """How often a feature occupies each top-k position across models"""
    feature: str
    scope: str
    positions: List[int]
    total: int
