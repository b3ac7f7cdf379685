"""Datasets and learners"""

from .adaboost import AdaBoost
from .artifact import CLASSIFIERS, ModelArtifact
from .base import Classifier
from .dataset import Dataset
from .decision_tree import DecisionTree
from .forest import ExtraTrees, RandomForest
from .logistic import LogisticRegression
from .scalers import Scaler

__all__ = [
    "AdaBoost",
    "CLASSIFIERS",
    "Classifier",
    "Dataset",
    "DecisionTree",
    "ExtraTrees",
    "LogisticRegression",
    "ModelArtifact",
    "RandomForest",
    "Scaler",
]
