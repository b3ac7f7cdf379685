"""
Trained model artifact: learner state plus everything needed to trust its predictions
"""

from dataclasses import dataclass, field
from typing import Any, Dict, List

import numpy as np

from src.app.models.adaboost import AdaBoost
from src.app.models.base import Classifier
from src.app.models.decision_tree import DecisionTree
from src.app.models.forest import ExtraTrees, RandomForest
from src.app.models.logistic import LogisticRegression
from src.app.schemas.learn import Algorithm, AlgorithmSpec
from src.app.schemas.sampling import SamplerSpec

ARTIFACT_FORMAT = 1

CLASSIFIERS = {
    Algorithm.LOGISTIC_REGRESSION: LogisticRegression,
    Algorithm.DECISION_TREE: DecisionTree,
    Algorithm.RANDOM_FOREST: RandomForest,
    Algorithm.EXTRA_TREES: ExtraTrees,
    Algorithm.ADABOOST: AdaBoost,
}


@dataclass
class ModelArtifact:
    """A fitted classifier bound to the feature schema it was trained on"""
    spec: AlgorithmSpec
    schema_hash: str
    feature_names: List[str]
    classifier: Classifier
    sampler: SamplerSpec = field(default_factory=SamplerSpec)
    train_id: str = ""
    provenance: Dict[str, Any] = field(default_factory=dict)

    @property
    def model_id(self) -> str:
        return f"{self.spec.algorithm.value}[{self.sampler.kind.value}]"

    @property
    def feature_importances(self) -> np.ndarray:
        return self.classifier.feature_importances

    def to_payload(self) -> Dict[str, Any]:
        return {
            "format": ARTIFACT_FORMAT,
            "spec": self.spec.model_dump(mode="json"),
            "schema_hash": self.schema_hash,
            "feature_names": list(self.feature_names),
            "sampler": self.sampler.model_dump(mode="json"),
            "train_id": self.train_id,
            "feature_importances": self.feature_importances.tolist(),
            "state": self.classifier.get_state(),
            "provenance": self.provenance,
        }

    @classmethod
    def from_payload(cls, payload: Dict[str, Any]) -> "ModelArtifact":
        if payload.get("format") != ARTIFACT_FORMAT:
            raise ValueError(f"unsupported model artifact format {payload.get('format')}")
        spec = AlgorithmSpec.model_validate(payload["spec"])
        return cls(
            spec=spec,
            schema_hash=payload["schema_hash"],
            feature_names=list(payload["feature_names"]),
            classifier=CLASSIFIERS[spec.algorithm].from_state(payload["state"]),
            sampler=SamplerSpec.model_validate(payload.get("sampler", {})),
            train_id=payload.get("train_id", ""),
            provenance=payload.get("provenance", {}),
        )
