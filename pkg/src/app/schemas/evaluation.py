"""
Schemas for scores, baselines and evaluation reports
"""

from enum import Enum
from typing import List, Optional

from pydantic import BaseModel, Field, NonNegativeInt, model_validator


class ConfusionMatrix(BaseModel):
    TP: NonNegativeInt = 0
    FP: NonNegativeInt = 0
    TN: NonNegativeInt = 0
    FN: NonNegativeInt = 0

    @property
    def total(self) -> int:
        return self.TP + self.FP + self.TN + self.FN


class EvalReport(BaseModel):
    """Scores of one model on one test set"""
    cm: ConfusionMatrix
    BA: float
    Pr: float
    Rec: float
    undefined: List[str] = Field(default_factory=list, description="ratios with a zero denominator")
    model_id: str = ""
    train_id: str = ""
    test_id: str = ""
    sampler: str = "none"
    train_size: Optional[int] = None
    failed: bool = False
    error: Optional[str] = None


class BaselineKind(str, Enum):
    RANDOM = "random"
    BIASED = "biased"


class BaselineSpec(BaseModel):
    """Probabilistic guesser"""
    kind: BaselineKind
    p: float = Field(..., ge=0.0, le=1.0)
    seed: int = 0

    @model_validator(mode="after")
    def validate_random(self):
        if self.kind == BaselineKind.RANDOM and self.p != 0.5:
            raise ValueError("random guess uses p = 0.5")
        return self


class DeltaRow(BaseModel):
    """Signed difference of a sampled run against its no-sampling run"""
    model_id: str
    sampler: str
    BA: float
    Pr: float
    Rec: float
    FP: int
    FN: int
