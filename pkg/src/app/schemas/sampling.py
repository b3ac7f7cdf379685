"""
Schemas for class-balancing samplers
"""

from enum import Enum

from pydantic import BaseModel, Field


class SamplerKind(str, Enum):
    NONE = "none"
    RUS = "rus"
    SMOTE = "smote"


class SamplerSpec(BaseModel):
    """Class balancing applied to training folds"""
    kind: SamplerKind = SamplerKind.NONE
    seed: int = 0
    smote_k: int = Field(5, ge=1)
    target_ratio: float = Field(1.0, gt=0.0, le=1.0, description="minority:majority after balancing")
