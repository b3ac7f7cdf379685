"""
Schemas for dataset splitting and the persisted split manifest
"""

from enum import Enum
from typing import List, Tuple

from pydantic import BaseModel, Field, field_validator


class SplitKind(str, Enum):
    TRAIN_TEST = "train_test"
    K_FOLD = "k_fold"


class SplitSpec(BaseModel):
    """How a dataset is partitioned"""
    test_fraction: float = Field(0.2, gt=0.0, lt=1.0)
    seed: int
    kind: SplitKind = SplitKind.TRAIN_TEST
    k: int = Field(5, ge=2)


class SplitManifest(BaseModel):
    """Identities of a persisted test partition, reused across experiments"""
    seed: int
    test_fraction: float
    schema_hash: str
    test_identities: List[Tuple[str, str, str]]
    provenance: dict = Field(default_factory=dict)

    @field_validator("test_identities")
    @classmethod
    def validate_unique(cls, v):
        if len(set(v)) != len(v):
            raise ValueError("test identities must be unique")
        return v
