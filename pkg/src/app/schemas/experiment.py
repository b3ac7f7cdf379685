"""
Schemas for declarative experiment configs
"""

from pathlib import Path
from typing import List, Optional

from pydantic import BaseModel, Field, field_validator, model_validator

from src.app.schemas.corpus import CategoryKeywords
from src.app.schemas.learn import Algorithm
from src.app.schemas.sampling import SamplerKind


class ProjectSource(BaseModel):
    """A named project, given either as a source root or an extracted dataset"""
    name: str = Field(..., min_length=1)
    root: Optional[Path] = None
    dataset: Optional[Path] = None

    @model_validator(mode="after")
    def validate_location(self):
        """Exactly one of root/dataset, and it must exist"""
        if (self.root is None) == (self.dataset is None):
            raise ValueError(f"project '{self.name}' needs exactly one of 'root' or 'dataset'")
        location = self.root or self.dataset
        if not location.exists():
            raise ValueError(f"project '{self.name}': {location} does not exist")
        return self


class SplitSettings(BaseModel):
    test_fraction: float = Field(0.2, gt=0.0, lt=1.0)
    k: int = Field(5, ge=2)


class SearchSettings(BaseModel):
    n_trials: int = Field(10, ge=1)
    k_folds: int = Field(5, ge=2)


class SamplerSettings(BaseModel):
    smote_k: int = Field(5, ge=1)
    target_ratio: float = Field(1.0, gt=0.0, le=1.0)


class TransferSettings(BaseModel):
    """Cross-corpus evaluation against a fixed test set"""
    algorithm: Algorithm = Algorithm.RANDOM_FOREST
    sampler: SamplerKind = SamplerKind.NONE
    sources: List[str] = Field(default_factory=list)
    test_dataset: Optional[Path] = None
    test_manifest: Optional[Path] = None


class ExperimentConfig(BaseModel):
    """Everything one experiment run needs; the seed is mandatory"""
    seed: int
    projects: List[ProjectSource] = Field(..., min_length=1)
    target: Optional[str] = None
    keywords: CategoryKeywords = Field(default_factory=CategoryKeywords)
    split: SplitSettings = Field(default_factory=SplitSettings)
    algorithms: List[Algorithm] = Field(default_factory=lambda: list(Algorithm))
    samplers: List[SamplerKind] = Field(default_factory=lambda: list(SamplerKind))
    sampler: SamplerSettings = Field(default_factory=SamplerSettings)
    search: SearchSettings = Field(default_factory=SearchSettings)
    transfer: TransferSettings = Field(default_factory=TransferSettings)
    output_dir: Path = Path("out")
    jobs: int = Field(1, ge=1)
    strict_log_regex: bool = False
    force: bool = False

    @field_validator("projects")
    @classmethod
    def validate_unique_names(cls, v):
        names = [project.name for project in v]
        if len(set(names)) != len(names):
            raise ValueError("project names must be unique")
        return v

    @model_validator(mode="after")
    def validate_references(self):
        names = {project.name for project in self.projects}
        if self.target is not None and self.target not in names:
            raise ValueError(f"target '{self.target}' is not a declared project")
        unknown = [source for source in self.transfer.sources if source not in names]
        if unknown:
            raise ValueError(f"transfer sources not declared as projects: {unknown}")
        return self

    @property
    def target_project(self) -> ProjectSource:
        name = self.target or self.projects[0].name
        return next(project for project in self.projects if project.name == name)

    def project(self, name: str) -> ProjectSource:
        return next(project for project in self.projects if project.name == name)
