"""
Schemas for corpus discovery and pervasiveness statistics
"""

from enum import Enum
from typing import Dict, List, Optional

from pydantic import BaseModel, Field, field_validator, model_validator

JAVA_SUFFIX = ".java"


class FileCategory(str, Enum):
    """Path-derived category of a source file"""
    PRODUCTION = "production"
    TEST = "test"
    DOCUMENTATION = "documentation"
    BUILD = "build"


class LogContext(str, Enum):
    """Direct enclosing construct of a log statement"""
    IF_ELSE = "if_else"
    CATCH_CLAUSE = "catch_clause"
    METHOD_DECLARATION = "method_declaration"
    TRY_STATEMENT = "try_statement"
    LOOP_STATEMENT = "loop_statement"
    OTHER = "other"


class CategoryKeywords(BaseModel):
    """Keyword groups used to classify files, checked in declaration order"""
    test: List[str] = Field(default_factory=lambda: ["fixture", "memtest", "/mock/", "test/"])
    documentation: List[str] = Field(default_factory=lambda: ["docs/", "/examples/"])
    build: List[str] = Field(default_factory=lambda: ["buildSrc/"])


class FileRecord(BaseModel):
    """A discovered Java source file"""
    path: str = Field(..., description="Path relative to the corpus root, forward slashes")
    category: FileCategory

    model_config = {"frozen": True}

    @field_validator("path")
    @classmethod
    def validate_suffix(cls, v):
        """Only Java sources are records"""
        if not v.endswith(JAVA_SUFFIX):
            raise ValueError(f"path must end with {JAVA_SUFFIX}")
        return v


class CorpusSummary(BaseModel):
    """Counts over the methods of production files"""
    file_count: Dict[FileCategory, int] = Field(
        default_factory=lambda: {category: 0 for category in FileCategory}
    )
    method_count: int = 0
    log_statement_count: int = 0
    logged_method_count: int = 0
    logged_ratio: float = 0.0

    @model_validator(mode="after")
    def validate_counts(self):
        """LM <= M and at least one statement per logged method"""
        if self.logged_method_count > self.method_count:
            raise ValueError("logged_method_count cannot exceed method_count")
        if self.log_statement_count < self.logged_method_count:
            raise ValueError("log_statement_count cannot be lower than logged_method_count")
        return self

    @property
    def production_files(self) -> int:
        return self.file_count.get(FileCategory.PRODUCTION, 0)


class ContextHistogram(BaseModel):
    """Log statements bucketed by direct enclosing context"""
    counts: Dict[LogContext, int] = Field(
        default_factory=lambda: {context: 0 for context in LogContext}
    )
    total: int = 0

    def percentages(self) -> Dict[LogContext, float]:
        """Share of each context, 0 when the histogram is empty"""
        if not self.total:
            return {context: 0.0 for context in self.counts}
        return {context: count / self.total for context, count in self.counts.items()}


class DensityQuantiles(BaseModel):
    """Nearest-rank five-number summary of log statements per logged method"""
    empty: bool = False
    min: Optional[int] = None
    q1: Optional[int] = None
    median: Optional[int] = None
    q3: Optional[int] = None
    max: Optional[int] = None


class ProjectSummary(BaseModel):
    """Summary of one project root, input to project selection"""
    project: str
    summary: CorpusSummary


class DistributionRow(BaseModel):
    """Min, quartiles, average and max of one column across projects"""
    min: float
    q1: float
    median: float
    average: float
    q3: float
    max: float
