"""
Schemas for parsed Java methods and log statements
"""

from typing import List, Tuple

from pydantic import BaseModel, Field, computed_field, model_validator

from src.app.schemas.corpus import LogContext

Identity = Tuple[str, str, str]


class SourceSpan(BaseModel):
    """Byte offsets plus 1-based start/end lines"""
    start_byte: int
    end_byte: int
    start_line: int
    end_line: int

    model_config = {"frozen": True}

    def contains(self, other: "SourceSpan") -> bool:
        return self.start_byte <= other.start_byte and other.end_byte <= self.end_byte


class LogStatement(BaseModel):
    """A detected log expression statement"""
    span: SourceSpan
    context: LogContext
    text: str = Field(..., description="Statement source as written")

    model_config = {"frozen": True}


class MethodRecord(BaseModel):
    """One method or constructor with its label"""
    file_path: str
    class_fqn: str
    signature: str
    is_constructor: bool = False
    span: SourceSpan
    log_statements: List[LogStatement] = Field(default_factory=list)

    @computed_field
    @property
    def label(self) -> bool:
        """A method is logged when it holds at least one log statement"""
        return len(self.log_statements) >= 1

    @property
    def identity(self) -> Identity:
        return (self.file_path, self.class_fqn, self.signature)

    @model_validator(mode="after")
    def validate_spans(self):
        """Every log statement lies within the method"""
        for statement in self.log_statements:
            if not self.span.contains(statement.span):
                raise ValueError(f"log statement outside method span in {self.signature}")
        return self


class RemovalReport(BaseModel):
    """Outcome of log removal on one compilation unit (or a whole corpus)"""
    path: str = ""
    logs_before: int = 0
    logs_after: int = 0
    guards_removed: int = 0

    @model_validator(mode="after")
    def validate_counts(self):
        if self.logs_after > self.logs_before:
            raise ValueError("logs_after cannot exceed logs_before")
        return self

    @computed_field
    @property
    def residual_ratio(self) -> float:
        if self.logs_before == 0:
            return 0.0
        return self.logs_after / self.logs_before
