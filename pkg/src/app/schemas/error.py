"""
Schemes for standardized error responses and the toolkit exception hierarchy
"""

from typing import Any, Dict, Optional

from pydantic import BaseModel

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_DATA = 2
EXIT_INTERNAL = 3


class ErrorDetail(BaseModel):
    """Error Detail model"""
    code: str
    message: str
    details: Optional[Dict[str, Any]] = None


class ErrorResponse(BaseModel):
    """Error Response model"""
    success: bool = False
    error: ErrorDetail
    exit_code: int


class ToolkitError(Exception):
    """
    Base exception carrying the process exit code and a machine-readable code
    """

    exit_code = EXIT_INTERNAL
    code = "INTERNAL_ERROR"

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None, code: Optional[str] = None):
        self.message = message
        self.details = details or {}
        if code:
            self.code = code
        super().__init__(self.message)


class ConfigError(ToolkitError):
    """Invalid or incomplete configuration, bad command-line usage"""
    exit_code = EXIT_CONFIG
    code = "CONFIG_ERROR"


class DataError(ToolkitError):
    """Input data cannot be processed"""
    exit_code = EXIT_DATA
    code = "DATA_ERROR"


class CorpusError(DataError):
    """Corpus root missing or unreadable"""
    code = "CORPUS_ERROR"


class DatasetFormatError(DataError):
    """Malformed dataset file"""
    code = "DATASET_FORMAT_ERROR"

    def __init__(self, message: str, line: Optional[int] = None, details: Optional[Dict[str, Any]] = None):
        self.line = line
        details = dict(details or {})
        if line is not None:
            details["line"] = line
            message = f"{message} (line {line})"
        super().__init__(message, details)


class SchemaMismatchError(DataError):
    """Feature schema hash differs from the expected one"""
    code = "SCHEMA_MISMATCH"


class StratificationError(DataError):
    """A class is too small to stratify"""
    code = "STRATIFICATION_ERROR"


class SamplingError(DataError):
    """Class balancing cannot be applied"""
    code = "SAMPLING_ERROR"


class TrainingError(DataError):
    """A learner cannot be fitted on the given data"""
    code = "TRAINING_ERROR"


class LeakageError(DataError):
    """Train and test partitions share rows"""
    code = "LEAKAGE_ERROR"


class ResidualLogError(DataError):
    """Log removal left too many log statements behind"""
    code = "RESIDUAL_LOGS"


class SourceParseError(DataError):
    """A compilation unit does not parse"""
    code = "SOURCE_PARSE_ERROR"
