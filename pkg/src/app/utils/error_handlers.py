"""
Error handlers that turn exceptions into exit codes and a JSON diagnostic on stderr
"""

import logging
import sys
from typing import TextIO

import click
from pydantic import ValidationError

from src.app.schemas.error import (
    EXIT_CONFIG,
    EXIT_INTERNAL,
    ErrorDetail,
    ErrorResponse,
    ToolkitError,
)

logger = logging.getLogger(__name__)


def validation_error_details(exc: ValidationError) -> dict:
    """
    Flatten pydantic validation errors into {field: message}
    """
    fields = {}
    for error in exc.errors():
        loc = ".".join(str(part) for part in error.get("loc", ())) or "config"
        fields[loc] = error.get("msg", "invalid value")
    return fields


def build_error_response(exc: BaseException) -> ErrorResponse:
    """
    Creates a consistent error response for any exception
    """
    if isinstance(exc, ToolkitError):
        detail = ErrorDetail(code=exc.code, message=exc.message, details=exc.details or None)
        return ErrorResponse(error=detail, exit_code=exc.exit_code)

    if isinstance(exc, ValidationError):
        detail = ErrorDetail(
            code="VALIDATION_ERROR",
            message="Invalid configuration values",
            details=validation_error_details(exc),
        )
        return ErrorResponse(error=detail, exit_code=EXIT_CONFIG)

    if isinstance(exc, click.ClickException):
        detail = ErrorDetail(code="USAGE_ERROR", message=exc.format_message())
        return ErrorResponse(error=detail, exit_code=EXIT_CONFIG)

    detail = ErrorDetail(
        code="INTERNAL_ERROR",
        message="Unexpected error, see log output for the traceback",
        details={"exception_type": type(exc).__name__, "reason": str(exc)},
    )
    return ErrorResponse(error=detail, exit_code=EXIT_INTERNAL)


def handle_cli_error(exc: BaseException, stream: TextIO = None) -> int:
    """
    Report an exception on stderr and return the process exit code
    """
    response = build_error_response(exc)
    if response.exit_code == EXIT_INTERNAL:
        logger.error(f"Unhandled error: {exc}", exc_info=exc)
    else:
        logger.warning(f"{response.error.code}: {response.error.message}")

    stream = stream or sys.stderr
    stream.write(response.model_dump_json() + "\n")
    return response.exit_code
