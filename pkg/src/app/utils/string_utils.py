"""
String utils module
"""

import re
from typing import Iterable

_CAMEL_BOUNDARY = re.compile(r"[A-Z]+(?=[A-Z][a-z])|[A-Z]?[a-z]+|[A-Z]+|\d+")


def split_identifier(identifier: str) -> list[str]:
    """
    Splits an identifier into lowercase words on underscores and camelCase.
    Example: "parseHTTPResponse_v2" -> ["parse", "http", "response", "v", "2"].
    """
    words = []
    for chunk in identifier.split("_"):
        words.extend(match.group(0).lower() for match in _CAMEL_BOUNDARY.finditer(chunk))
    return words


def unique_words(identifiers: Iterable[str]) -> set[str]:
    """Distinct lowercase words over a collection of identifiers"""
    words = set()
    for identifier in identifiers:
        words.update(split_identifier(identifier))
    return words


def normalize_path(path: str) -> str:
    """Forward-slash form of a relative path"""
    return path.replace("\\", "/")
