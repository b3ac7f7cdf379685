"""
Provenance block embedded in every output file
"""
from typing import Any, Dict, Optional

from src.app.config import settings


def build_provenance(
    seed: Optional[int] = None,
    config_hash: Optional[str] = None,
    schema_hash: Optional[str] = None,
    **extra: Any,
) -> Dict[str, Any]:
    """
    Tool version, config hash, seed and schema hash (no wall-clock values)
    """
    provenance = {
        "tool": settings.tool_version,
        "seed": seed,
        "config_hash": config_hash,
        "schema_hash": schema_hash,
    }
    provenance.update(extra)
    return provenance
