"""
Service for the canonical 68-column feature schema and feature vector assembly
"""

import json
import logging
from pathlib import Path
from typing import Dict, List, Optional

from src.app.config import settings
from src.app.schemas.error import SchemaMismatchError
from src.app.schemas.java import Identity
from src.app.schemas.metrics import (
    CLASS_METRIC_NAMES,
    METHOD_METRIC_NAMES,
    ClassMetrics,
    ClassType,
    FeatureDescriptor,
    FeatureSchema,
    FeatureVector,
    MethodMetrics,
)
from src.app.utils.hashing import hash_payload

logger = logging.getLogger(__name__)

FEATURE_COUNT = 68
CONSTRUCTOR_SLOTS = ("constructor_False", "constructor_True")
CLASS_TYPE_SLOTS = tuple(f"type_{class_type.value}" for class_type in ClassType)
FORBIDDEN_FRAGMENTS = ("try", "catch")


class FeatureService:
    """
    Service for building feature schemas and encoded vectors
    """

    def __init__(self, version: Optional[int] = None):
        self._schema = self.build_schema(version if version is not None else settings.schema_version)

    @property
    def schema(self) -> FeatureSchema:
        return self._schema

    @staticmethod
    def build_schema(version: int) -> FeatureSchema:
        """
        Canonical column order: method numerics, class numerics, then the
        isConstructor and classType one-hots
        """
        features: List[FeatureDescriptor] = []
        for metric in METHOD_METRIC_NAMES:
            features.append(FeatureDescriptor(name=f"method_{metric}", scope="method", metric=metric, kind="numeric"))
        for metric in CLASS_METRIC_NAMES:
            features.append(FeatureDescriptor(name=f"class_{metric}", scope="class", metric=metric, kind="numeric"))
        for slot in CONSTRUCTOR_SLOTS:
            features.append(FeatureDescriptor(name=slot, scope="method", metric="isConstructor", kind="one_hot"))
        for slot in CLASS_TYPE_SLOTS:
            features.append(FeatureDescriptor(name=slot, scope="class", metric="classType", kind="one_hot"))

        names = [feature.name for feature in features]
        if len(names) != FEATURE_COUNT:
            raise ValueError(f"feature schema has {len(names)} columns, expected {FEATURE_COUNT}")
        leaking = [name for name in names if any(fragment in name.lower() for fragment in FORBIDDEN_FRAGMENTS)]
        if leaking:
            raise ValueError(f"exception-handling features are not allowed: {leaking}")

        return FeatureSchema(
            version=version,
            features=features,
            schema_hash=FeatureService.hash_names(names, version),
        )

    @staticmethod
    def hash_names(names: List[str], version: int) -> str:
        """Hash identifying an ordered column list"""
        return hash_payload({"version": version, "names": list(names)})

    def assemble_features(
        self,
        method: MethodMetrics,
        cls: ClassMetrics,
        label: bool,
        identity: Identity,
    ) -> FeatureVector:
        """
        Combine method and enclosing class metrics into one encoded row

        Args:
            method: Metrics of the log-free method
            cls: Metrics of the log-free enclosing type
            label: Whether the ORIGINAL method held a log statement
            identity: (file_path, class_fqn, signature)

        Returns:
            FeatureVector with 68 values in schema order
        """
        constructor = [0.0, 1.0] if method.isConstructor else [1.0, 0.0]
        class_type = [1.0 if class_type == cls.classType else 0.0 for class_type in ClassType]
        values = method.numeric_values() + cls.numeric_values() + constructor + class_type
        file_path, class_fqn, signature = identity
        return FeatureVector(
            file_path=file_path,
            class_fqn=class_fqn,
            signature=signature,
            values=values,
            label=label,
        )

    def categorical_mask(self) -> List[bool]:
        """True for one-hot columns"""
        return [feature.kind == "one_hot" for feature in self._schema.features]

    def scope_of(self, name: str) -> str:
        for feature in self._schema.features:
            if feature.name == name:
                return feature.scope
        return "unknown"

    def check_hash(self, schema_hash: str, source: str = "input") -> None:
        """
        Raises:
            SchemaMismatchError: when the hash differs from the active schema
        """
        if schema_hash != self._schema.schema_hash:
            raise SchemaMismatchError(
                f"{source} was built with feature schema {schema_hash[:12]}, expected {self._schema.schema_hash[:12]}",
                details={"expected": self._schema.schema_hash, "found": schema_hash},
            )

    def write_schema(self, path: Path, provenance: Optional[Dict] = None) -> Path:
        """Write schema.json describing every column"""
        payload = self._schema.model_dump(mode="json")
        payload["provenance"] = provenance or {}
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8", newline="\n")
        logger.info(f"Feature schema written to {path}")
        return path


# Global instance
feature_service = FeatureService()
