"""
Immutable in-memory dataset: feature matrix, labels and row identities
"""

from typing import Dict, List, Optional, Sequence

import numpy as np
import pandas as pd

from src.app.schemas.error import DataError, SchemaMismatchError
from src.app.schemas.java import Identity
from src.app.schemas.metrics import FeatureVector
from src.app.utils.hashing import hash_payload

INDEX_COLUMNS = ("file_path", "class_fqn", "method_signature")
LABEL_COLUMN = "label"


class Dataset:
    """
    Rows are addressed by their identity triple. Arrays are read-only; every
    operation returns a new Dataset.
    """

    def __init__(
        self,
        X,
        y,
        identities: Sequence[Identity],
        feature_names: Sequence[str],
        schema_hash: str,
        categorical: Optional[Sequence[bool]] = None,
        provenance: Optional[Dict] = None,
    ):
        X = np.array(X, dtype=float, ndmin=2) if len(identities) else np.zeros((0, len(feature_names)))
        y = np.asarray(y, dtype=int).reshape(-1)
        if X.shape != (len(identities), len(feature_names)) or y.shape[0] != len(identities):
            raise DataError(
                f"dataset shape mismatch: X {X.shape}, y {y.shape}, "
                f"{len(identities)} identities, {len(feature_names)} features"
            )
        if not np.isfinite(X).all():
            raise DataError("dataset contains non-finite feature values")
        if np.any((y != 0) & (y != 1)):
            raise DataError("labels must be 0 or 1")
        identities = [tuple(identity) for identity in identities]
        if len(set(identities)) != len(identities):
            raise DataError("row identities must be unique")

        X.setflags(write=False)
        y.setflags(write=False)
        self.X = X
        self.y = y
        self.identities: List[Identity] = identities
        self.feature_names: List[str] = list(feature_names)
        self.schema_hash = schema_hash
        self.categorical = np.asarray(
            categorical if categorical is not None else [False] * len(self.feature_names), dtype=bool
        )
        self.provenance = dict(provenance or {})

    @classmethod
    def from_vectors(
        cls,
        vectors: Sequence[FeatureVector],
        feature_names: Sequence[str],
        schema_hash: str,
        categorical: Optional[Sequence[bool]] = None,
        provenance: Optional[Dict] = None,
    ) -> "Dataset":
        """Stack encoded rows in the given order"""
        return cls(
            X=[vector.values for vector in vectors],
            y=[int(vector.label) for vector in vectors],
            identities=[vector.identity for vector in vectors],
            feature_names=feature_names,
            schema_hash=schema_hash,
            categorical=categorical,
            provenance=provenance,
        )

    def __len__(self) -> int:
        return len(self.identities)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Dataset):
            return NotImplemented
        return (
            self.schema_hash == other.schema_hash
            and self.identities == other.identities
            and self.feature_names == other.feature_names
            and np.array_equal(self.X, other.X)
            and np.array_equal(self.y, other.y)
        )

    @property
    def positives(self) -> int:
        return int(self.y.sum())

    @property
    def prevalence(self) -> float:
        """Fraction of positive rows (0 for an empty dataset)"""
        return self.positives / len(self) if len(self) else 0.0

    @property
    def dataset_id(self) -> str:
        """Short content id over schema and row identities"""
        return hash_payload({"schema": self.schema_hash, "rows": self.identities})[:12]

    def has_both_classes(self) -> bool:
        return 0 < self.positives < len(self)

    def subset(self, indices) -> "Dataset":
        indices = np.asarray(indices, dtype=int)
        return Dataset(
            X=self.X[indices],
            y=self.y[indices],
            identities=[self.identities[i] for i in indices],
            feature_names=self.feature_names,
            schema_hash=self.schema_hash,
            categorical=self.categorical,
            provenance=self.provenance,
        )

    def with_rows(self, X_extra, y_extra, identities_extra: Sequence[Identity]) -> "Dataset":
        """Append rows (synthetic samples) after the existing ones"""
        return Dataset(
            X=np.vstack([self.X, np.asarray(X_extra, dtype=float).reshape(-1, self.X.shape[1])]),
            y=np.concatenate([self.y, np.asarray(y_extra, dtype=int)]),
            identities=self.identities + [tuple(identity) for identity in identities_extra],
            feature_names=self.feature_names,
            schema_hash=self.schema_hash,
            categorical=self.categorical,
            provenance=self.provenance,
        )

    @classmethod
    def concat(cls, datasets: Sequence["Dataset"]) -> "Dataset":
        """
        Raises:
            SchemaMismatchError: when the datasets do not share a schema
        """
        if not datasets:
            raise DataError("nothing to concatenate")
        first = datasets[0]
        for other in datasets[1:]:
            if other.schema_hash != first.schema_hash:
                raise SchemaMismatchError(
                    "cannot concatenate datasets built with different feature schemas",
                    details={"expected": first.schema_hash, "found": other.schema_hash},
                )
        return cls(
            X=np.vstack([dataset.X for dataset in datasets]),
            y=np.concatenate([dataset.y for dataset in datasets]),
            identities=[identity for dataset in datasets for identity in dataset.identities],
            feature_names=first.feature_names,
            schema_hash=first.schema_hash,
            categorical=first.categorical,
        )

    def to_frame(self) -> pd.DataFrame:
        """Index columns, features in schema order, then the label"""
        frame = pd.DataFrame(self.identities, columns=list(INDEX_COLUMNS))
        features = pd.DataFrame(self.X, columns=self.feature_names)
        frame = pd.concat([frame, features], axis=1)
        frame[LABEL_COLUMN] = self.y
        return frame
