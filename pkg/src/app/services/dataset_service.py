"""
Service for stratified splitting, k-folding and dataset/manifest file I/O
"""

import io
import json
import logging
import re
from pathlib import Path
from typing import Dict, Iterator, List, Optional, Tuple

import numpy as np
import pandas as pd

from src.app.models.dataset import INDEX_COLUMNS, LABEL_COLUMN, Dataset
from src.app.schemas.dataset import SplitManifest, SplitSpec
from src.app.schemas.error import (
    DataError,
    DatasetFormatError,
    LeakageError,
    SchemaMismatchError,
    StratificationError,
)
from src.app.services.feature_service import feature_service
from src.app.utils.seeding import derive_rng

logger = logging.getLogger(__name__)

PREAMBLE_PREFIX = "# "
ONE_HOT_PREFIXES = ("constructor_", "type_")
_PARSER_LINE = re.compile(r"line (\d+)")


def round_half_up(value: float) -> int:
    return int(np.floor(value + 0.5))


class DatasetService:
    """
    Service for dataset partitioning and persistence
    """

    @staticmethod
    def _class_indices(dataset: Dataset) -> List[np.ndarray]:
        return [np.flatnonzero(dataset.y == label) for label in (0, 1)]

    def stratified_split(self, dataset: Dataset, spec: SplitSpec) -> Tuple[Dataset, Dataset]:
        """
        Split preserving class balance

        Per class, rows are shuffled with a seeded generator and
        floor(count * fraction) go to test; the rows still missing to reach
        round(n * fraction) are handed out by largest remainder (ties to the
        negative class).

        Args:
            dataset: Rows to split
            spec: Fraction and seed

        Returns:
            (train, test), each in original row order

        Raises:
            StratificationError: when a class has fewer than 2 rows
        """
        classes = self._class_indices(dataset)
        for label, indices in enumerate(classes):
            if len(indices) < 2:
                raise StratificationError(
                    f"class {label} has {len(indices)} rows, at least 2 are needed to stratify",
                    details={"label": label, "rows": int(len(indices))},
                )

        exact = [len(indices) * spec.test_fraction for indices in classes]
        quotas = [int(np.floor(value)) for value in exact]
        missing = round_half_up(len(dataset) * spec.test_fraction) - sum(quotas)
        by_remainder = sorted(range(len(classes)), key=lambda label: (-(exact[label] - quotas[label]), label))
        for label in by_remainder[:max(missing, 0)]:
            quotas[label] += 1

        test_parts = []
        for label, indices in enumerate(classes):
            shuffled = derive_rng(spec.seed, "split", label).permutation(indices)
            test_parts.append(shuffled[:quotas[label]])

        test_index = np.sort(np.concatenate(test_parts))
        train_mask = np.ones(len(dataset), dtype=bool)
        train_mask[test_index] = False
        train_index = np.flatnonzero(train_mask)
        logger.info(f"Stratified split: {len(train_index)} train / {len(test_index)} test rows")
        return dataset.subset(train_index), dataset.subset(test_index)

    def stratified_kfold(self, dataset: Dataset, k: int, seed: int) -> List[np.ndarray]:
        """
        Round-robin fold assignment per class after a seeded shuffle; the fold
        counter carries over from one class to the next

        Returns:
            k sorted index arrays, disjoint and covering the dataset

        Raises:
            StratificationError: when a class has fewer than k rows
        """
        if k < 2:
            raise StratificationError(f"k must be at least 2, got {k}")
        folds: List[List[int]] = [[] for _ in range(k)]
        offset = 0
        for label, indices in enumerate(self._class_indices(dataset)):
            if len(indices) < k:
                raise StratificationError(
                    f"class {label} has {len(indices)} rows, fewer than k={k}",
                    details={"label": label, "rows": int(len(indices)), "k": k},
                )
            shuffled = derive_rng(seed, "kfold", label).permutation(indices)
            for position, index in enumerate(shuffled):
                folds[(offset + position) % k].append(int(index))
            offset += len(shuffled)
        return [np.array(sorted(fold), dtype=int) for fold in folds]

    def fold_partitions(self, dataset: Dataset, k: int, seed: int) -> Iterator[Tuple[np.ndarray, np.ndarray]]:
        """(train indices, validation indices) per fold"""
        folds = self.stratified_kfold(dataset, k, seed)
        for held_out in range(k):
            train = np.sort(np.concatenate([fold for i, fold in enumerate(folds) if i != held_out]))
            yield train, folds[held_out]

    def write_dataset(self, dataset: Dataset, path: Path) -> Path:
        """
        Delimited text: '# key=value' provenance lines, header, one row per method.
        UTF-8 with LF endings; floats are written in shortest round-trip form.
        """
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        preamble = dict(dataset.provenance)
        preamble["schema_hash"] = dataset.schema_hash
        preamble["schema_version"] = preamble.get("schema_version", feature_service.schema.version)
        preamble["rows"] = len(dataset)

        buffer = io.StringIO()
        for key in sorted(preamble):
            buffer.write(f"{PREAMBLE_PREFIX}{key}={preamble[key]}\n")
        dataset.to_frame().to_csv(buffer, index=False, lineterminator="\n")
        path.write_bytes(buffer.getvalue().encode("utf-8"))
        logger.info(f"Wrote {len(dataset)} rows to {path}")
        return path

    def read_dataset(self, path: Path, expected_schema_hash: Optional[str] = None) -> Dataset:
        """
        Read a dataset file back

        Args:
            path: Dataset file
            expected_schema_hash: Reject files built with another schema

        Raises:
            DatasetFormatError: malformed preamble, header or row (with line number)
            SchemaMismatchError: header does not match the recorded schema or the expected one
        """
        path = Path(path)
        try:
            text = path.read_bytes().decode("utf-8")
        except (OSError, UnicodeDecodeError) as e:
            raise DatasetFormatError(f"Cannot read dataset {path}: {e}")

        lines = text.split("\n")
        preamble: Dict[str, str] = {}
        skipped = 0
        for number, line in enumerate(lines, start=1):
            if not line.startswith(PREAMBLE_PREFIX.strip()):
                break
            body = line[len(PREAMBLE_PREFIX):] if line.startswith(PREAMBLE_PREFIX) else line[1:]
            if "=" not in body:
                raise DatasetFormatError("preamble line is not key=value", line=number)
            key, value = body.split("=", 1)
            preamble[key.strip()] = value.strip()
            skipped += 1

        if "schema_hash" not in preamble:
            raise DatasetFormatError("missing schema_hash in preamble", line=1)

        try:
            frame = pd.read_csv(
                io.StringIO("\n".join(lines[skipped:])),
                dtype={column: str for column in INDEX_COLUMNS},
                keep_default_na=False,
                float_precision="round_trip",
            )
        except pd.errors.ParserError as e:
            match = _PARSER_LINE.search(str(e))
            line = int(match.group(1)) + skipped if match else None
            raise DatasetFormatError(f"malformed row in {path.name}", line=line)
        except pd.errors.EmptyDataError:
            raise DatasetFormatError(f"missing header in {path.name}", line=skipped + 1)

        header_line = skipped + 1
        columns = list(frame.columns)
        if tuple(columns[:len(INDEX_COLUMNS)]) != INDEX_COLUMNS or columns[-1:] != [LABEL_COLUMN]:
            raise DatasetFormatError("header must start with the index columns and end with label", line=header_line)

        feature_names = columns[len(INDEX_COLUMNS):-1]
        schema_hash = preamble["schema_hash"]
        version = int(preamble.get("schema_version", feature_service.schema.version))
        if feature_service.hash_names(feature_names, version) != schema_hash:
            raise SchemaMismatchError(
                f"{path.name}: {len(feature_names)} feature columns do not match the recorded schema",
                details={"columns": len(feature_names), "schema_hash": schema_hash},
            )
        if expected_schema_hash is not None and schema_hash != expected_schema_hash:
            raise SchemaMismatchError(
                f"{path.name} was built with schema {schema_hash[:12]}, expected {expected_schema_hash[:12]}",
                details={"expected": expected_schema_hash, "found": schema_hash},
            )

        values = frame[feature_names + [LABEL_COLUMN]]
        numeric = values.apply(pd.to_numeric, errors="coerce")
        bad_rows = np.flatnonzero(numeric.isna().any(axis=1).to_numpy())
        if len(bad_rows):
            raise DatasetFormatError("non-numeric or missing value", line=header_line + 1 + int(bad_rows[0]))
        labels = numeric[LABEL_COLUMN].to_numpy()
        bad_labels = np.flatnonzero((labels != 0) & (labels != 1))
        if len(bad_labels):
            raise DatasetFormatError("label must be 0 or 1", line=header_line + 1 + int(bad_labels[0]))

        identities = list(frame[list(INDEX_COLUMNS)].itertuples(index=False, name=None))
        provenance = {
            key: value for key, value in preamble.items()
            if key not in ("schema_hash", "rows")
        }
        categorical = [name.startswith(ONE_HOT_PREFIXES) for name in feature_names]
        try:
            return Dataset(
                X=numeric[feature_names].to_numpy(dtype=float),
                y=labels.astype(int),
                identities=identities,
                feature_names=feature_names,
                schema_hash=schema_hash,
                categorical=categorical,
                provenance=provenance,
            )
        except DataError as e:
            raise DatasetFormatError(f"{path.name}: {e.message}")

    def build_manifest(self, test: Dataset, spec: SplitSpec, provenance: Optional[Dict] = None) -> SplitManifest:
        return SplitManifest(
            seed=spec.seed,
            test_fraction=spec.test_fraction,
            schema_hash=test.schema_hash,
            test_identities=test.identities,
            provenance=provenance or {},
        )

    def write_manifest(self, manifest: SplitManifest, path: Path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        payload = manifest.model_dump(mode="json")
        path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8", newline="\n")
        return path

    def read_manifest(self, path: Path) -> SplitManifest:
        try:
            return SplitManifest.model_validate_json(Path(path).read_text(encoding="utf-8"))
        except OSError as e:
            raise DataError(f"Cannot read split manifest {path}: {e}")

    def apply_manifest(self, dataset: Dataset, manifest: SplitManifest) -> Tuple[Dataset, Dataset]:
        """
        Rebuild (train, test) from a persisted test partition

        Raises:
            SchemaMismatchError: dataset and manifest schemas differ
            DataError: a test identity is absent from the dataset
        """
        if dataset.schema_hash != manifest.schema_hash:
            raise SchemaMismatchError(
                "split manifest was built with another feature schema",
                details={"expected": manifest.schema_hash, "found": dataset.schema_hash},
            )
        position = {identity: i for i, identity in enumerate(dataset.identities)}
        test_identities = [tuple(identity) for identity in manifest.test_identities]
        missing = [identity for identity in test_identities if identity not in position]
        if missing:
            raise DataError(
                f"{len(missing)} test rows of the manifest are not in the dataset",
                details={"first_missing": list(missing[0])},
            )
        test_index = np.sort([position[identity] for identity in test_identities])
        train_mask = np.ones(len(dataset), dtype=bool)
        train_mask[test_index] = False
        return dataset.subset(np.flatnonzero(train_mask)), dataset.subset(test_index)

    @staticmethod
    def assert_disjoint(first: Dataset, second: Dataset, what: str = "train/test") -> None:
        """
        Raises:
            LeakageError: when the two datasets share an identity
        """
        overlap = set(first.identities) & set(second.identities)
        if overlap:
            raise LeakageError(
                f"{what} share {len(overlap)} rows",
                details={"example": list(sorted(overlap)[0])},
            )


# Global instance
dataset_service = DatasetService()
