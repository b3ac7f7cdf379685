"""
Service for the label -> remove logs -> measure pipeline that turns a corpus
into leakage-safe feature vectors
"""

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Tuple

from joblib import Parallel, delayed

from src.app.config import settings
from src.app.models.dataset import Dataset
from src.app.schemas.corpus import CategoryKeywords, FileCategory
from src.app.schemas.error import ResidualLogError, SourceParseError
from src.app.schemas.java import RemovalReport
from src.app.schemas.metrics import ClassType, FeatureVector
from src.app.services.corpus_service import corpus_service
from src.app.services.feature_service import feature_service
from src.app.services.java_parser_service import java_parser_service
from src.app.services.log_detection_service import LogDetectionService
from src.app.services.metrics_service import HierarchyIndex, metrics_service

logger = logging.getLogger(__name__)

HierarchyEntry = Tuple[str, ClassType, Optional[str]]


@dataclass
class LogFreeUnit:
    """Result of the first pass over one file"""
    path: str
    source: bytes = b""
    labels: Dict[Tuple[str, str], bool] = field(default_factory=dict)
    report: Optional[RemovalReport] = None
    hierarchy: List[HierarchyEntry] = field(default_factory=list)
    error: Optional[str] = None


@dataclass
class ExtractionResult:
    """Vectors plus the audit trail of one extraction run"""
    vectors: List[FeatureVector]
    reports: List[RemovalReport]
    failures: Dict[str, str]
    production_files: int
    duplicates: int = 0

    @property
    def residual_ratio(self) -> float:
        return LogDetectionService.removal_residual_ratio(self.reports)

    @property
    def parse_failure_ratio(self) -> float:
        return len(self.failures) / self.production_files if self.production_files else 0.0

    @property
    def method_count(self) -> int:
        return len(self.vectors)


def remove_file_logs(root: str, path: str, strict: bool) -> LogFreeUnit:
    """Label methods on the original source, then strip logs and guards"""
    try:
        source = (Path(root) / path).read_bytes()
        detector = LogDetectionService(strict)
        unit = java_parser_service.parse_unit(source, path)
        labels = {(record.class_fqn, record.signature): record.label for record in detector.label_methods(unit)}
        modified, report = detector.remove_logs(unit)
        hierarchy = [
            (decl.simple_name, decl.class_type, decl.superclass)
            for decl in modified.types
        ]
        return LogFreeUnit(path=path, source=modified.source, labels=labels, report=report, hierarchy=hierarchy)
    except (OSError, SourceParseError) as e:
        return LogFreeUnit(path=path, error=str(e))


def measure_file(item: LogFreeUnit, hierarchy: HierarchyIndex) -> List[FeatureVector]:
    """Metrics of every method of a log-free unit, labels from the original source"""
    unit = java_parser_service.parse_unit(item.source, item.path)
    vectors = []
    contexts = {}
    class_metrics = {}
    for method in java_parser_service.method_nodes(unit):
        decl = method.owner
        key = (decl.fqn, method.signature)
        if key not in item.labels:
            logger.warning(f"{item.path}: {decl.fqn}.{method.signature} not found in the original source")
            continue
        if decl.fqn not in contexts:
            contexts[decl.fqn] = metrics_service.type_context(unit, decl)
            class_metrics[decl.fqn] = metrics_service.class_metrics(unit, decl, hierarchy, contexts[decl.fqn])
        method_metrics = metrics_service.method_metrics(unit, method, contexts[decl.fqn])
        vectors.append(feature_service.assemble_features(
            method_metrics,
            class_metrics[decl.fqn],
            item.labels[key],
            (item.path, decl.fqn, method.signature),
        ))
    return vectors


class ExtractionService:
    """
    Service for leakage-safe feature extraction
    """

    def extract(
        self,
        root: Path,
        keywords: Optional[CategoryKeywords] = None,
        jobs: int = 1,
        strict: bool = False,
        shadow_dir: Optional[Path] = None,
    ) -> ExtractionResult:
        """
        Extract one feature vector per production method

        Args:
            root: Project root
            keywords: File classification overrides
            jobs: Worker cap
            strict: Word-boundary log regex
            shadow_dir: Where to mirror log-free sources for audit

        Returns:
            ExtractionResult with vectors sorted by identity
        """
        files = corpus_service.discover_files(root, keywords)
        production = [record.path for record in files if record.category == FileCategory.PRODUCTION]
        logger.info(f"Extracting features from {len(production)} production files")

        first_pass = Parallel(n_jobs=jobs)(delayed(remove_file_logs)(str(root), path, strict) for path in production)

        failures = {}
        units = []
        for item in first_pass:
            if item.error is not None:
                logger.warning(f"Skipping {item.path}: {item.error}")
                failures[item.path] = item.error
            else:
                units.append(item)

        # sequential pre-pass, shared read-only afterwards
        hierarchy = HierarchyIndex()
        for item in units:
            for simple_name, class_type, superclass in item.hierarchy:
                hierarchy.add(simple_name, class_type, superclass)

        if shadow_dir is not None:
            self.write_shadow(units, Path(shadow_dir))

        per_file = Parallel(n_jobs=jobs)(delayed(measure_file)(item, hierarchy) for item in units)

        seen = set()
        vectors: List[FeatureVector] = []
        duplicates = 0
        for vector in sorted((vector for batch in per_file for vector in batch), key=lambda v: v.identity):
            if vector.identity in seen:
                duplicates += 1
                logger.warning(f"Duplicate method identity {vector.identity}, keeping the first")
                continue
            seen.add(vector.identity)
            vectors.append(vector)

        result = ExtractionResult(
            vectors=vectors,
            reports=[item.report for item in units],
            failures=failures,
            production_files=len(production),
            duplicates=duplicates,
        )
        logger.info(
            f"Extracted {result.method_count} methods, residual log ratio {result.residual_ratio:.4f}, "
            f"{len(failures)} unparsable files"
        )
        return result

    @staticmethod
    def write_shadow(units: List[LogFreeUnit], shadow_dir: Path) -> None:
        """Mirror log-free sources under the same relative paths"""
        for item in units:
            target = shadow_dir / item.path
            target.parent.mkdir(parents=True, exist_ok=True)
            target.write_bytes(item.source)
        logger.info(f"Wrote {len(units)} log-free sources to {shadow_dir}")

    @staticmethod
    def check_residual(result: ExtractionResult, force: bool = False, threshold: Optional[float] = None) -> None:
        """
        Raises:
            ResidualLogError: residual ratio above the threshold without force
        """
        threshold = settings.residual_threshold if threshold is None else threshold
        ratio = result.residual_ratio
        if ratio > threshold:
            message = f"residual log ratio {ratio:.4f} exceeds {threshold:.4f}"
            if not force:
                raise ResidualLogError(message, details={"residual_ratio": ratio, "threshold": threshold})
            logger.warning(f"{message}, continuing because of --force")
        elif ratio > 0:
            logger.warning(f"residual log ratio {ratio:.4f} (within {threshold:.4f})")

    @staticmethod
    def to_dataset(result: ExtractionResult, provenance: Optional[Dict] = None) -> Dataset:
        schema = feature_service.schema
        return Dataset.from_vectors(
            result.vectors,
            feature_names=schema.names,
            schema_hash=schema.schema_hash,
            categorical=feature_service.categorical_mask(),
            provenance=provenance,
        )

    @staticmethod
    def removal_summary(result: ExtractionResult) -> Dict:
        """Corpus totals plus one record per unit"""
        total = LogDetectionService.aggregate(result.reports)
        payload = {
            "logs_before": total.logs_before,
            "logs_after": total.logs_after,
            "guards_removed": total.guards_removed,
            "residual_ratio": total.residual_ratio,
            "units": [
                report.model_dump(include={"path", "logs_before", "logs_after", "guards_removed"})
                for report in sorted(result.reports, key=lambda report: report.path)
            ],
            "parse_failures": dict(sorted(result.failures.items())),
            "duplicate_identities": result.duplicates,
        }
        if result.parse_failure_ratio > settings.parse_failure_warning_ratio:
            payload["warning"] = (
                f"{len(result.failures)} of {result.production_files} production files failed to parse "
                f"({result.parse_failure_ratio:.1%})"
            )
        return payload


# Global instance
extraction_service = ExtractionService()
