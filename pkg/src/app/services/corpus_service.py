"""
Service for corpus discovery, file classification and log pervasiveness statistics
"""

import logging
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from joblib import Parallel, delayed

from src.app.schemas.corpus import (
    JAVA_SUFFIX,
    CategoryKeywords,
    ContextHistogram,
    CorpusSummary,
    DensityQuantiles,
    DistributionRow,
    FileCategory,
    FileRecord,
    ProjectSummary,
)
from src.app.schemas.error import CorpusError, SourceParseError
from src.app.schemas.java import MethodRecord
from src.app.services.java_parser_service import java_parser_service
from src.app.services.log_detection_service import LogDetectionService
from src.app.utils.string_utils import normalize_path

logger = logging.getLogger(__name__)

CATEGORY_ORDER = (FileCategory.TEST, FileCategory.DOCUMENTATION, FileCategory.BUILD)
KeywordOverrides = Union[CategoryKeywords, Dict[str, List[str]]]
DISTRIBUTION_COLUMNS = ("files", "log_statements", "methods", "logged_methods", "logged_ratio")


@dataclass
class FileScan:
    """Outcome of labeling one production file"""
    path: str
    methods: List[MethodRecord] = field(default_factory=list)
    error: Optional[str] = None


@dataclass
class CorpusScan:
    """Discovered files plus labeled methods of the production files"""
    files: List[FileRecord]
    methods: List[MethodRecord]
    failures: Dict[str, str] = field(default_factory=dict)

    @property
    def parse_failure_ratio(self) -> float:
        production = sum(1 for record in self.files if record.category == FileCategory.PRODUCTION)
        return len(self.failures) / production if production else 0.0


def scan_file(root: str, path: str, strict: bool) -> FileScan:
    """Parse and label one file; failures are reported, never raised"""
    try:
        source = (Path(root) / path).read_bytes()
        unit = java_parser_service.parse_unit(source, path)
        return FileScan(path=path, methods=LogDetectionService(strict).label_methods(unit))
    except (OSError, SourceParseError) as e:
        return FileScan(path=path, error=str(e))


class CorpusService:
    """
    Service for corpus-level measurements
    """

    @staticmethod
    def merge_keywords(overrides: Optional[KeywordOverrides] = None) -> CategoryKeywords:
        """Default keyword groups with per-group replacements"""
        if isinstance(overrides, CategoryKeywords):
            return overrides
        return CategoryKeywords(**(overrides or {}))

    @staticmethod
    def classify_path(path: str, keywords: Optional[CategoryKeywords] = None) -> FileCategory:
        """
        First matching keyword group wins (test, documentation, build);
        case-sensitive substring match on the forward-slash path
        """
        keywords = keywords or CategoryKeywords()
        path = normalize_path(path)
        for category in CATEGORY_ORDER:
            if any(keyword in path for keyword in getattr(keywords, category.value)):
                return category
        return FileCategory.PRODUCTION

    def discover_files(
        self,
        root: Path,
        overrides: Optional[KeywordOverrides] = None,
    ) -> List[FileRecord]:
        """
        Find every Java file under root, sorted by relative path

        Args:
            root: Corpus (project) root directory
            overrides: Replacement keyword lists per category

        Returns:
            List of FileRecord

        Raises:
            CorpusError: when the root is missing or unreadable
        """
        root = Path(root)
        if not root.is_dir() or not os.access(root, os.R_OK | os.X_OK):
            raise CorpusError(f"Corpus root is not a readable directory: {root}", details={"root": str(root)})

        keywords = self.merge_keywords(overrides)

        def on_error(error: OSError) -> None:
            logger.warning(f"Skipping unreadable directory {error.filename}: {error.strerror}")

        records = []
        for directory, _, filenames in os.walk(root, onerror=on_error):
            for filename in filenames:
                if not filename.endswith(JAVA_SUFFIX):
                    continue
                relative = normalize_path(os.path.relpath(os.path.join(directory, filename), root))
                records.append(FileRecord(path=relative, category=self.classify_path(relative, keywords)))

        records.sort(key=lambda record: record.path)
        logger.info(f"Discovered {len(records)} Java files under {root}")
        return records

    def scan_corpus(
        self,
        root: Path,
        overrides: Optional[KeywordOverrides] = None,
        jobs: int = 1,
        strict: bool = False,
    ) -> CorpusScan:
        """
        Discover files and label the methods of production files
        """
        files = self.discover_files(root, overrides)
        production = [record.path for record in files if record.category == FileCategory.PRODUCTION]
        scans = Parallel(n_jobs=jobs)(delayed(scan_file)(str(root), path, strict) for path in production)

        methods: List[MethodRecord] = []
        failures: Dict[str, str] = {}
        for scan in scans:
            if scan.error is not None:
                logger.warning(f"Skipping {scan.path}: {scan.error}")
                failures[scan.path] = scan.error
                continue
            methods.extend(scan.methods)
        methods.sort(key=lambda record: record.identity)
        return CorpusScan(files=files, methods=methods, failures=failures)

    @staticmethod
    def summarize_corpus(
        records: Iterable[MethodRecord],
        files: Optional[Sequence[FileRecord]] = None,
    ) -> CorpusSummary:
        """
        Method, logged-method and log statement counts (M, LM, LM/M)

        Args:
            records: Methods of production files
            files: Discovered files for the per-category counts
        """
        file_count = {category: 0 for category in FileCategory}
        for record in files or ():
            file_count[record.category] += 1

        methods = logged = statements = 0
        for record in records:
            methods += 1
            statements += len(record.log_statements)
            logged += int(record.label)

        return CorpusSummary(
            file_count=file_count,
            method_count=methods,
            log_statement_count=statements,
            logged_method_count=logged,
            logged_ratio=logged / methods if methods else 0.0,
        )

    @staticmethod
    def placement_context_histogram(records: Iterable[MethodRecord]) -> ContextHistogram:
        histogram = ContextHistogram()
        for record in records:
            for statement in record.log_statements:
                histogram.counts[statement.context] += 1
                histogram.total += 1
        return histogram

    @staticmethod
    def log_density_distribution(records: Iterable[MethodRecord]) -> DensityQuantiles:
        """
        Nearest-rank five-number summary of log statements per logged method
        """
        counts = [len(record.log_statements) for record in records if record.label]
        if not counts:
            return DensityQuantiles(empty=True)
        quantiles = np.percentile(np.asarray(counts), [0, 25, 50, 75, 100], method="inverted_cdf")
        low, q1, median, q3, high = (int(value) for value in quantiles)
        return DensityQuantiles(min=low, q1=q1, median=median, q3=q3, max=high)

    @staticmethod
    def select_projects(
        summaries: Sequence[Tuple[str, CorpusSummary]],
        min_ratio: float = 0.04,
        min_files: int = 100,
    ) -> List[Tuple[str, CorpusSummary]]:
        """Keep projects with logged ratio above min_ratio and more than min_files production files"""
        kept = [
            (project, summary)
            for project, summary in summaries
            if summary.logged_ratio > min_ratio and summary.production_files > min_files
        ]
        logger.info(f"Selected {len(kept)} of {len(summaries)} projects")
        return kept

    def summarize_projects(
        self,
        roots: Dict[str, Path],
        overrides: Optional[KeywordOverrides] = None,
        jobs: int = 1,
        strict: bool = False,
        scans: Optional[Dict[str, CorpusScan]] = None,
    ) -> List[ProjectSummary]:
        """
        One summary per project root, in name order

        Args:
            roots: Project name -> root directory
            scans: Projects already scanned by name; the others are scanned here
        """
        scans = dict(scans or {})
        summaries = []
        for name in sorted(roots):
            if name not in scans:
                scans[name] = self.scan_corpus(roots[name], overrides, jobs, strict)
            scan = scans[name]
            summaries.append(ProjectSummary(project=name, summary=self.summarize_corpus(scan.methods, scan.files)))
        return summaries

    @staticmethod
    def project_distribution(summaries: Sequence[ProjectSummary]) -> Dict[str, DistributionRow]:
        """
        Min, quartiles, average and max across projects of files, log statements,
        methods, logged methods and logged ratio
        """
        if not summaries:
            return {}
        frame = pd.DataFrame([
            {
                "files": item.summary.production_files,
                "log_statements": item.summary.log_statement_count,
                "methods": item.summary.method_count,
                "logged_methods": item.summary.logged_method_count,
                "logged_ratio": item.summary.logged_ratio,
            }
            for item in summaries
        ])
        rows = {}
        for column in DISTRIBUTION_COLUMNS:
            series = frame[column].astype(float)
            rows[column] = DistributionRow(
                min=float(series.min()),
                q1=float(series.quantile(0.25)),
                median=float(series.median()),
                average=float(series.mean()),
                q3=float(series.quantile(0.75)),
                max=float(series.max()),
            )
        return rows

    def scan_report(self, scan: CorpusScan) -> Dict:
        """Summary payload with the fixed key names of the scan output"""
        summary = self.summarize_corpus(scan.methods, scan.files)
        histogram = self.placement_context_histogram(scan.methods)
        density = self.log_density_distribution(scan.methods)
        return {
            "files_by_category": {category.value: count for category, count in summary.file_count.items()},
            "methods": summary.method_count,
            "log_statements": summary.log_statement_count,
            "logged_methods": summary.logged_method_count,
            "logged_ratio": summary.logged_ratio,
            "context_histogram": {
                "counts": {context.value: count for context, count in histogram.counts.items()},
                "percentages": {context.value: share for context, share in histogram.percentages().items()},
                "total": histogram.total,
            },
            "density_quantiles": density.model_dump(),
            "parse_failures": dict(sorted(scan.failures.items())),
        }


# Global instance
corpus_service = CorpusService()
