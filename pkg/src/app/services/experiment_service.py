"""
Service that orchestrates the pipeline behind every command: scan, extract,
experiment and transfer
"""

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Optional

import yaml
from pydantic import ValidationError

from src.app.config import settings
from src.app.models.dataset import Dataset
from src.app.schemas.corpus import CategoryKeywords
from src.app.schemas.dataset import SplitSpec
from src.app.schemas.error import ConfigError, DataError
from src.app.schemas.experiment import ExperimentConfig, ProjectSource
from src.app.schemas.learn import SearchConfig
from src.app.schemas.sampling import SamplerSpec
from src.app.services.corpus_service import corpus_service
from src.app.services.dataset_service import dataset_service
from src.app.services.eval_service import eval_service
from src.app.services.extraction_service import extraction_service
from src.app.services.feature_service import feature_service
from src.app.services.graph_service import graph_service
from src.app.services.learn_service import learn_service
from src.app.services.report_service import report_service
from src.app.utils.hashing import hash_payload
from src.app.utils.provenance import build_provenance
from src.app.utils.seeding import derive_seed

logger = logging.getLogger(__name__)

MANIFEST_FILE = "split_manifest.json"
# fields that change neither results nor their layout
UNHASHED_FIELDS = {"jobs", "output_dir"}


@dataclass
class LoadedConfig:
    config: ExperimentConfig
    config_hash: str


def config_hash_of(payload: Any) -> str:
    return hash_payload(payload)[:16]


class ExperimentService:
    """
    Service for end-to-end runs driven by an experiment config
    """

    @staticmethod
    def load_config(path: Path, overrides: Optional[Dict[str, Any]] = None) -> LoadedConfig:
        """
        Read a YAML experiment config; flags override file values and relative
        paths resolve against the config file's directory

        Raises:
            ConfigError: unreadable file, bad YAML or invalid values
        """
        path = Path(path)
        try:
            raw = yaml.safe_load(path.read_text(encoding="utf-8")) or {}
        except OSError as e:
            raise ConfigError(f"Cannot read config {path}: {e}")
        except yaml.YAMLError as e:
            raise ConfigError(f"Config {path} is not valid YAML: {e}")
        if not isinstance(raw, dict):
            raise ConfigError(f"Config {path} must be a mapping")

        for key, value in (overrides or {}).items():
            if value is not None:
                raw[key] = value
        if raw.get("seed") is None:
            raise ConfigError("seed is mandatory: set it in the config or pass --seed")

        hashed = {key: value for key, value in raw.items() if key not in UNHASHED_FIELDS}
        config_hash = config_hash_of(hashed)

        base = path.parent
        for project in raw.get("projects") or []:
            if isinstance(project, dict):
                for key in ("root", "dataset"):
                    if project.get(key) is not None:
                        project[key] = str(base / project[key])
        transfer = raw.get("transfer")
        if isinstance(transfer, dict):
            for key in ("test_dataset", "test_manifest"):
                if transfer.get(key) is not None:
                    transfer[key] = str(base / transfer[key])
        if raw.get("output_dir") is not None and (overrides or {}).get("output_dir") is None:
            raw["output_dir"] = str(base / raw["output_dir"])

        try:
            config = ExperimentConfig.model_validate(raw)
        except ValidationError as e:
            raise ConfigError(
                f"Invalid config {path}",
                details={"errors": [f"{'.'.join(str(p) for p in err['loc'])}: {err['msg']}" for err in e.errors()]},
            )
        return LoadedConfig(config=config, config_hash=config_hash)

    # scan

    def run_scan(
        self,
        roots: Dict[str, Path],
        out_dir: Path,
        keywords: Optional[CategoryKeywords] = None,
        jobs: int = 1,
        strict: bool = False,
        seed: Optional[int] = None,
    ) -> Path:
        """
        Summaries, context histogram and density chart per project, the
        distribution across projects and the project selection
        """
        provenance = build_provenance(seed, config_hash_of((keywords or CategoryKeywords()).model_dump()))
        scans = {}
        projects = {}
        for name in sorted(roots):
            scan = corpus_service.scan_corpus(roots[name], keywords, jobs, strict)
            if scan.parse_failure_ratio > settings.parse_failure_warning_ratio:
                logger.warning(f"{name}: {scan.parse_failure_ratio:.1%} of production files failed to parse")
            scans[name] = scan
            projects[name] = corpus_service.scan_report(scan)
            densities = [len(record.log_statements) for record in scan.methods if record.label]
            chart = graph_service.generate_density_boxplot(densities, title=f"{name}: log statements per logged method", provenance=provenance)
            report_service.write_png(chart, Path(out_dir) / f"density-{name}.png")

        summaries = corpus_service.summarize_projects(roots, keywords, jobs, strict, scans=scans)
        kept = corpus_service.select_projects(
            [(item.project, item.summary) for item in summaries],
            min_ratio=settings.selection_min_logged_ratio,
            min_files=settings.selection_min_production_files,
        )
        kept_names = [name for name, _ in kept]
        selection = {
            "min_logged_ratio": settings.selection_min_logged_ratio,
            "min_production_files": settings.selection_min_production_files,
            "kept": kept_names,
            "dropped": [item.project for item in summaries if item.project not in kept_names],
        }

        distribution = {}
        if len(roots) > 1:
            rows = corpus_service.project_distribution(summaries)
            distribution = {column: row.model_dump() for column, row in rows.items()}
        bundle = {
            "kind": "scan",
            "projects": projects,
            "distribution": distribution,
            "selection": selection,
            "provenance": provenance,
        }
        return report_service.write_bundle(bundle, out_dir, "scan")

    # extract

    def extract_project(
        self,
        name: str,
        root: Path,
        out_dir: Path,
        keywords: Optional[CategoryKeywords] = None,
        jobs: int = 1,
        strict: bool = False,
        force: bool = False,
        shadow_dir: Optional[Path] = None,
        seed: Optional[int] = None,
        config_hash: Optional[str] = None,
    ) -> Dataset:
        """
        Extract a project into <out>/<name>.csv plus its removal report and schema

        Raises:
            ResidualLogError: too many logs survived removal and force is off
        """
        out_dir = Path(out_dir)
        schema_hash = feature_service.schema.schema_hash
        provenance = build_provenance(seed, config_hash, schema_hash)
        result = extraction_service.extract(root, keywords, jobs, strict, shadow_dir)

        removal = extraction_service.removal_summary(result)
        removal["provenance"] = provenance
        report_service.write_json(removal, out_dir / f"{name}.removal.json")
        if "warning" in removal:
            logger.warning(removal["warning"])
        feature_service.write_schema(out_dir / "schema.json", provenance)
        extraction_service.check_residual(result, force=force)

        dataset = extraction_service.to_dataset(
            result,
            provenance={key: value for key, value in provenance.items() if key != "schema_hash" and value is not None},
        )
        dataset_service.write_dataset(dataset, out_dir / f"{name}.csv")
        return dataset

    def project_dataset(self, project: ProjectSource, loaded: LoadedConfig) -> Dataset:
        """Read a declared dataset or extract the project root"""
        schema_hash = feature_service.schema.schema_hash
        if project.dataset is not None:
            return dataset_service.read_dataset(project.dataset, expected_schema_hash=schema_hash)
        config = loaded.config
        return self.extract_project(
            project.name,
            project.root,
            Path(config.output_dir) / "datasets",
            keywords=config.keywords,
            jobs=config.jobs,
            strict=config.strict_log_regex,
            force=config.force,
            seed=config.seed,
            config_hash=loaded.config_hash,
        )

    # split

    def split_target(self, dataset: Dataset, loaded: LoadedConfig, manifest_path: Optional[Path] = None):
        """
        (train, test) of the target project; an existing manifest for the same
        seed and fraction is reused unchanged
        """
        config = loaded.config
        manifest_path = Path(manifest_path or Path(config.output_dir) / MANIFEST_FILE)
        if manifest_path.exists():
            manifest = dataset_service.read_manifest(manifest_path)
            if manifest.seed == config.seed and manifest.test_fraction == config.split.test_fraction:
                logger.info(f"Reusing split manifest {manifest_path}")
                return dataset_service.apply_manifest(dataset, manifest)
            logger.warning(f"{manifest_path} was written for another seed or fraction, splitting again")

        spec = SplitSpec(test_fraction=config.split.test_fraction, seed=derive_seed(config.seed, "split"))
        train, test = dataset_service.stratified_split(dataset, spec)
        manifest = dataset_service.build_manifest(
            test,
            spec,
            build_provenance(config.seed, loaded.config_hash, dataset.schema_hash),
        ).model_copy(update={"seed": config.seed})
        dataset_service.write_manifest(manifest, manifest_path)
        return train, test

    @staticmethod
    def search_config(config: ExperimentConfig) -> SearchConfig:
        return SearchConfig(
            n_trials=config.search.n_trials,
            k_folds=config.search.k_folds,
            sampler=SamplerSpec(
                kind=config.transfer.sampler,
                seed=derive_seed(config.seed, "sampling"),
                smote_k=config.sampler.smote_k,
                target_ratio=config.sampler.target_ratio,
            ),
            seed=derive_seed(config.seed, "search"),
        )

    # experiment

    def run_experiment(self, loaded: LoadedConfig) -> Path:
        """
        Within-corpus evaluation of every (algorithm, sampler) cell, baselines,
        feature ranking, trial logs and model artifacts
        """
        config = loaded.config
        out_dir = Path(config.output_dir)
        target = config.target_project
        dataset = self.project_dataset(target, loaded)
        train, test = self.split_target(dataset, loaded)
        provenance = build_provenance(config.seed, loaded.config_hash, dataset.schema_hash)
        logger.info(f"{target.name}: {len(train)} training rows, {len(test)} test rows, prevalence {dataset.prevalence:.3f}")

        suite = eval_service.evaluate_suite(
            train,
            test,
            config.algorithms,
            config.samplers,
            self.search_config(config),
            jobs=config.jobs,
            provenance=provenance,
        )
        for (algorithm, sampler), artifact in suite.artifacts.items():
            learn_service.save_artifact(artifact, out_dir / "models" / f"{algorithm}-{sampler}.json")
            learn_service.write_trial_log(
                out_dir / "trials" / f"{algorithm}-{sampler}.json",
                artifact.spec.algorithm,
                artifact.sampler,
                suite.trials[(algorithm, sampler)],
                provenance,
            )

        baselines = eval_service.baseline_reports(train, test, derive_seed(config.seed, "baseline"))
        artifacts = list(suite.artifacts.values())
        ranking = learn_service.rank_features_across_models(artifacts) if artifacts else []

        successful = [report for report in suite.reports if not report.failed]
        if successful:
            best = max(successful, key=lambda report: report.BA)
            artifact = next(item for item in artifacts if item.model_id == best.model_id)
            chart = graph_service.generate_importance_chart(
                learn_service.feature_importance(artifact),
                title=f"Feature importance of {best.model_id}",
                provenance=provenance,
            )
            report_service.write_png(chart, out_dir / "importance.png")

        bundle = {
            "kind": "experiment",
            "project": target.name,
            "train_rows": len(train),
            "test_rows": len(test),
            "reports": [report.model_dump(mode="json") for report in suite.reports],
            "baselines": [report.model_dump(mode="json") for report in baselines],
            "deltas": [delta.model_dump(mode="json") for delta in suite.deltas],
            "ranking": [row.model_dump(mode="json") for row in ranking],
            "provenance": provenance,
        }
        path = report_service.write_bundle(bundle, out_dir, "experiment")
        failed = [report.model_id for report in suite.reports if report.failed]
        if failed:
            raise DataError(f"{len(failed)} evaluation cells failed", details={"failed": failed})
        return path

    # transfer

    def transfer_test_set(self, loaded: LoadedConfig) -> Dataset:
        """The fixed test partition: declared dataset and manifest, or the target's persisted split"""
        config = loaded.config
        transfer = config.transfer
        if transfer.test_dataset is not None:
            dataset = dataset_service.read_dataset(transfer.test_dataset, feature_service.schema.schema_hash)
            if transfer.test_manifest is None:
                return dataset
            _, test = dataset_service.apply_manifest(dataset, dataset_service.read_manifest(transfer.test_manifest))
            return test
        _, test = self.split_target(self.project_dataset(config.target_project, loaded), loaded, transfer.test_manifest)
        return test

    def run_transfer(self, loaded: LoadedConfig) -> Path:
        """Train on each source (and on all of them), score on the fixed test set"""
        config = loaded.config
        transfer = config.transfer
        test = self.transfer_test_set(loaded)
        target_name = None if transfer.test_dataset is not None else config.target_project.name
        names: List[str] = transfer.sources or [
            project.name for project in config.projects if project.name != target_name
        ]
        if not names:
            raise ConfigError("transfer needs at least one source project")

        sources = {}
        for name in names:
            dataset = self.project_dataset(config.project(name), loaded)
            if name == target_name:
                # the target contributes its training partition only
                dataset, _ = self.split_target(dataset, loaded, transfer.test_manifest)
            sources[name] = dataset

        provenance = build_provenance(config.seed, loaded.config_hash, test.schema_hash)
        reports = eval_service.transfer_evaluate(
            sources,
            test,
            transfer.algorithm,
            self.search_config(config),
            jobs=config.jobs,
            provenance=provenance,
        )
        bundle = {
            "kind": "transfer",
            "algorithm": transfer.algorithm.value,
            "sampler": transfer.sampler.value,
            "test_rows": len(test),
            "reports": [report.model_dump(mode="json") for report in reports],
            "provenance": provenance,
        }
        return report_service.write_bundle(bundle, config.output_dir, "transfer")


# Global instance
experiment_service = ExperimentService()
