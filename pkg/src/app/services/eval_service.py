"""
Service for scoring, probabilistic baselines, within-corpus and transfer evaluation
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from src.app.models.artifact import ModelArtifact
from src.app.models.dataset import Dataset
from src.app.schemas.error import ConfigError, DataError, SchemaMismatchError
from src.app.schemas.evaluation import BaselineKind, BaselineSpec, ConfusionMatrix, DeltaRow, EvalReport
from src.app.schemas.learn import Algorithm, SearchConfig, SearchSpace, TrialRecord
from src.app.schemas.sampling import SamplerKind, SamplerSpec
from src.app.services.dataset_service import dataset_service
from src.app.services.learn_service import learn_service
from src.app.utils.scoring import confusion_matrix, ratios
from src.app.utils.seeding import derive_rng, derive_seed

logger = logging.getLogger(__name__)

ALL_SOURCES = "all sources"
Sources = Union[Dataset, Sequence[Dataset], Mapping[str, Dataset]]


@dataclass
class SuiteResult:
    """Reports in grid order plus what produced them"""
    reports: List[EvalReport] = field(default_factory=list)
    deltas: List[DeltaRow] = field(default_factory=list)
    artifacts: Dict[Tuple[str, str], ModelArtifact] = field(default_factory=dict)
    trials: Dict[Tuple[str, str], List[TrialRecord]] = field(default_factory=dict)


class EvalService:
    """
    Service for evaluation reports
    """

    @staticmethod
    def score(predictions, labels, **identity) -> EvalReport:
        """
        Confusion counts and BA/Pr/Rec; zero denominators give 0 and are
        listed in the report's undefined field

        Raises:
            DataError: empty input or length mismatch
        """
        cm = confusion_matrix(predictions, labels)
        ba, precision, recall, undefined = ratios(cm)
        return EvalReport(cm=cm, BA=ba, Pr=precision, Rec=recall, undefined=undefined, **identity)

    @staticmethod
    def baseline_predict(spec: BaselineSpec, n: int) -> np.ndarray:
        """i.i.d. guesses, positive with probability spec.p"""
        if n <= 0:
            raise DataError("baseline needs at least one row to guess")
        rng = derive_rng(spec.seed, "baseline", spec.kind.value)
        return (rng.random(n) < spec.p).astype(int)

    def baseline_reports(self, train: Dataset, test: Dataset, seed: int) -> List[EvalReport]:
        """Random guess (p=0.5) and biased guess (p=train prevalence) on the test set"""
        specs = [
            BaselineSpec(kind=BaselineKind.RANDOM, p=0.5, seed=seed),
            BaselineSpec(kind=BaselineKind.BIASED, p=train.prevalence, seed=seed),
        ]
        return [
            self.score(
                self.baseline_predict(spec, len(test)),
                test.y,
                model_id=f"{spec.kind.value}_guess",
                train_id=train.dataset_id,
                test_id=test.dataset_id,
            )
            for spec in specs
        ]

    def evaluate_model(self, artifact: ModelArtifact, test: Dataset, train_size: Optional[int] = None) -> EvalReport:
        labels, _ = learn_service.predict(artifact, test)
        return self.score(
            labels,
            test.y,
            model_id=artifact.model_id,
            train_id=artifact.train_id,
            test_id=test.dataset_id,
            sampler=artifact.sampler.kind.value,
            train_size=train_size,
        )

    @staticmethod
    def failed_report(model_id: str, sampler: str, error: Exception, **identity) -> EvalReport:
        return EvalReport(
            cm=ConfusionMatrix(),
            BA=0.0,
            Pr=0.0,
            Rec=0.0,
            model_id=model_id,
            sampler=sampler,
            failed=True,
            error=str(error),
            **identity,
        )

    @staticmethod
    def delta(report: EvalReport, reference: EvalReport) -> DeltaRow:
        """Signed difference report - reference"""
        return DeltaRow(
            model_id=report.model_id,
            sampler=report.sampler,
            BA=report.BA - reference.BA,
            Pr=report.Pr - reference.Pr,
            Rec=report.Rec - reference.Rec,
            FP=report.cm.FP - reference.cm.FP,
            FN=report.cm.FN - reference.cm.FN,
        )

    def deltas(self, reports: Sequence[EvalReport]) -> List[DeltaRow]:
        """One row per sampled report whose algorithm also has a successful no-sampling report"""
        references = {
            report.model_id.split("[")[0]: report
            for report in reports
            if report.sampler == SamplerKind.NONE.value and not report.failed
        }
        rows = []
        for report in reports:
            if report.sampler == SamplerKind.NONE.value or report.failed:
                continue
            reference = references.get(report.model_id.split("[")[0])
            if reference is not None:
                rows.append(self.delta(report, reference))
        return rows

    @staticmethod
    def sampler_spec(kind: SamplerKind, template: SamplerSpec, seed: int) -> SamplerSpec:
        """Sampler of the given kind with a seed derived per kind"""
        return template.model_copy(update={"kind": SamplerKind(kind), "seed": derive_seed(seed, "sampler", SamplerKind(kind).value)})

    def evaluate_suite(
        self,
        train: Dataset,
        test: Dataset,
        algorithms: Sequence[Algorithm],
        samplers: Sequence[SamplerKind],
        config: SearchConfig,
        space: Optional[SearchSpace] = None,
        jobs: int = 1,
        provenance: Optional[Dict] = None,
    ) -> SuiteResult:
        """
        Search, refit and score every (algorithm, sampler) cell on the same test
        set; hyper-parameters are searched again for each sampler

        Raises:
            SchemaMismatchError: train and test schemas differ
            LeakageError: train and test share rows
        """
        if train.schema_hash != test.schema_hash:
            raise SchemaMismatchError(
                "train and test sets use different feature schemas",
                details={"train": train.schema_hash, "test": test.schema_hash},
            )
        dataset_service.assert_disjoint(train, test)

        result = SuiteResult()
        for algorithm in algorithms:
            algorithm = Algorithm(algorithm)
            for kind in samplers:
                sampler = self.sampler_spec(kind, config.sampler, config.seed)
                model_id = f"{algorithm.value}[{sampler.kind.value}]"
                logger.info(f"Evaluating {model_id}")
                try:
                    artifact, trials = learn_service.random_search(
                        algorithm,
                        train,
                        config.model_copy(update={"sampler": sampler}),
                        space=space,
                        jobs=jobs,
                        provenance=provenance,
                    )
                    report = self.evaluate_model(artifact, test, train_size=len(train))
                except (DataError, ConfigError) as e:
                    logger.error(f"{model_id} failed: {e}")
                    result.reports.append(
                        self.failed_report(model_id, sampler.kind.value, e, train_id=train.dataset_id, test_id=test.dataset_id)
                    )
                    continue
                key = (algorithm.value, sampler.kind.value)
                result.artifacts[key] = artifact
                result.trials[key] = trials
                result.reports.append(report)
                logger.info(f"{model_id}: BA={report.BA:.3f} Pr={report.Pr:.3f} Rec={report.Rec:.3f}")

        result.deltas = self.deltas(result.reports)
        return result

    @staticmethod
    def _named_sources(sources: Sources) -> Dict[str, Dataset]:
        if isinstance(sources, Dataset):
            return {sources.dataset_id: sources}
        if isinstance(sources, Mapping):
            return dict(sources)
        return {dataset.dataset_id: dataset for dataset in sources}

    @staticmethod
    def _qualify(dataset: Dataset, name: str) -> Dataset:
        """Prefix file paths with the source name so identities stay unique when sources are merged"""
        return Dataset(
            X=dataset.X,
            y=dataset.y,
            identities=[(f"{name}/{path}", fqn, signature) for path, fqn, signature in dataset.identities],
            feature_names=dataset.feature_names,
            schema_hash=dataset.schema_hash,
            categorical=dataset.categorical,
        )

    def transfer_evaluate(
        self,
        sources: Sources,
        fixed_test: Dataset,
        algorithm: Algorithm,
        config: SearchConfig,
        space: Optional[SearchSpace] = None,
        jobs: int = 1,
        provenance: Optional[Dict] = None,
    ) -> List[EvalReport]:
        """
        One model per source and, with several sources, one on their union;
        every model is scored on the same test set. Rows by BA, best first.

        Raises:
            SchemaMismatchError: a source and the test set use different schemas
            LeakageError: a source shares rows with the test set
        """
        named = self._named_sources(sources)
        if not named:
            raise DataError("transfer evaluation needs at least one source")
        for name, dataset in named.items():
            if dataset.schema_hash != fixed_test.schema_hash:
                raise SchemaMismatchError(
                    f"source '{name}' uses another feature schema than the test set",
                    details={"source": dataset.schema_hash, "test": fixed_test.schema_hash},
                )
            dataset_service.assert_disjoint(dataset, fixed_test, f"source '{name}' and the test set")

        scenarios = list(named.items())
        if len(named) > 1:
            combined = Dataset.concat([self._qualify(dataset, name) for name, dataset in named.items()])
            scenarios.append((ALL_SOURCES, combined))

        algorithm = Algorithm(algorithm)
        sampler = self.sampler_spec(config.sampler.kind, config.sampler, config.seed)
        reports = []
        for name, dataset in scenarios:
            model_id = f"{algorithm.value}[{sampler.kind.value}]"
            logger.info(f"Transfer: training {model_id} on {name} ({len(dataset)} rows)")
            try:
                artifact, _ = learn_service.random_search(
                    algorithm,
                    dataset,
                    config.model_copy(update={"sampler": sampler}),
                    space=space,
                    jobs=jobs,
                    provenance=provenance,
                )
                report = self.evaluate_model(artifact, fixed_test, train_size=len(dataset))
            except (DataError, ConfigError) as e:
                logger.error(f"Transfer from {name} failed: {e}")
                report = self.failed_report(model_id, sampler.kind.value, e, test_id=fixed_test.dataset_id, train_size=len(dataset))
            reports.append(report.model_copy(update={"train_id": name}))

        return sorted(reports, key=lambda report: -report.BA)


# Global instance
eval_service = EvalService()
