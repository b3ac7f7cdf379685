"""
Service for training, hyper-parameter search, prediction and feature importance
"""

import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import yaml
from joblib import Parallel, delayed
from pydantic import ValidationError

from src.app.config import settings
from src.app.models.artifact import CLASSIFIERS, ModelArtifact
from src.app.models.base import Classifier
from src.app.models.dataset import Dataset
from src.app.models.forest import TreeEnsemble
from src.app.schemas.error import ConfigError, DataError, SchemaMismatchError, TrainingError
from src.app.schemas.learn import (
    Algorithm,
    AlgorithmSpec,
    RankingRow,
    ScalerKind,
    SearchConfig,
    SearchSpace,
    TrialRecord,
)
from src.app.schemas.sampling import SamplerSpec
from src.app.services.dataset_service import dataset_service
from src.app.services.feature_service import feature_service
from src.app.services.sampling_service import sampling_service
from src.app.utils.scoring import balanced_accuracy
from src.app.utils.seeding import derive_rng, derive_seed

logger = logging.getLogger(__name__)

Rows = Union[Dataset, np.ndarray]


def _score_fold(
    spec: AlgorithmSpec,
    fold_train: Dataset,
    fold_val: Dataset,
    sampler: SamplerSpec,
) -> float:
    """Balance the fold-train part, fit, and score on the untouched validation part"""
    dataset_service.assert_disjoint(fold_train, fold_val, "fold train/validation")
    balanced = sampling_service.apply(fold_train, sampler)
    dataset_service.assert_disjoint(balanced, fold_val, "balanced fold/validation")
    classifier = LearnService.build_classifier(spec)
    Classifier.check_training_data(balanced.X, balanced.y)
    classifier.fit(balanced.X, balanced.y)
    return balanced_accuracy(classifier.predict(fold_val.X), fold_val.y)


class LearnService:
    """
    Service for the five learners
    """

    def __init__(self):
        self._search_space: Optional[SearchSpace] = None

    @property
    def search_space(self) -> SearchSpace:
        if self._search_space is None:
            self._search_space = self.load_search_space(settings.search_space_path)
        return self._search_space

    def load_search_space(self, path: Path) -> SearchSpace:
        """
        Read and validate the hyper-parameter grids

        Raises:
            ConfigError: missing file, bad YAML or invalid grid
        """
        try:
            with open(path, "r", encoding="utf-8") as f:
                raw = yaml.safe_load(f) or {}
            return SearchSpace.model_validate(raw)
        except OSError as e:
            raise ConfigError(f"Cannot read search space {path}: {e}")
        except yaml.YAMLError as e:
            raise ConfigError(f"Search space {path} is not valid YAML: {e}")
        except ValidationError as e:
            raise ConfigError(f"Invalid search space {path}", details={"errors": e.errors(include_url=False)})

    @staticmethod
    def draw_hyperparams(
        space: SearchSpace,
        algorithm: Algorithm,
        rng: np.random.Generator,
    ) -> Tuple[Dict[str, Any], ScalerKind]:
        """
        One uniform draw per grid, in sorted parameter order; the scaler of the
        linear model is returned apart from its hyper-parameters
        """
        grid = space.algorithms.get(algorithm)
        if grid is None:
            raise ConfigError(f"search space has no grid for {algorithm.value}")
        drawn = {}
        for name in sorted(grid):
            values = grid[name]
            drawn[name] = values[int(rng.integers(0, len(values)))]
        scaler = ScalerKind(drawn.pop("scaler", ScalerKind.NONE))
        return drawn, scaler

    @staticmethod
    def build_classifier(spec: AlgorithmSpec, n_jobs: int = 1) -> Classifier:
        """
        Raises:
            ConfigError: unknown hyper-parameter for the algorithm
        """
        params = dict(spec.hyperparams)
        if spec.algorithm == Algorithm.LOGISTIC_REGRESSION:
            params["scaler"] = spec.scaler
        cls = CLASSIFIERS[spec.algorithm]
        if issubclass(cls, TreeEnsemble):
            params["n_jobs"] = n_jobs
        try:
            return cls(seed=spec.seed, **params)
        except (TypeError, ValueError) as e:
            raise ConfigError(f"Invalid hyper-parameters for {spec.algorithm.value}: {e}")

    def train_classifier(
        self,
        spec: AlgorithmSpec,
        train: Dataset,
        sampler: Optional[SamplerSpec] = None,
        n_jobs: int = 1,
        provenance: Optional[Dict] = None,
    ) -> ModelArtifact:
        """
        Fit one learner on an already balanced training set

        Raises:
            TrainingError: empty, single-class or non-finite training data
        """
        Classifier.check_training_data(train.X, train.y)
        classifier = self.build_classifier(spec, n_jobs=n_jobs)
        classifier.fit(train.X, train.y)
        logger.debug(f"Trained {spec.algorithm.value} on {len(train)} rows")
        return ModelArtifact(
            spec=spec,
            schema_hash=train.schema_hash,
            feature_names=train.feature_names,
            classifier=classifier,
            sampler=sampler or SamplerSpec(),
            train_id=train.dataset_id,
            provenance=dict(provenance or {}),
        )

    def predict(self, artifact: ModelArtifact, rows: Rows, schema_hash: Optional[str] = None) -> Tuple[np.ndarray, np.ndarray]:
        """
        (labels, scores) where label = score >= 0.5

        Raises:
            SchemaMismatchError: rows built with another feature schema
        """
        if isinstance(rows, Dataset):
            schema_hash = rows.schema_hash
            X = rows.X
        else:
            X = np.asarray(rows, dtype=float)
            if X.ndim == 1:
                X = X.reshape(1, -1)
        if schema_hash is not None and schema_hash != artifact.schema_hash:
            raise SchemaMismatchError(
                f"model {artifact.model_id} was trained on another feature schema",
                details={"expected": artifact.schema_hash, "found": schema_hash},
            )
        if X.shape[1] != len(artifact.feature_names):
            raise SchemaMismatchError(
                f"expected {len(artifact.feature_names)} features, got {X.shape[1]}",
                details={"expected": len(artifact.feature_names), "found": int(X.shape[1])},
            )
        scores = artifact.classifier.predict_proba(X)
        return (scores >= 0.5).astype(int), scores

    def random_search(
        self,
        algorithm: Algorithm,
        train: Dataset,
        config: SearchConfig,
        space: Optional[SearchSpace] = None,
        jobs: int = 1,
        provenance: Optional[Dict] = None,
    ) -> Tuple[ModelArtifact, List[TrialRecord]]:
        """
        Seeded random search with stratified k-fold cross-validation

        The sampler only ever sees the training part of a fold. The best trial
        (highest mean balanced accuracy, earliest on ties) is refitted on the
        whole balanced training set.

        Raises:
            StratificationError: a class has fewer than k rows
            TrainingError: every trial failed
        """
        space = space or self.search_space
        algorithm = Algorithm(algorithm)
        folds = list(dataset_service.fold_partitions(train, config.k_folds, config.seed))
        model_seed = derive_seed(config.seed, "model", algorithm.value)

        trials: List[TrialRecord] = []
        specs: List[Optional[AlgorithmSpec]] = []
        for trial in range(config.n_trials):
            hyperparams, scaler = self.draw_hyperparams(space, algorithm, derive_rng(config.seed, "search", algorithm.value, trial))
            recorded = dict(hyperparams)
            if algorithm == Algorithm.LOGISTIC_REGRESSION:
                recorded["scaler"] = scaler.value
            try:
                spec = AlgorithmSpec(algorithm=algorithm, hyperparams=hyperparams, scaler=scaler, seed=model_seed)
                fold_scores = Parallel(n_jobs=jobs)(
                    delayed(_score_fold)(
                        spec,
                        train.subset(train_index),
                        train.subset(val_index),
                        config.sampler.model_copy(update={"seed": derive_seed(config.sampler.seed, "fold", fold)}),
                    )
                    for fold, (train_index, val_index) in enumerate(folds)
                )
            except (DataError, ConfigError, ValueError, FloatingPointError) as e:
                logger.warning(f"{algorithm.value} trial {trial} failed: {e}")
                trials.append(TrialRecord(trial=trial, hyperparams=recorded, error=str(e)))
                specs.append(None)
                continue
            mean_score = float(np.mean(fold_scores))
            logger.info(f"{algorithm.value} trial {trial}: mean BA {mean_score:.4f} {recorded}")
            trials.append(
                TrialRecord(
                    trial=trial,
                    hyperparams=recorded,
                    fold_scores=[float(score) for score in fold_scores],
                    mean_score=mean_score,
                )
            )
            specs.append(spec)

        scored = [record for record in trials if record.mean_score is not None]
        if not scored:
            raise TrainingError(
                f"all {config.n_trials} {algorithm.value} trials failed",
                details={"errors": [record.error for record in trials]},
            )
        best = max(scored, key=lambda record: (record.mean_score, -record.trial))
        logger.info(f"Best {algorithm.value} trial {best.trial} with mean BA {best.mean_score:.4f}")

        balanced = sampling_service.apply(
            train, config.sampler.model_copy(update={"seed": derive_seed(config.sampler.seed, "full")})
        )
        artifact = self.train_classifier(
            specs[best.trial],
            balanced,
            sampler=config.sampler,
            n_jobs=jobs,
            provenance=provenance,
        )
        artifact.train_id = train.dataset_id
        return artifact, trials

    @staticmethod
    def feature_importance(artifact: ModelArtifact) -> List[Tuple[str, float]]:
        """Features by decreasing importance, ties in schema order"""
        importances = artifact.feature_importances
        order = sorted(range(len(importances)), key=lambda i: (-importances[i], i))
        return [(artifact.feature_names[i], float(importances[i])) for i in order]

    def rank_features_across_models(self, artifacts: Sequence[ModelArtifact], top_k: int = 5) -> List[RankingRow]:
        """
        Count how often each feature takes each of the top_k positions across
        models; rows by total, then by earlier positions, then schema order
        """
        if not artifacts:
            raise DataError("feature ranking needs at least one model")
        counts: Dict[str, List[int]] = {}
        schema_order = {name: i for i, name in enumerate(artifacts[0].feature_names)}
        for artifact in artifacts:
            for position, (name, _) in enumerate(self.feature_importance(artifact)[:top_k]):
                counts.setdefault(name, [0] * top_k)[position] += 1

        def order(name: str):
            positions = counts[name]
            return (-sum(positions), [-count for count in positions], schema_order.get(name, len(schema_order)), name)

        return [
            RankingRow(
                feature=name,
                scope=feature_service.scope_of(name),
                positions=counts[name],
                total=sum(counts[name]),
            )
            for name in sorted(counts, key=order)
        ]

    @staticmethod
    def save_artifact(artifact: ModelArtifact, path: Path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(
            json.dumps(artifact.to_payload(), indent=2, sort_keys=True) + "\n",
            encoding="utf-8",
            newline="\n",
        )
        return path

    @staticmethod
    def load_artifact(path: Path, expected_schema_hash: Optional[str] = None) -> ModelArtifact:
        """
        Raises:
            DataError: unreadable or malformed artifact
            SchemaMismatchError: artifact bound to another feature schema
        """
        try:
            payload = json.loads(Path(path).read_text(encoding="utf-8"))
            artifact = ModelArtifact.from_payload(payload)
        except (OSError, ValueError, KeyError, ValidationError) as e:
            raise DataError(f"Cannot load model artifact {path}: {e}")
        if expected_schema_hash is not None and artifact.schema_hash != expected_schema_hash:
            raise SchemaMismatchError(
                f"model artifact {path} was trained on another feature schema",
                details={"expected": expected_schema_hash, "found": artifact.schema_hash},
            )
        return artifact

    @staticmethod
    def write_trial_log(
        path: Path,
        algorithm: Algorithm,
        sampler: SamplerSpec,
        trials: Sequence[TrialRecord],
        provenance: Optional[Dict] = None,
    ) -> Path:
        payload = {
            "algorithm": Algorithm(algorithm).value,
            "sampler": sampler.model_dump(mode="json"),
            "trials": [record.model_dump(mode="json") for record in trials],
            "provenance": provenance or {},
        }
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8", newline="\n")
        return path


# Global instance
learn_service = LearnService()
