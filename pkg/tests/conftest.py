from pathlib import Path
from typing import Optional, Sequence

import numpy as np
import pytest

from src.app.models.dataset import Dataset
from src.app.schemas.learn import Algorithm, SearchSpace
from src.app.services.feature_service import feature_service
from src.app.services.java_parser_service import java_parser_service

FIXTURES = Path(__file__).resolve().parent / "fixtures"
SHOP_ROOT = FIXTURES / "shop"

# grids small enough for a search to finish in a fraction of a second
SMALL_SPACE = SearchSpace(
    algorithms={
        Algorithm.LOGISTIC_REGRESSION: {"C": [0.1, 1.0], "scaler": ["none", "standard"]},
        Algorithm.DECISION_TREE: {"criterion": ["gini", "entropy"], "max_depth": [1, 2, 3]},
        Algorithm.RANDOM_FOREST: {"n_estimators": [3, 5], "max_depth": [2, 3]},
        Algorithm.EXTRA_TREES: {"n_estimators": [3, 5], "max_depth": [2, 3]},
        Algorithm.ADABOOST: {"n_estimators": [5, 10], "learning_rate": [1.0, 0.1]},
    }
)


def make_dataset(
    X,
    y,
    names: Optional[Sequence[str]] = None,
    prefix: str = "toy",
    categorical: Optional[Sequence[bool]] = None,
) -> Dataset:
    """Small dataset with synthetic identities; column names default to f0..fn"""
    X = np.asarray(X, dtype=float)
    names = list(names) if names is not None else [f"f{i}" for i in range(X.shape[1])]
    return Dataset(
        X=X,
        y=y,
        identities=[(f"{prefix}/File{i}.java", f"{prefix}.Type", f"m{i}()") for i in range(len(X))],
        feature_names=names,
        schema_hash=feature_service.hash_names(names, 1),
        categorical=categorical,
    )


def blobs(n_negative: int, n_positive: int, seed: int = 0, shift: float = 4.0, prefix: str = "toy") -> Dataset:
    """Two well separated Gaussian blobs in three dimensions"""
    rng = np.random.default_rng(seed)
    negatives = rng.normal(0.0, 1.0, size=(n_negative, 3))
    positives = rng.normal(shift, 1.0, size=(n_positive, 3))
    X = np.vstack([negatives, positives])
    y = np.concatenate([np.zeros(n_negative, dtype=int), np.ones(n_positive, dtype=int)])
    return make_dataset(X, y, prefix=prefix)


def schema_blobs(n_negative: int, n_positive: int, seed: int = 0, prefix: str = "proj") -> Dataset:
    """Rows in the real feature schema; logged methods have a larger method_CBO"""
    rng = np.random.default_rng(seed)
    names = feature_service.schema.names
    y = np.concatenate([np.zeros(n_negative, dtype=int), np.ones(n_positive, dtype=int)])
    X = rng.integers(0, 5, size=(len(y), len(names))).astype(float)
    X[:, names.index("method_CBO")] += 8.0 * y
    X[:, -7:] = 0.0
    X[:, names.index("constructor_False")] = 1.0
    X[:, names.index("type_class")] = 1.0
    return Dataset(
        X=X,
        y=y,
        identities=[(f"{prefix}/src/Type{i}.java", f"{prefix}.Type{i}", "run()") for i in range(len(y))],
        feature_names=names,
        schema_hash=feature_service.schema.schema_hash,
        categorical=feature_service.categorical_mask(),
    )


@pytest.fixture
def parse():
    """Parse inline Java source"""
    def _parse(source: str, path: str = "src/Sample.java"):
        return java_parser_service.parse_unit(source, path)
    return _parse


@pytest.fixture
def shop_root() -> Path:
    return SHOP_ROOT


@pytest.fixture
def separable() -> Dataset:
    return blobs(60, 40)
