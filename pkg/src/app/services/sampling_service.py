"""
Service for class balancing of training data: random under-sampling and SMOTE
"""

import logging
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from src.app.models.dataset import Dataset
from src.app.schemas.error import SamplingError
from src.app.schemas.sampling import SamplerKind, SamplerSpec
from src.app.utils.seeding import derive_rng

logger = logging.getLogger(__name__)

SYNTHETIC_PATH = "<synthetic>"
# cap on the number of floats held by one distance block
DISTANCE_BLOCK = 2_000_000


@dataclass
class SmoteDraw:
    """Synthetic rows with the minority positions and weights that produced them"""
    rows: np.ndarray
    bases: np.ndarray
    parents: np.ndarray
    gaps: np.ndarray


def nearest_neighbors(points: np.ndarray, k: int) -> np.ndarray:
    """
    Exact k nearest neighbors (Euclidean, excluding self) per row; equal
    distances resolve to the lower index
    """
    n, d = points.shape
    block = max(1, DISTANCE_BLOCK // max(n * max(d, 1), 1))
    neighbors = np.empty((n, k), dtype=int)
    for start in range(0, n, block):
        stop = min(n, start + block)
        diff = points[start:stop, None, :] - points[None, :, :]
        distances = np.sqrt((diff * diff).sum(axis=2))
        distances[np.arange(stop - start), np.arange(start, stop)] = np.inf
        neighbors[start:stop] = np.argsort(distances, axis=1, kind="stable")[:, :k]
    return neighbors


def smote_arrays(
    minority: np.ndarray,
    n_synthetic: int,
    k: int,
    rng: np.random.Generator,
    categorical: np.ndarray = None,
) -> SmoteDraw:
    """
    x + u * (z - x) for a random minority row x, one of its k nearest
    minority neighbors z and u uniform in [0, 1); categorical columns copy x
    """
    neighbors = nearest_neighbors(minority, k)
    bases = rng.integers(0, len(minority), size=n_synthetic)
    picks = rng.integers(0, k, size=n_synthetic)
    gaps = rng.random(n_synthetic)
    parents = neighbors[bases, picks]
    rows = minority[bases] + gaps[:, None] * (minority[parents] - minority[bases])
    if categorical is not None and np.any(categorical):
        rows[:, categorical] = minority[bases][:, categorical]
    return SmoteDraw(rows=rows, bases=bases, parents=parents, gaps=gaps)


class SamplingService:
    """
    Service for balancing training folds
    """

    @staticmethod
    def _classes(train: Dataset) -> Tuple[int, np.ndarray, np.ndarray]:
        """(minority label, minority indices, majority indices)"""
        positives = np.flatnonzero(train.y == 1)
        negatives = np.flatnonzero(train.y == 0)
        if len(positives) == 0 or len(negatives) == 0:
            raise SamplingError("class balancing needs both classes in the training data")
        if len(positives) <= len(negatives):
            return 1, positives, negatives
        return 0, negatives, positives

    def apply(self, train: Dataset, spec: SamplerSpec) -> Dataset:
        """Dispatch on the sampler kind"""
        if spec.kind == SamplerKind.RUS:
            return self.random_undersample(train, spec)
        if spec.kind == SamplerKind.SMOTE:
            return self.smote(train, spec)
        return train

    def random_undersample(self, train: Dataset, spec: SamplerSpec) -> Dataset:
        """
        Keep every minority row and a seeded uniform sample of majority rows so
        that minority / majority reaches target_ratio; original order is kept
        """
        _, minority, majority = self._classes(train)
        keep = min(len(majority), int(np.floor(len(minority) / spec.target_ratio + 0.5)))
        if keep >= len(majority):
            return train
        chosen = derive_rng(spec.seed, "rus").choice(majority, size=keep, replace=False)
        indices = np.sort(np.concatenate([minority, chosen]))
        logger.debug(f"RUS kept {keep} of {len(majority)} majority rows")
        return train.subset(indices)

    def smote(self, train: Dataset, spec: SamplerSpec) -> Dataset:
        """
        Over-sample the minority class with synthetic rows appended after the
        original ones

        Raises:
            SamplingError: fewer than 2 minority rows
        """
        label, minority, majority = self._classes(train)
        if len(minority) < 2:
            raise SamplingError(
                f"SMOTE needs at least 2 minority rows, got {len(minority)}",
                details={"minority": int(len(minority))},
            )
        target = int(np.floor(spec.target_ratio * len(majority) + 0.5))
        needed = target - len(minority)
        if needed <= 0:
            return train

        k = min(spec.smote_k, len(minority) - 1)
        if k < spec.smote_k:
            logger.warning(f"SMOTE k reduced from {spec.smote_k} to {k} ({len(minority)} minority rows)")
        draw = smote_arrays(
            train.X[minority],
            needed,
            k,
            derive_rng(spec.seed, "smote"),
            train.categorical,
        )
        identities = [(SYNTHETIC_PATH, f"smote-{spec.seed}", f"row{i}") for i in range(needed)]
        logger.debug(f"SMOTE generated {needed} synthetic rows with k={k}")
        return train.with_rows(draw.rows, np.full(needed, label), identities)


# Global instance
sampling_service = SamplingService()
