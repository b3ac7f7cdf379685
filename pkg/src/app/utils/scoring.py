"""
Confusion counts and the ratios derived from them
"""
from typing import List, Tuple

import numpy as np

from src.app.schemas.error import DataError
from src.app.schemas.evaluation import ConfusionMatrix


def confusion_matrix(predictions, labels) -> ConfusionMatrix:
    """
    Raises:
        DataError: empty input or length mismatch
    """
    predictions = np.asarray(predictions, dtype=int).reshape(-1)
    labels = np.asarray(labels, dtype=int).reshape(-1)
    if predictions.shape != labels.shape:
        raise DataError(
            f"{len(predictions)} predictions for {len(labels)} labels",
            details={"predictions": int(len(predictions)), "labels": int(len(labels))},
        )
    if len(labels) == 0:
        raise DataError("cannot score an empty prediction set")
    return ConfusionMatrix(
        TP=int(np.sum((predictions == 1) & (labels == 1))),
        FP=int(np.sum((predictions == 1) & (labels == 0))),
        TN=int(np.sum((predictions == 0) & (labels == 0))),
        FN=int(np.sum((predictions == 0) & (labels == 1))),
    )


def _ratio(numerator: int, denominator: int) -> float:
    return numerator / denominator if denominator else 0.0


def ratios(cm: ConfusionMatrix) -> Tuple[float, float, float, List[str]]:
    """
    (BA, Pr, Rec, undefined); a ratio with a zero denominator is 0 and its
    name is listed in undefined
    """
    undefined = []
    if cm.TP + cm.FP == 0:
        undefined.append("Pr")
    if cm.TP + cm.FN == 0:
        undefined.append("Rec")
    if cm.TN + cm.FP == 0:
        undefined.append("TNR")
    recall = _ratio(cm.TP, cm.TP + cm.FN)
    specificity = _ratio(cm.TN, cm.TN + cm.FP)
    precision = _ratio(cm.TP, cm.TP + cm.FP)
    return 0.5 * (recall + specificity), precision, recall, undefined


def balanced_accuracy(predictions, labels) -> float:
    return ratios(confusion_matrix(predictions, labels))[0]
