"""Classification and regression metrics.

Undefined ratios (zero denominators) evaluate to 0 and raise an
:class:`UndefinedMetricWarning`; :func:`weighted_metrics` records them in
``MetricReport.warnings`` instead so batch reports never abort.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Hashable, Sequence

import numpy as np


class UndefinedMetricWarning(UserWarning):
    pass


@dataclass
class ConfusionMatrix:
    """Counts indexed ``[true class, predicted class]`` in ``classes`` order."""

    classes: list
    counts: np.ndarray

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def index(self, cls) -> int:
        try:
            return self.classes.index(cls)
        except ValueError:
            raise ValueError(f"unknown class {cls!r}") from None

    def binary_cells(self, positive) -> dict[str, int]:
        """TP/FP/FN/TN with ``positive`` as the positive class."""
        p = self.index(positive)
        tp = int(self.counts[p, p])
        fp = int(self.counts[:, p].sum()) - tp
        fn = int(self.counts[p, :].sum()) - tp
        return {"TP": tp, "FP": fp, "FN": fn, "TN": self.total - tp - fp - fn}


@dataclass
class MetricReport:
    classes: list
    accuracy: float
    precision: dict
    recall: dict
    f1: dict
    support: dict
    weighted_precision: float
    weighted_recall: float
    weighted_f1: float
    confusion: ConfusionMatrix | None = None
    warnings: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        out = {
            "classes": [str(c) for c in self.classes],
            "accuracy": self.accuracy,
            "weighted_precision": self.weighted_precision,
            "weighted_recall": self.weighted_recall,
            "weighted_f1": self.weighted_f1,
        }
        for c in self.classes:
            out[f"precision_{c}"] = self.precision[c]
            out[f"recall_{c}"] = self.recall[c]
            out[f"f1_{c}"] = self.f1[c]
            out[f"support_{c}"] = self.support[c]
        if self.confusion is not None:
            out["confusion_matrix"] = [int(v) for v in self.confusion.counts.ravel()]
        out["warnings"] = list(self.warnings)
        return out


def confusion_matrix(y_true: Sequence[Hashable], y_pred: Sequence[Hashable], classes: Sequence[Hashable]) -> ConfusionMatrix:
    if len(y_true) != len(y_pred):
        raise ValueError(f"length mismatch: {len(y_true)} true vs {len(y_pred)} predicted labels")
    classes = list(classes)
    pos = {c: i for i, c in enumerate(classes)}
    counts = np.zeros((len(classes), len(classes)), dtype=np.int64)
    for t, p in zip(y_true, y_pred):
        if t not in pos or p not in pos:
            raise ValueError(f"label outside class order: {t if t not in pos else p!r}")
        counts[pos[t], pos[p]] += 1
    return ConfusionMatrix(classes, counts)


def _ratio(num: float, den: float, what: str, flags: list[str] | None) -> float:
    if den == 0:
        msg = f"{what} is undefined (zero denominator); reported as 0"
        if flags is None:
            warnings.warn(msg, UndefinedMetricWarning, stacklevel=3)
        else:
            flags.append(msg)
        return 0.0
    return num / den


def accuracy(cm: ConfusionMatrix, _flags: list[str] | None = None) -> float:
    return _ratio(float(np.trace(cm.counts)), float(cm.total), "accuracy", _flags)


def precision(cm: ConfusionMatrix, cls, _flags: list[str] | None = None) -> float:
    i = cm.index(cls)
    tp = cm.counts[i, i]
    return _ratio(float(tp), float(cm.counts[:, i].sum()), f"precision[{cls}]", _flags)


def recall(cm: ConfusionMatrix, cls, _flags: list[str] | None = None) -> float:
    i = cm.index(cls)
    tp = cm.counts[i, i]
    return _ratio(float(tp), float(cm.counts[i, :].sum()), f"recall[{cls}]", _flags)


def f1(cm: ConfusionMatrix, cls, _flags: list[str] | None = None) -> float:
    """``2TP / (2TP + FP + FN)``."""
    i = cm.index(cls)
    tp = cm.counts[i, i]
    fp = cm.counts[:, i].sum() - tp
    fn = cm.counts[i, :].sum() - tp
    return _ratio(float(2 * tp), float(2 * tp + fp + fn), f"f1[{cls}]", _flags)


def weighted_metrics(cm: ConfusionMatrix) -> MetricReport:
    flags: list[str] = []
    support = {c: int(cm.counts[i, :].sum()) for i, c in enumerate(cm.classes)}
    prec = {c: precision(cm, c, flags) for c in cm.classes}
    rec = {c: recall(cm, c, flags) for c in cm.classes}
    f1s = {c: f1(cm, c, flags) for c in cm.classes}
    total = sum(support.values())

    def weighted(per_class: dict) -> float:
        return _ratio(sum(support[c] * per_class[c] for c in cm.classes), float(total), "weighted average", flags)

    return MetricReport(
        classes=list(cm.classes),
        accuracy=accuracy(cm, flags),
        precision=prec,
        recall=rec,
        f1=f1s,
        support=support,
        weighted_precision=weighted(prec),
        weighted_recall=weighted(rec),
        weighted_f1=weighted(f1s),
        confusion=cm,
        warnings=list(dict.fromkeys(flags)),
    )


def classification_report(y_true, y_pred, classes=None) -> MetricReport:
    if classes is None:
        classes = sorted(set(y_true) | set(y_pred))
    return weighted_metrics(confusion_matrix(list(y_true), list(y_pred), classes))


def mse(targets, predictions) -> float:
    t = np.asarray(targets, dtype=float)
    p = np.asarray(predictions, dtype=float)
    if t.shape != p.shape:
        raise ValueError("targets and predictions differ in shape")
    if t.size == 0:
        raise ValueError("mse of an empty sample")
    return float(np.mean((t - p) ** 2))


def r_squared(targets, predictions) -> float:
    """``1 - SS_res / SS_tot`` about the mean of ``targets``; 0 for constant targets."""
    t = np.asarray(targets, dtype=float)
    p = np.asarray(predictions, dtype=float)
    if t.shape != p.shape:
        raise ValueError("targets and predictions differ in shape")
    if t.size == 0:
        raise ValueError("r_squared of an empty sample")
    ss_tot = float(np.sum((t - t.mean()) ** 2))
    ss_res = float(np.sum((t - p) ** 2))
    if ss_tot == 0:
        warnings.warn("r_squared undefined for constant targets; reported as 0", UndefinedMetricWarning, stacklevel=2)
        return 0.0
    return 1.0 - ss_res / ss_tot


def cohens_kappa(labels_a: Sequence[Hashable], labels_b: Sequence[Hashable]) -> float:
    if len(labels_a) != len(labels_b):
        raise ValueError("label vectors differ in length")
    n = len(labels_a)
    if n == 0:
        warnings.warn("kappa of empty label vectors; reported as 0", UndefinedMetricWarning, stacklevel=2)
        return 0.0
    classes = sorted(set(labels_a) | set(labels_b), key=repr)
    p_o = sum(a == b for a, b in zip(labels_a, labels_b)) / n
    count_a = {c: 0 for c in classes}
    count_b = {c: 0 for c in classes}
    for a, b in zip(labels_a, labels_b):
        count_a[a] += 1
        count_b[b] += 1
    p_e = sum(count_a[c] * count_b[c] for c in classes) / (n * n)
    if p_e == 1:
        if p_o == 1:
            return 1.0
        warnings.warn("kappa undefined (chance agreement 1); reported as 0", UndefinedMetricWarning, stacklevel=2)
        return 0.0
    return (p_o - p_e) / (1 - p_e)
