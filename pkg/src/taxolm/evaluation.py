"""Edge-level precision/recall/F-score against gold taxonomies."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .errors import DataFormatError
from .terminology import Taxonomy


@dataclass(frozen=True)
class EdgeMetrics:
    """Percentages plus the raw counts they came from."""

    precision: float
    recall: float
    f_score: float
    n_predicted: int
    n_gold: int
    n_correct: int


def harmonic_f(precision: float, recall: float) -> float:
    if precision + recall == 0:
        return 0.0
    return 2.0 * precision * recall / (precision + recall)


def evaluate(predicted: Taxonomy, gold: Taxonomy) -> EdgeMetrics:
    """Exact directed edge match; both sides are already canonicalized."""
    if not len(gold.edges):
        raise DataFormatError("gold taxonomy has no edges")
    n_correct = len(predicted.edges & gold.edges)
    n_predicted = len(predicted.edges)
    n_gold = len(gold.edges)
    precision = 100.0 * n_correct / n_predicted if n_predicted else 0.0
    recall = 100.0 * n_correct / n_gold
    return EdgeMetrics(
        precision=precision,
        recall=recall,
        f_score=harmonic_f(precision, recall),
        n_predicted=n_predicted,
        n_gold=n_gold,
        n_correct=n_correct,
    )


def stats(taxonomy: Taxonomy) -> tuple[int, int]:
    """(vertex count, edge count)."""
    return len(taxonomy.vertices), len(taxonomy.edges)


def average_metrics(metrics: Sequence[EdgeMetrics]) -> EdgeMetrics:
    """Unweighted mean of P, R and F; counts are summed for reporting only.

    The averaged F is the mean of the per-input F values, not the harmonic
    mean of the averaged P and R (callers wanting the latter can recompute
    it with harmonic_f).
    """
    if not metrics:
        raise ValueError("need at least one metrics row")
    n = len(metrics)
    return EdgeMetrics(
        precision=sum(m.precision for m in metrics) / n,
        recall=sum(m.recall for m in metrics) / n,
        f_score=sum(m.f_score for m in metrics) / n,
        n_predicted=sum(m.n_predicted for m in metrics),
        n_gold=sum(m.n_gold for m in metrics),
        n_correct=sum(m.n_correct for m in metrics),
    )
