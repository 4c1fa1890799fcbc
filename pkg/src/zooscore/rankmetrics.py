"""Ranking-quality metrics: NDCG@k, MAP, Spearman rank correlation.

NDCG uses linear gain rel_i / log2(i + 1) with the ideal ordering over
the same relevance multiset (0 when the ideal DCG is 0). MAP binarizes
continuous relevance at a configurable threshold. Spearman applies
mid-ranks to ties and then the closed form 1 - 6 * sum(d^2) / (n(n^2-1)).
"""

from __future__ import annotations

import math

import numpy as np

MAP_RELEVANCE_THRESHOLD = 0.75  # top quartile of the normalized range


def dcg_at_k(relevances: list[float], k: int) -> float:
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    return sum(rel / math.log2(i + 2) for i, rel in enumerate(relevances[:k]))


def ndcg_at_k(relevances: list[float], k: int) -> float:
    """NDCG of the presented order; relevances must be non-negative."""
    if any(r < 0 for r in relevances):
        raise ValueError("relevances must be non-negative")
    ideal = dcg_at_k(sorted(relevances, reverse=True), k)
    if ideal == 0:
        return 0.0
    return dcg_at_k(relevances, k) / ideal


def average_precision(relevant_flags: list[bool]) -> float:
    """AP of one ranked list; 0 by convention when nothing is relevant."""
    total_relevant = sum(relevant_flags)
    if total_relevant == 0:
        return 0.0
    hits = 0
    precision_sum = 0.0
    for position, flag in enumerate(relevant_flags, start=1):
        if flag:
            hits += 1
            precision_sum += hits / position
    return precision_sum / total_relevant


def mean_average_precision(groups: list[list[bool]]) -> float:
    if not groups:
        raise ValueError("MAP requires at least one group")
    return sum(average_precision(g) for g in groups) / len(groups)


def binarize_relevance(relevances: list[float], threshold: float = MAP_RELEVANCE_THRESHOLD) -> list[bool]:
    return [r >= threshold for r in relevances]


def rankdata(values: list[float]) -> list[float]:
    """1-based ranks, descending by value, ties mid-ranked."""
    order = sorted(range(len(values)), key=lambda i: (-values[i], i))
    ranks = [0.0] * len(values)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and values[order[j + 1]] == values[order[i]]:
            j += 1
        mid = (i + j) / 2.0 + 1.0
        for t in range(i, j + 1):
            ranks[order[t]] = mid
        i = j + 1
    return ranks


def spearman(x_ranks: list[float], y_ranks: list[float]) -> float:
    """Closed-form rank correlation over pre-ranked inputs."""
    n = len(x_ranks)
    if n != len(y_ranks):
        raise ValueError("rank vectors differ in length")
    if n < 2:
        raise ValueError("Spearman correlation needs at least 2 observations")
    d_sq = sum((x - y) ** 2 for x, y in zip(x_ranks, y_ranks))
    return 1.0 - 6.0 * d_sq / (n * (n * n - 1))


def spearman_from_scores(predicted: list[float], truth: list[float]) -> float:
    return spearman(rankdata(predicted), rankdata(truth))


def evaluate_rankings(
    per_group: list[tuple[list[float], list[float]]],
    ks: tuple[int, ...] = (5, 20),
    map_threshold: float = MAP_RELEVANCE_THRESHOLD,
) -> dict:
    """Aggregate metrics over (predicted scores, true relevances) groups.

    Returns mean NDCG@k per k, MAP over threshold-binarized relevance,
    and the mean per-group Spearman between predicted and true orderings.
    """
    if not per_group:
        raise ValueError("evaluation requires at least one group")
    ndcg: dict[int, list[float]] = {k: [] for k in ks}
    ap_groups: list[list[bool]] = []
    rhos: list[float] = []
    for predicted, truth in per_group:
        order = sorted(range(len(predicted)), key=lambda i: (-predicted[i], i))
        presented = [truth[i] for i in order]
        for k in ks:
            ndcg[k].append(ndcg_at_k(presented, k))
        ap_groups.append(binarize_relevance(presented, map_threshold))
        rhos.append(spearman_from_scores(predicted, truth))
    return {
        "ndcg_at": {k: float(np.mean(v)) for k, v in ndcg.items()},
        "map": mean_average_precision(ap_groups),
        "spearman": float(np.mean(rhos)),
    }
