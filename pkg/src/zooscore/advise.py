"""Training-group assembly and constraint-filtered recommendations.

Groups one ranking group per in-domain dataset with records, relevance
min-max normalized within the group from either mean IoU or the computed
composite score. Recommendation queries assert dataset traits, apply
hard resource constraints (storage/compute caps, speed floor), and order
the survivors by predicted score with composite-score then name
tie-breaks; every entry carries its bins and score breakdown so a
recommendation can be explained.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import features, rankmetrics, uscore
from .ranker import PairwiseRanker, RankerModel, predict_model
from .registry import RegistrySnapshot
from .features import COMPUTE_ORDER, SPEED_ORDER, STORAGE_ORDER, DatasetTraits


@dataclass(frozen=True)
class RankingGroup:
    dataset: str
    traits: DatasetTraits
    items: tuple[tuple[str, float], ...]  # (model name, relevance)


@dataclass(frozen=True)
class AdvisorQuery:
    modality: str
    scale: str | None = None
    shape: str | None = None
    boundary: str | None = None
    storage: str | None = None  # cap: largest acceptable storage bin
    compute: str | None = None  # cap: largest acceptable compute bin
    speed: str | None = None  # floor: slowest acceptable speed bin
    k: int = 10
    label_kind: str = "uscore"

    def traits(self) -> DatasetTraits:
        return DatasetTraits(self.modality, self.scale, self.shape, self.boundary)


@dataclass(frozen=True)
class Recommendation:
    rank: int
    model: str
    score: float
    bins: dict[str, str]
    breakdown: uscore.UScoreBreakdown | None


@dataclass(frozen=True)
class AdviceResult:
    entries: tuple[Recommendation, ...]
    excluded: int
    binding_constraint: str | None = None


def build_groups(
    snapshot: RegistrySnapshot,
    label_kind: str = "iou",
    holdout: tuple[str, ...] = (),
    override_bands=None,
) -> tuple[list[RankingGroup], list[RankingGroup]]:
    """(training groups, holdout groups) from in-domain records.

    Target-role datasets never form training groups. Relevance comes
    from mean IoU or the computed composite score, normalized within
    each dataset.
    """
    if label_kind not in ("iou", "uscore"):
        raise ValueError(f"label kind must be iou or uscore, got {label_kind!r}")
    values: dict[str, dict[str, float]] = {}
    if label_kind == "iou":
        for record in snapshot.records_for_scope("in_domain"):
            values.setdefault(record.dataset, {})[record.model] = record.mean_iou
    else:
        scores = uscore.score_registry(snapshot, "in_domain", override_bands)
        for (model, scope_key), bd in scores.items():
            values.setdefault(scope_key, {})[model] = bd.u
    train: list[RankingGroup] = []
    held: list[RankingGroup] = []
    for dataset in sorted(values):
        card = snapshot.dataset(dataset)
        if card.role != "source":
            continue
        labels = features.relevance_labels(values[dataset])
        group = RankingGroup(
            dataset=dataset,
            traits=features.traits_from_card(card),
            items=tuple(sorted(labels.items())),
        )
        (held if dataset in holdout else train).append(group)
    return train, held


def group_matrix(snapshot: RegistrySnapshot, groups: list[RankingGroup]):
    """Stack groups into (X, y, group ids) for the estimator."""
    xs, ys, gs = [], [], []
    for group in groups:
        for model, relevance in group.items:
            xs.append(features.feature_vector(group.traits, snapshot.model(model)))
            ys.append(relevance)
            gs.append(group.dataset)
    if not xs:
        raise ValueError("no training rows; need in-domain records")
    return np.vstack(xs), np.asarray(ys), np.asarray(gs)


def train_ranker(snapshot: RegistrySnapshot, groups: list[RankingGroup], **params) -> RankerModel:
    X, y, g = group_matrix(snapshot, groups)
    estimator = PairwiseRanker(**params)
    estimator.fit(X, y, g)
    return estimator.to_model(
        feature_schema=features.FEATURE_SCHEMA,
        train_groups=[group.dataset for group in groups],
    )


def evaluate_ranker(
    snapshot: RegistrySnapshot,
    model: RankerModel,
    groups: list[RankingGroup],
    ks: tuple[int, ...] = (5, 20),
) -> dict:
    overlap = set(model.train_groups) & {g.dataset for g in groups}
    if overlap:
        raise ValueError(f"evaluation groups overlap the training groups: {sorted(overlap)}")
    per_group = []
    for group in groups:
        X = np.vstack([features.feature_vector(group.traits, snapshot.model(m)) for m, _ in group.items])
        predicted = predict_model(model, X)
        per_group.append((predicted.tolist(), [rel for _, rel in group.items]))
    return rankmetrics.evaluate_rankings(per_group, ks)


# ---------------------------------------------------------------------------
# Queries


def _within_cap(bin_name: str, cap: str, order: tuple[str, ...]) -> bool:
    return order.index(bin_name) <= order.index(cap)


def _at_least(bin_name: str, floor: str, order: tuple[str, ...]) -> bool:
    return order.index(bin_name) >= order.index(floor)


def _passes(bins: dict[str, str], query: AdvisorQuery) -> bool:
    if query.storage is not None and not _within_cap(bins["storage"], query.storage, STORAGE_ORDER):
        return False
    if query.compute is not None and not _within_cap(bins["compute"], query.compute, COMPUTE_ORDER):
        return False
    if query.speed is not None and not _at_least(bins["speed"], query.speed, SPEED_ORDER):
        return False
    return True


def _validate_query(query: AdvisorQuery) -> None:
    if query.k < 1:
        raise ValueError("k must be >= 1")
    for value, order, label in (
        (query.storage, STORAGE_ORDER, "storage"),
        (query.compute, COMPUTE_ORDER, "compute"),
        (query.speed, SPEED_ORDER, "speed"),
    ):
        if value is not None and value not in order:
            raise ValueError(f"unknown {label} constraint {value!r}; expected one of {order}")


def advise(
    snapshot: RegistrySnapshot,
    model: RankerModel,
    query: AdvisorQuery,
    breakdowns: dict[str, uscore.UScoreBreakdown] | None = None,
) -> AdviceResult:
    """Ranked recommendations under hard constraints.

    When every model is filtered out, the result names the constraint
    whose removal would re-admit candidates.
    """
    _validate_query(query)
    traits = query.traits()
    cards = list(snapshot.models)
    bins_by_model = {
        c.name: dict(zip(("storage", "compute", "speed"), features.discretize_model(c.params, c.flops, c.fps)))
        for c in cards
    }
    survivors = [c for c in cards if _passes(bins_by_model[c.name], query)]
    if not survivors:
        binding = None
        for relaxed in ("storage", "compute", "speed"):
            loosened = AdvisorQuery(
                modality=query.modality, scale=query.scale, shape=query.shape, boundary=query.boundary,
                storage=None if relaxed == "storage" else query.storage,
                compute=None if relaxed == "compute" else query.compute,
                speed=None if relaxed == "speed" else query.speed,
                k=query.k, label_kind=query.label_kind,
            )
            if any(_passes(bins_by_model[c.name], loosened) for c in cards):
                binding = relaxed
                break
        return AdviceResult(entries=(), excluded=len(cards), binding_constraint=binding)

    X = np.vstack([features.feature_vector(traits, c) for c in survivors])
    scores = predict_model(model, X)
    breakdowns = breakdowns or {}

    def sort_key(pair):
        card, score = pair
        bd = breakdowns.get(card.name)
        return (-score, -(bd.u if bd else 0.0), card.name)

    ordered = sorted(zip(survivors, scores.tolist()), key=sort_key)[: query.k]
    entries = tuple(
        Recommendation(
            rank=i + 1,
            model=card.name,
            score=score,
            bins=bins_by_model[card.name],
            breakdown=breakdowns.get(card.name),
        )
        for i, (card, score) in enumerate(ordered)
    )
    return AdviceResult(entries=entries, excluded=len(cards) - len(survivors))
