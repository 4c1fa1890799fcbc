"""Synthetic zoo with a planted monotone utility, shared by the advisor
tests and the acceptance suite.

Utility is +1 for a Fast model, +1 for Tiny storage, -1 for High compute;
relevance is the within-group min-max normalization of utility. Any
competent ranker over the bin features must recover the ordering on
held-out groups, while shuffled labels must yield no held-out signal.
"""

from __future__ import annotations

import numpy as np

from zooscore.features import DatasetTraits, discretize_model, feature_vector, relevance_labels
from zooscore.ranker import PairwiseRanker
from zooscore.registry import MODALITIES, ModelCard

N_MODELS = 20
N_GROUPS = 10


def build_zoo(seed: int = 123) -> list[ModelCard]:
    rng = np.random.default_rng(seed)
    cards = []
    for i in range(N_MODELS):
        params = float(np.exp(rng.uniform(np.log(0.03), np.log(400.0))))
        flops = float(np.exp(rng.uniform(np.log(0.05), np.log(300.0))))
        fps = float(rng.uniform(1.0, 300.0))
        cards.append(ModelCard(f"syn{i:02d}", "CNN", 2020, "none", False, False, params, flops, fps))
    return cards


def utility(card: ModelCard) -> float:
    """Monotone in the (speed, storage, compute) bins.

    Raw-metric refinements (three orders of magnitude below the bin
    steps) keep the within-bin ordering aligned with the bins while
    making relevance tie-free; tied relevance would bias the closed-form
    Spearman against any strict ranking and poison the shuffled-label
    null.
    """
    storage, compute, speed = discretize_model(card.params, card.flops, card.fps)
    bins_part = (
        (1.0 if speed == "Fast" else 0.0)
        + (1.0 if storage == "Tiny" else 0.0)
        - (1.0 if compute == "High" else 0.0)
    )
    refinement = 1e-3 * (card.fps / 300.0 - np.log(card.params * card.flops) / 20.0)
    return bins_part + refinement


def build_traits(seed: int = 123) -> list[DatasetTraits]:
    rng = np.random.default_rng(seed + 1)
    traits = []
    for _ in range(N_GROUPS):
        traits.append(
            DatasetTraits(
                modality=MODALITIES[int(rng.integers(len(MODALITIES)))],
                scale=("small", "large")[int(rng.integers(2))],
                shape=("irregular", "regular")[int(rng.integers(2))],
                boundary=("clear", "blur")[int(rng.integers(2))],
            )
        )
    return traits


def group_data(cards, traits_list, shuffle_seed: int | None = None):
    """(X, y, group ids, per-group truth) with optional label shuffling."""
    rng = np.random.default_rng(shuffle_seed) if shuffle_seed is not None else None
    labels = relevance_labels({c.name: utility(c) for c in cards})
    xs, ys, gs, truths = [], [], [], []
    for gi, traits in enumerate(traits_list):
        rels = np.array([labels[c.name] for c in cards])
        if rng is not None:
            rels = rng.permutation(rels)
        truths.append(rels.tolist())
        for card, rel in zip(cards, rels):
            xs.append(feature_vector(traits, card))
            ys.append(rel)
            gs.append(f"g{gi}")
    return np.vstack(xs), np.asarray(ys), np.asarray(gs), truths


def run_experiment(train_groups: int = 8, rounds: int = 60, shuffle_seed: int | None = None, seed: int = 123):
    """Train on the first `train_groups`, return held-out (pred, truth) pairs."""
    cards = build_zoo(seed)
    traits_list = build_traits(seed)
    X, y, g, truths = group_data(cards, traits_list, shuffle_seed)
    per_group = N_MODELS
    train_rows = train_groups * per_group
    est = PairwiseRanker(rounds=rounds, max_depth=3, min_leaf=2)
    est.fit(X[:train_rows], y[:train_rows], g[:train_rows])
    held = []
    for gi in range(train_groups, N_GROUPS):
        rows = slice(gi * per_group, (gi + 1) * per_group)
        held.append((est.predict(X[rows]).tolist(), truths[gi]))
    return held
