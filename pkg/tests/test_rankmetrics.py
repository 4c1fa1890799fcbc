import math

import numpy as np
import pytest

from zooscore.rankmetrics import (
    average_precision,
    binarize_relevance,
    dcg_at_k,
    evaluate_rankings,
    mean_average_precision,
    ndcg_at_k,
    rankdata,
    spearman,
    spearman_from_scores,
)


def test_ndcg_ideal_order():
    assert ndcg_at_k([3, 2, 1], 3) == 1.0


def test_ndcg_hand_example():
    # presented [1, 3, 2]: DCG = 1 + 3/log2(3) + 2/2, IDCG over [3, 2, 1]
    value = ndcg_at_k([1, 3, 2], 3)
    dcg = 1 / math.log2(2) + 3 / math.log2(3) + 2 / math.log2(4)
    idcg = 3 / math.log2(2) + 2 / math.log2(3) + 1 / math.log2(4)
    assert value == pytest.approx(dcg / idcg, abs=1e-12)
    assert value == pytest.approx(0.8175, abs=1e-4)


def test_ndcg_all_zero_relevance():
    assert ndcg_at_k([0, 0, 0], 3) == 0.0


def test_ndcg_bounds_fuzz():
    rng = np.random.default_rng(4)
    for _ in range(300):
        rels = rng.integers(0, 5, size=rng.integers(1, 12)).astype(float).tolist()
        k = int(rng.integers(1, 15))
        v = ndcg_at_k(rels, k)
        assert 0.0 <= v <= 1.0 + 1e-12


def test_ndcg_equal_relevance_below_k_permutation_invariant():
    rng = np.random.default_rng(5)
    base = [3.0, 2.0, 1.0, 1.0, 1.0, 1.0]
    k = 2
    reference = ndcg_at_k(base, k)
    for _ in range(20):
        tail = base[k:]
        rng.shuffle(tail)
        assert ndcg_at_k(base[:k] + tail, k) == reference


def test_ndcg_negative_relevance_errors():
    with pytest.raises(ValueError):
        ndcg_at_k([1, -1], 2)


def test_average_precision_hand_example():
    # relevant at ranks 1 and 3 of 4
    assert average_precision([True, False, True, False]) == pytest.approx((1 + 2 / 3) / 2, abs=1e-12)
    assert average_precision([True, False, True, False]) == pytest.approx(0.8333, abs=1e-4)


def test_average_precision_all_relevant():
    assert average_precision([True] * 5) == 1.0


def test_average_precision_none_relevant():
    assert average_precision([False] * 4) == 0.0


def test_map_over_groups():
    groups = [[True, False, True, False], [True, True]]
    assert mean_average_precision(groups) == pytest.approx((0.8333333 + 1.0) / 2, abs=1e-6)


def test_binarize_threshold():
    assert binarize_relevance([0.8, 0.74, 0.75]) == [True, False, True]


def test_spearman_identown():
    assert spearman([1, 2, 3, 4], [1, 2, 3, 4]) == 1.0


def test_spearman_reversed():
    assert spearman([1, 2, 3, 4, 5], [5, 4, 3, 2, 1]) == -1.0


def test_spearman_hand_example():
    assert spearman([1, 2, 3, 4, 5], [2, 1, 4, 3, 5]) == pytest.approx(0.8)


def test_spearman_short_input_errors():
    with pytest.raises(ValueError):
        spearman([1], [1])


def test_spearman_bounds_fuzz():
    rng = np.random.default_rng(6)
    for _ in range(300):
        n = int(rng.integers(2, 12))
        x = rng.permutation(n) + 1.0
        y = rng.permutation(n) + 1.0
        assert -1.0 - 1e-12 <= spearman(x.tolist(), y.tolist()) <= 1.0 + 1e-12


def test_rankdata_midranks_ties():
    assert rankdata([0.9, 0.5, 0.5, 0.1]) == [1.0, 2.5, 2.5, 4.0]


def test_spearman_from_scores_with_ties():
    rho = spearman_from_scores([0.9, 0.5, 0.5, 0.1], [0.9, 0.5, 0.5, 0.1])
    assert rho == pytest.approx(1.0)


def test_evaluate_perfect_predictor():
    truth = [3.0, 2.0, 1.0, 0.0]
    result = evaluate_rankings([(truth, truth)], ks=(2, 4), map_threshold=0.5)
    assert result["ndcg_at"][2] == 1.0 and result["ndcg_at"][4] == 1.0
    assert result["spearman"] == 1.0


def test_evaluate_requires_groups():
    with pytest.raises(ValueError):
        evaluate_rankings([])
