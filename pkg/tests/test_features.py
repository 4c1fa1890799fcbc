import numpy as np
import pytest

from zooscore.features import (
    FEATURE_SCHEMA,
    DatasetTraits,
    discretize_dataset,
    discretize_model,
    feature_vector,
    relevance_labels,
)
from zooscore.registry import MODALITIES, ModelCard


def test_discretize_reference_model():
    # 34.53M params / 65.52 GFLOPs / 137.05 FPS
    assert discretize_model(34.53, 65.52, 137.05) == ("Small", "Medium", "Fast")


def test_discretize_boundaries_go_up():
    assert discretize_model(10.0, 10.0, 60.0) == ("Small", "Medium", "Fast")


def test_discretize_tiny_low_slow():
    assert discretize_model(0.04, 0.06, 5.15) == ("Tiny", "Low", "Slow")


def test_discretize_large_high():
    assert discretize_model(250.0, 150.0, 12.0) == ("Large", "High", "Slow")


def test_discretize_nonpositive_errors():
    with pytest.raises(ValueError):
        discretize_model(0.0, 1.0, 1.0)
    with pytest.raises(ValueError):
        discretize_model(1.0, -2.0, 1.0)


def test_dataset_slots_small_irregular_blur():
    slots = discretize_dataset(DatasetTraits("Ultrasound", "small", "irregular", "blur"))
    assert slots[MODALITIES.index("Ultrasound")] == 1.0
    assert slots.sum() == 4.0  # one modality + three set trait slots
    assert tuple(slots[-3:]) == (1.0, 1.0, 1.0)


def test_dataset_slots_regular_clear_fundus():
    slots = discretize_dataset(DatasetTraits("Fundus", "large", "regular", "clear"))
    assert slots[MODALITIES.index("Fundus")] == 1.0
    assert tuple(slots[-3:]) == (0.0, 0.0, 0.0)


def test_unknown_modality_errors():
    with pytest.raises(ValueError, match="Thermal"):
        DatasetTraits("Thermal")


def test_feature_vector_schema_alignment():
    card = ModelCard("U-Net", "CNN", 2015, "MICCAI", False, False, 34.53, 65.52, 137.05)
    vec = feature_vector(DatasetTraits("Ultrasound", "small", "irregular", "blur"), card)
    assert vec.shape == (len(FEATURE_SCHEMA),)
    named = dict(zip(FEATURE_SCHEMA, vec))
    assert named["storage=Small"] == 1.0 and named["storage=Tiny"] == 0.0
    assert named["compute=Medium"] == 1.0
    assert named["speed=Fast"] == 1.0
    assert named["family=CNN"] == 1.0
    assert named["log_params"] == pytest.approx(np.log(34.53))
    # exactly one slot per one-hot group
    for prefix, count in (("modality=", 1), ("storage=", 1), ("compute=", 1), ("speed=", 1), ("family=", 1)):
        assert sum(v for k, v in named.items() if k.startswith(prefix)) == count


def test_relevance_labels_two_models():
    assert relevance_labels({"A": 0.6, "B": 0.8}) == {"A": 0.0, "B": 1.0}


def test_relevance_labels_degenerate():
    assert relevance_labels({"A": 0.7, "B": 0.7}) == {"A": 0.5, "B": 0.5}


def test_relevance_labels_linear():
    labels = relevance_labels({"A": 0.6, "B": 0.7, "C": 0.8})
    assert labels == {"A": 0.0, "B": pytest.approx(0.5), "C": 1.0}


def test_relevance_labels_empty():
    assert relevance_labels({}) == {}
