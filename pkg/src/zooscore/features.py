"""Feature space for the model advisor.

Model resources are discretized into named bins (storage by parameter
count, compute by FLOPs, speed by FPS, all half-open [lo, hi) intervals)
and combined with dataset descriptors (modality one-hot plus the three
binary foreground traits) and raw numerics into a fixed feature vector.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .registry import FAMILIES, MODALITIES, DatasetCard, ModelCard

STORAGE_BINS = (("Tiny", 0.0, 10.0), ("Small", 10.0, 50.0), ("Medium", 50.0, 200.0), ("Large", 200.0, math.inf))
COMPUTE_BINS = (("Low", 0.0, 10.0), ("Medium", 10.0, 100.0), ("High", 100.0, math.inf))
SPEED_BINS = (("Slow", 0.0, 15.0), ("Medium", 15.0, 60.0), ("Fast", 60.0, math.inf))

STORAGE_ORDER = tuple(name for name, _, _ in STORAGE_BINS)
COMPUTE_ORDER = tuple(name for name, _, _ in COMPUTE_BINS)
SPEED_ORDER = tuple(name for name, _, _ in SPEED_BINS)


def _bin_of(value: float, bins, what: str) -> str:
    if not (value > 0):
        raise ValueError(f"{what} must be positive, got {value!r}")
    for name, lo, hi in bins:
        if lo <= value < hi:
            return name
    raise AssertionError("half-open bins cover (0, inf)")  # pragma: no cover


def discretize_model(params: float, flops: float, fps: float) -> tuple[str, str, str]:
    """(storage, compute, speed) bins; boundaries land in the upper bin."""
    return (
        _bin_of(params, STORAGE_BINS, "params"),
        _bin_of(flops, COMPUTE_BINS, "flops"),
        _bin_of(fps, SPEED_BINS, "fps"),
    )


@dataclass(frozen=True)
class DatasetTraits:
    modality: str
    scale: str | None = None  # small / large
    shape: str | None = None  # irregular / regular
    boundary: str | None = None  # clear / blur

    def __post_init__(self):
        if self.modality not in MODALITIES:
            raise ValueError(f"unknown modality {self.modality!r}; expected one of {MODALITIES}")


def traits_from_card(card: DatasetCard) -> DatasetTraits:
    return DatasetTraits(
        modality=card.modality,
        scale=card.scale_label,
        shape=card.shape_label,
        boundary=card.boundary_label,
    )


def feature_schema() -> list[str]:
    """Ordered feature names; split indices in rankers refer to this."""
    names = [f"modality={m}" for m in MODALITIES]
    names += ["scale=small", "shape=irregular", "boundary=blur"]
    names += [f"storage={b}" for b in STORAGE_ORDER]
    names += [f"compute={b}" for b in COMPUTE_ORDER]
    names += [f"speed={b}" for b in SPEED_ORDER]
    names += [f"family={f}" for f in FAMILIES]
    names += ["log_params", "log_flops", "fps"]
    return names


FEATURE_SCHEMA = feature_schema()


def discretize_dataset(traits: DatasetTraits) -> np.ndarray:
    """Dataset slots: modality one-hot plus three binary trait slots.

    Unknown traits stay zero, matching the "no assertion" query state.
    """
    slots = np.zeros(len(MODALITIES) + 3, dtype=np.float64)
    slots[MODALITIES.index(traits.modality)] = 1.0
    if traits.scale is not None:
        slots[len(MODALITIES)] = 1.0 if traits.scale == "small" else 0.0
    if traits.shape is not None:
        slots[len(MODALITIES) + 1] = 1.0 if traits.shape == "irregular" else 0.0
    if traits.boundary is not None:
        slots[len(MODALITIES) + 2] = 1.0 if traits.boundary == "blur" else 0.0
    return slots


def model_slots(card: ModelCard) -> np.ndarray:
    storage, compute, speed = discretize_model(card.params, card.flops, card.fps)
    slots = np.zeros(len(STORAGE_ORDER) + len(COMPUTE_ORDER) + len(SPEED_ORDER) + len(FAMILIES) + 3)
    slots[STORAGE_ORDER.index(storage)] = 1.0
    offset = len(STORAGE_ORDER)
    slots[offset + COMPUTE_ORDER.index(compute)] = 1.0
    offset += len(COMPUTE_ORDER)
    slots[offset + SPEED_ORDER.index(speed)] = 1.0
    offset += len(SPEED_ORDER)
    slots[offset + FAMILIES.index(card.family)] = 1.0
    offset += len(FAMILIES)
    slots[offset] = math.log(card.params)
    slots[offset + 1] = math.log(card.flops)
    slots[offset + 2] = card.fps
    return slots


def feature_vector(traits: DatasetTraits, card: ModelCard) -> np.ndarray:
    vector = np.concatenate([discretize_dataset(traits), model_slots(card)])
    assert vector.shape[0] == len(FEATURE_SCHEMA)
    return vector


def relevance_labels(values: dict[str, float]) -> dict[str, float]:
    """Min-max normalize within a group; a constant group maps to 0.5."""
    if not values:
        return {}
    lo, hi = min(values.values()), max(values.values())
    if hi == lo:
        return {name: 0.5 for name in values}
    return {name: (v - lo) / (hi - lo) for name, v in values.items()}
