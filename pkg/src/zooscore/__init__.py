"""Benchmark scoring, significance testing, and model-advisor toolkit
for segmentation model zoos."""

from .ranker import PairwiseRanker, RankerModel
from .registry import (
    DatasetCard,
    EvaluationRecord,
    ModelCard,
    Registry,
    RegistrySnapshot,
    TransferPair,
    load_registry,
)
from .uscore import LeaderboardEntry, QuantileBand, UScoreBreakdown

__all__ = [
    "DatasetCard",
    "EvaluationRecord",
    "LeaderboardEntry",
    "ModelCard",
    "PairwiseRanker",
    "QuantileBand",
    "Registry",
    "RegistrySnapshot",
    "RankerModel",
    "TransferPair",
    "UScoreBreakdown",
    "load_registry",
]

__version__ = "0.1.0"
