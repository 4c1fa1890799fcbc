"""Accuracy-efficiency composite scoring and leaderboards.

Raw metrics are normalized against 10th/90th percentile bands: accuracy
and speed linearly (higher is better), parameters and FLOPs in log space
(lower is better). An efficiency subscore is the equal-weight harmonic
mean of the three resource components, and the final score is the
harmonic mean of accuracy and efficiency, so any collapsed component
zeroes the result. Bands are recomputed from the registered zoo by
default or loaded from an override table for comparison runs.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

from .registry import EvaluationRecord, IngestError, RegistrySnapshot, canonical_scope
from .stats import SignificanceTier

BAND_METRICS = ("iou", "params", "flops", "fps")
BENEFIT_METRICS = ("iou", "fps")  # larger raw value -> larger component
GLOBAL_SCOPE_KEY = "global"

DEFAULT_WEIGHTS = (1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0)
DEFAULT_ALPHA = 0.5


@dataclass(frozen=True)
class QuantileBand:
    metric: str
    scope_key: str
    q10: float
    q90: float

    def __post_init__(self):
        if self.metric not in BAND_METRICS:
            raise IngestError(f"band metric {self.metric!r} not in {BAND_METRICS}")
        if self.q10 > self.q90:
            raise IngestError(f"band ({self.metric}, {self.scope_key}): q10 {self.q10} > q90 {self.q90}")
        if self.metric in ("params", "flops") and self.q10 <= 0:
            raise IngestError(f"band ({self.metric}, {self.scope_key}): log-normalized bands must be positive")


@dataclass(frozen=True)
class UScoreBreakdown:
    a: float
    p: float
    g: float
    s: float
    eff: float
    u: float
    weights: tuple[float, float, float] = DEFAULT_WEIGHTS
    alpha: float = DEFAULT_ALPHA


@dataclass(frozen=True)
class LeaderboardEntry:
    rank: int
    model: str
    value: float  # mean metric x100 for display
    per_dataset: dict[str, float] = field(default_factory=dict)
    tier: SignificanceTier | None = None


def quantile(values: list[float], q: float) -> float:
    """Linear-interpolation quantile at sorted position (n-1) * q."""
    if not values:
        raise ValueError("quantile of an empty list is undefined")
    if not (0.0 < q < 1.0):
        raise ValueError(f"q must lie in (0, 1), got {q}")
    return float(np.quantile(np.asarray(values, dtype=np.float64), q, method="linear"))


def _normalize_linear(value: float, band: QuantileBand) -> float:
    if band.q10 == band.q90:
        return 1.0 if value >= band.q10 else 0.0
    return min(1.0, max(0.0, (value - band.q10) / (band.q90 - band.q10)))


def _normalize_log_cost(value: float, band: QuantileBand) -> float:
    if value <= 0:
        raise ValueError(f"log-normalized metric requires a positive value, got {value}")
    if band.q10 == band.q90:
        return 1.0 if value <= band.q10 else 0.0
    return min(1.0, max(0.0, (math.log(band.q90) - math.log(value)) / (math.log(band.q90) - math.log(band.q10))))


def normalize_components(
    accuracy: float, params: float, flops: float, fps: float, bands: dict[str, QuantileBand]
) -> tuple[float, float, float, float]:
    """Clip-normalize (A, P, G, S) into [0, 1] components (a, p, g, s)."""
    missing = [m for m in BAND_METRICS if m not in bands]
    if missing:
        raise ValueError(f"missing quantile band(s) for {missing}")
    a = _normalize_linear(accuracy, bands["iou"])
    p = _normalize_log_cost(params, bands["params"])
    g = _normalize_log_cost(flops, bands["flops"])
    s = _normalize_linear(fps, bands["fps"])
    return a, p, g, s


def harmonic_mean(components: list[float], weights: list[float] | None = None) -> float:
    """Weighted harmonic mean; any zero component with positive weight -> 0."""
    if weights is None:
        weights = [1.0 / len(components)] * len(components)
    if len(weights) != len(components):
        raise ValueError("components and weights differ in length")
    if any(w < 0 for w in weights):
        raise ValueError("weights must be non-negative")
    total_w = sum(weights)
    if total_w == 0:
        raise ValueError("weights sum to zero")
    denom = 0.0
    for x, w in zip(components, weights):
        if w == 0:
            continue
        if x == 0:
            return 0.0
        denom += w / x
    return total_w / denom


def u_score(a: float, eff: float, alpha: float = DEFAULT_ALPHA) -> float:
    """Harmonic combination of accuracy and efficiency (alpha weighting)."""
    return harmonic_mean([a, eff], [alpha, 1.0 - alpha])


def breakdown(
    accuracy: float,
    params: float,
    flops: float,
    fps: float,
    bands: dict[str, QuantileBand],
    weights: tuple[float, float, float] = DEFAULT_WEIGHTS,
    alpha: float = DEFAULT_ALPHA,
) -> UScoreBreakdown:
    a, p, g, s = normalize_components(accuracy, params, flops, fps, bands)
    eff = harmonic_mean([p, g, s], list(weights))
    return UScoreBreakdown(a=a, p=p, g=g, s=s, eff=eff, u=u_score(a, eff, alpha), weights=weights, alpha=alpha)


# ---------------------------------------------------------------------------
# Band sources


def parse_bands(data: bytes | str) -> dict[tuple[str, str], QuantileBand]:
    """Read a metric,scope_key,q10,q90 override table."""
    text = data.decode("utf-8") if isinstance(data, bytes) else data
    reader = csv.DictReader(io.StringIO(text))
    required = ("metric", "scope_key", "q10", "q90")
    missing = [c for c in required if c not in (reader.fieldnames or [])]
    if missing:
        raise IngestError(f"bands: header missing column(s) {missing}")
    bands: dict[tuple[str, str], QuantileBand] = {}
    for line_no, row in enumerate(reader, start=2):
        try:
            band = QuantileBand(row["metric"], row["scope_key"], float(row["q10"]), float(row["q90"]))
        except (ValueError, IngestError) as exc:
            raise IngestError(f"bands: line {line_no}: {exc}") from exc
        key = (band.metric, band.scope_key)
        if key in bands:
            raise IngestError(f"bands: line {line_no}: duplicate band for {key}")
        bands[key] = band
    return bands


def recompute_bands(snapshot: RegistrySnapshot, scope: str) -> dict[tuple[str, str], QuantileBand]:
    """Zoo-derived bands: efficiency metrics over the global model
    population, accuracy per dataset (per source->target pair for
    zero-shot records)."""
    scope = canonical_scope(scope)
    bands: dict[tuple[str, str], QuantileBand] = {}
    for metric, values in (
        ("params", [c.params for c in snapshot.models]),
        ("flops", [c.flops for c in snapshot.models]),
        ("fps", [c.fps for c in snapshot.models]),
    ):
        if values:
            bands[(metric, GLOBAL_SCOPE_KEY)] = QuantileBand(
                metric, GLOBAL_SCOPE_KEY, quantile(values, 0.1), quantile(values, 0.9)
            )
    by_key: dict[str, list[float]] = {}
    for record in snapshot.records:
        if record.scope == scope:
            by_key.setdefault(record.scope_key, []).append(record.mean_iou)
    for scope_key, values in by_key.items():
        bands[("iou", scope_key)] = QuantileBand("iou", scope_key, quantile(values, 0.1), quantile(values, 0.9))
    return bands


def _bands_for_record(
    record: EvaluationRecord, bands: dict[tuple[str, str], QuantileBand]
) -> dict[str, QuantileBand]:
    out: dict[str, QuantileBand] = {}
    iou_band = bands.get(("iou", record.scope_key)) or bands.get(("iou", record.dataset))
    if iou_band is None:
        raise IngestError(f"no accuracy band for scope key {record.scope_key!r}")
    out["iou"] = iou_band
    for metric in ("params", "flops", "fps"):
        band = bands.get((metric, GLOBAL_SCOPE_KEY))
        if band is None:
            raise IngestError(f"no global band for metric {metric!r}")
        out[metric] = band
    return out


def score_registry(
    snapshot: RegistrySnapshot,
    scope: str,
    override_bands: dict[tuple[str, str], QuantileBand] | None = None,
    weights: tuple[float, float, float] = DEFAULT_WEIGHTS,
    alpha: float = DEFAULT_ALPHA,
) -> dict[tuple[str, str], UScoreBreakdown]:
    """One breakdown per record in scope, keyed (model, scope_key)."""
    scope = canonical_scope(scope)
    bands = override_bands if override_bands is not None else recompute_bands(snapshot, scope)
    scores: dict[tuple[str, str], UScoreBreakdown] = {}
    for record in snapshot.records:
        if record.scope != scope:
            continue
        card = snapshot.model(record.model)
        scores[(record.model, record.scope_key)] = breakdown(
            record.mean_iou, card.params, card.flops, card.fps,
            _bands_for_record(record, bands), weights, alpha,
        )
    return scores


# ---------------------------------------------------------------------------
# Leaderboards


def build_leaderboard(
    values: dict[str, dict[str, float]],
    tiers: dict[str, SignificanceTier] | None = None,
) -> list[LeaderboardEntry]:
    """Rank models by the macro-average of their per-dataset values.

    `values` maps model -> {dataset_key -> value in [0, 1]}; a mean-only
    table uses a single key per model. Display values are x100. Ties
    break by model name ascending.
    """
    if not values:
        return []
    rows = []
    for model, per_dataset in values.items():
        if not per_dataset:
            continue
        mean = sum(per_dataset.values()) / len(per_dataset)
        rows.append((model, mean, per_dataset))
    rows.sort(key=lambda r: (-r[1], r[0]))
    entries = []
    for rank, (model, mean, per_dataset) in enumerate(rows, start=1):
        entries.append(
            LeaderboardEntry(
                rank=rank,
                model=model,
                value=round(mean * 100.0, 10),
                per_dataset={k: round(v * 100.0, 10) for k, v in sorted(per_dataset.items())},
                tier=(tiers or {}).get(model),
            )
        )
    return entries


def leaderboard_from_records(
    snapshot: RegistrySnapshot,
    scope: str,
    metric: str,
    override_bands: dict[tuple[str, str], QuantileBand] | None = None,
    tiers: dict[str, SignificanceTier] | None = None,
) -> list[LeaderboardEntry]:
    scope = canonical_scope(scope)
    values: dict[str, dict[str, float]] = {}
    if metric == "iou":
        for record in snapshot.records:
            if record.scope == scope:
                values.setdefault(record.model, {})[record.scope_key] = record.mean_iou
    elif metric == "uscore":
        for (model, scope_key), bd in score_registry(snapshot, scope, override_bands).items():
            values.setdefault(model, {})[scope_key] = bd.u
    else:
        raise ValueError(f"unknown leaderboard metric {metric!r}; expected iou or uscore")
    return build_leaderboard(values, tiers)


def parse_value_table(data: bytes | str) -> dict[str, dict[str, float]]:
    """Read a published-value table: model,value (display scale, x100)."""
    text = data.decode("utf-8") if isinstance(data, bytes) else data
    reader = csv.DictReader(io.StringIO(text))
    header = reader.fieldnames or []
    if "model" not in header or "value" not in header:
        raise IngestError(f"value table: header must contain model,value; got {header}")
    values: dict[str, dict[str, float]] = {}
    for line_no, row in enumerate(reader, start=2):
        model = row["model"]
        if model in values:
            raise IngestError(f"value table: line {line_no}: duplicate model {model!r}")
        values[model] = {"mean": float(row["value"]) / 100.0}
    return values


def per_year_max(entries: list[LeaderboardEntry], years: dict[str, int]) -> list[tuple[int, str, float]]:
    """Best entry per publication year, the feed for external trend plots."""
    best: dict[int, LeaderboardEntry] = {}
    for entry in entries:
        year = years.get(entry.model)
        if year is None:
            raise IngestError(f"model {entry.model!r} has no publication year")
        current = best.get(year)
        if current is None or (entry.value, current.model) > (current.value, entry.model):
            best[year] = entry
    return [(year, e.model, e.value) for year, e in sorted(best.items())]


def family_aggregate(
    entries: list[LeaderboardEntry], families: dict[str, str]
) -> dict[str, float]:
    """Unweighted per-family mean per dataset, then macro-average.

    Entries without per-dataset columns contribute their mean value.
    """
    per_family_dataset: dict[str, dict[str, list[float]]] = {}
    for entry in entries:
        family = families.get(entry.model)
        if family is None:
            raise IngestError(f"model {entry.model!r} has no family assignment")
        columns = entry.per_dataset or {"mean": entry.value}
        slot = per_family_dataset.setdefault(family, {})
        for dataset, value in columns.items():
            slot.setdefault(dataset, []).append(value)
    out: dict[str, float] = {}
    for family, datasets in sorted(per_family_dataset.items()):
        means = [sum(vals) / len(vals) for _, vals in sorted(datasets.items())]
        out[family] = sum(means) / len(means)
    return out
