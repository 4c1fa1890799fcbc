"""Canonical data model for a benchmark registry.

A registry holds model cards (architecture metadata plus resource
metrics), dataset cards, per-(model, dataset, scope) evaluation records,
and the source -> target transfer map used for zero-shot evaluation.
Ingestion validates referential integrity; `snapshot()` freezes the
registry into an immutable, canonically serialized form with a content
digest that downstream modules key their outputs on.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
from dataclasses import dataclass, field, replace
from pathlib import Path

FAMILIES = ("CNN", "Transformer", "Mamba", "RWKV", "Hybrid")
MODALITIES = (
    "Ultrasound",
    "Dermoscopy",
    "Endoscopy",
    "Fundus",
    "Histopathology",
    "Nuclear",
    "X-Ray",
    "MRI",
    "CT",
    "OCT",
)
SCOPES = ("in_domain", "zero_shot")

TRAIT_SCALE = ("small", "large")
TRAIT_SHAPE = ("irregular", "regular")
TRAIT_BOUNDARY = ("clear", "blur")

MEAN_TOLERANCE = 1e-6


class IngestError(ValueError):
    """Malformed or inconsistent input; message carries file/row context."""


class UnknownNameError(IngestError):
    """A record or pair references a name that is not registered."""


class DuplicateNameError(IngestError):
    """An entity name collides with one already registered."""


def canonical_scope(value: str) -> str:
    """Map CLI spellings (source/target) onto record scopes."""
    key = value.strip().lower().replace("-", "_")
    if key in ("in_domain", "source", "indomain"):
        return "in_domain"
    if key in ("zero_shot", "target", "zeroshot"):
        return "zero_shot"
    raise IngestError(f"unknown scope {value!r}; expected source/in_domain or target/zero_shot")


@dataclass(frozen=True)
class ModelCard:
    name: str
    family: str
    year: int
    venue: str
    deep_supervision: bool
    pretrained: bool
    params: float  # millions of parameters
    flops: float  # GFLOPs at reference input
    fps: float  # frames per second

    def __post_init__(self):
        if not self.name:
            raise IngestError("model card requires a non-empty name")
        if self.family not in FAMILIES:
            raise IngestError(f"model {self.name!r}: family {self.family!r} not in {FAMILIES}")
        for label, value in (("params", self.params), ("flops", self.flops), ("fps", self.fps)):
            if not (value > 0) or not math.isfinite(value):
                raise IngestError(f"model {self.name!r}: {label} must be a positive finite number, got {value!r}")


@dataclass(frozen=True)
class DatasetCard:
    name: str
    modality: str
    role: str  # "source" or "target"
    class_count: int = 1
    # Foreground traits may be asserted on the card when no mask profile
    # is available; the advisor falls back to neutral slots otherwise.
    scale_label: str | None = None
    shape_label: str | None = None
    boundary_label: str | None = None

    def __post_init__(self):
        if not self.name:
            raise IngestError("dataset card requires a non-empty name")
        if self.modality not in MODALITIES:
            raise IngestError(f"dataset {self.name!r}: modality {self.modality!r} not in {MODALITIES}")
        if self.role not in ("source", "target"):
            raise IngestError(f"dataset {self.name!r}: role must be source or target, got {self.role!r}")
        if self.class_count < 1:
            raise IngestError(f"dataset {self.name!r}: class_count must be >= 1")
        for label, value, allowed in (
            ("scale_label", self.scale_label, TRAIT_SCALE),
            ("shape_label", self.shape_label, TRAIT_SHAPE),
            ("boundary_label", self.boundary_label, TRAIT_BOUNDARY),
        ):
            if value is not None and value not in allowed:
                raise IngestError(f"dataset {self.name!r}: {label} must be one of {allowed}, got {value!r}")


@dataclass(frozen=True)
class EvaluationRecord:
    """One model evaluated on one dataset under one scope.

    `sample_ious` may be empty for mean-only records (significance is
    then reported as unavailable). Zero-shot records carry the source
    dataset they were trained on, since one target can receive transfers
    from several sources.
    """

    model: str
    dataset: str
    scope: str
    sample_ious: tuple[float, ...] = ()
    mean_iou: float = 0.0
    source: str | None = None

    def __post_init__(self):
        if self.scope not in SCOPES:
            raise IngestError(f"record ({self.model}, {self.dataset}): scope {self.scope!r} not in {SCOPES}")
        for i, v in enumerate(self.sample_ious):
            if not (0.0 <= v <= 1.0):
                raise IngestError(
                    f"record ({self.model}, {self.dataset}): sample {i} IoU {v!r} outside [0, 1]"
                )
        if not (0.0 <= self.mean_iou <= 1.0):
            raise IngestError(
                f"record ({self.model}, {self.dataset}): mean IoU {self.mean_iou!r} outside [0, 1]"
            )
        if self.sample_ious:
            mean = sum(self.sample_ious) / len(self.sample_ious)
            if abs(mean - self.mean_iou) > 1e-9:
                raise IngestError(
                    f"record ({self.model}, {self.dataset}): mean_iou {self.mean_iou} "
                    f"does not match sample mean {mean}"
                )
        if self.scope == "in_domain" and self.source is not None:
            raise IngestError(f"record ({self.model}, {self.dataset}): in-domain records take no source")

    @property
    def key(self) -> tuple[str, str, str, str]:
        return (self.model, self.dataset, self.scope, self.source or "")

    @property
    def scope_key(self) -> str:
        """Band lookup key: dataset name in-domain, source->target zero-shot."""
        if self.scope == "zero_shot" and self.source:
            return f"{self.source}->{self.dataset}"
        return self.dataset


@dataclass(frozen=True)
class TransferPair:
    source: str
    target: str

    def __post_init__(self):
        if self.source == self.target:
            raise IngestError(f"transfer pair {self.source!r} -> {self.target!r}: source equals target")


class Registry:
    """Mutable builder; every add validates, failures leave it unchanged."""

    def __init__(self):
        self.models: dict[str, ModelCard] = {}
        self.datasets: dict[str, DatasetCard] = {}
        self.records: dict[tuple, EvaluationRecord] = {}
        self.transfers: list[TransferPair] = []

    def add_model(self, card: ModelCard) -> None:
        if card.name in self.models:
            raise DuplicateNameError(f"duplicate model name {card.name!r}")
        self.models[card.name] = card

    def add_dataset(self, card: DatasetCard) -> None:
        if card.name in self.datasets:
            raise DuplicateNameError(f"duplicate dataset name {card.name!r}")
        self.datasets[card.name] = card

    def add_transfer(self, source: str, target: str) -> TransferPair:
        for name in (source, target):
            if name not in self.datasets:
                raise UnknownNameError(f"transfer references unknown dataset {name!r}")
        if self.datasets[source].role != "source":
            raise IngestError(f"transfer source {source!r} has role {self.datasets[source].role!r}")
        if self.datasets[target].role != "target":
            raise IngestError(f"transfer target {target!r} has role {self.datasets[target].role!r}")
        pair = TransferPair(source, target)
        if pair in self.transfers:
            raise DuplicateNameError(f"duplicate transfer pair {source!r} -> {target!r}")
        self.transfers.append(pair)
        return pair

    def add_record(self, record: EvaluationRecord) -> None:
        if record.model not in self.models:
            raise UnknownNameError(f"record references unknown model {record.model!r}")
        if record.dataset not in self.datasets:
            raise UnknownNameError(f"record references unknown dataset {record.dataset!r}")
        if record.source is not None and record.source not in self.datasets:
            raise UnknownNameError(f"record references unknown source dataset {record.source!r}")
        if record.scope == "zero_shot":
            targets = {p.target for p in self.transfers}
            if record.dataset not in targets:
                raise IngestError(
                    f"zero-shot record on {record.dataset!r}: dataset is not a target in the transfer map"
                )
            if record.source is not None and TransferPair(record.source, record.dataset) not in self.transfers:
                raise IngestError(
                    f"zero-shot record pair {record.source!r} -> {record.dataset!r} is not in the transfer map"
                )
        if record.key in self.records:
            raise DuplicateNameError(
                f"duplicate record for ({record.model}, {record.dataset}, {record.scope}"
                + (f", source={record.source}" if record.source else "")
                + ")"
            )
        self.records[record.key] = record

    def snapshot(self) -> "RegistrySnapshot":
        return RegistrySnapshot(
            models=tuple(sorted(self.models.values(), key=lambda c: c.name)),
            datasets=tuple(sorted(self.datasets.values(), key=lambda c: c.name)),
            records=tuple(sorted(self.records.values(), key=lambda r: r.key)),
            transfers=tuple(sorted(self.transfers, key=lambda p: (p.source, p.target))),
        )


@dataclass(frozen=True)
class RegistrySnapshot:
    """Immutable registry view; safe to share across threads."""

    models: tuple[ModelCard, ...]
    datasets: tuple[DatasetCard, ...]
    records: tuple[EvaluationRecord, ...]
    transfers: tuple[TransferPair, ...]
    _digest: str | None = field(default=None, compare=False)

    def model(self, name: str) -> ModelCard:
        for card in self.models:
            if card.name == name:
                return card
        raise UnknownNameError(f"unknown model {name!r}")

    def dataset(self, name: str) -> DatasetCard:
        for card in self.datasets:
            if card.name == name:
                return card
        raise UnknownNameError(f"unknown dataset {name!r}")

    def records_for_scope(self, scope: str) -> tuple[EvaluationRecord, ...]:
        scope = canonical_scope(scope)
        return tuple(r for r in self.records if r.scope == scope)

    def to_document(self) -> dict:
        return {
            "models": [
                {
                    "name": c.name,
                    "family": c.family,
                    "year": c.year,
                    "venue": c.venue,
                    "deep_supervision": c.deep_supervision,
                    "pretrained": c.pretrained,
                    "params_m": c.params,
                    "flops_g": c.flops,
                    "fps": c.fps,
                }
                for c in self.models
            ],
            "datasets": [
                {
                    "name": c.name,
                    "modality": c.modality,
                    "role": c.role,
                    "class_count": c.class_count,
                    "scale_label": c.scale_label,
                    "shape_label": c.shape_label,
                    "boundary_label": c.boundary_label,
                }
                for c in self.datasets
            ],
            "records": [
                {
                    "model": r.model,
                    "dataset": r.dataset,
                    "scope": r.scope,
                    "source": r.source,
                    "mean_iou": r.mean_iou,
                    "sample_ious": list(r.sample_ious),
                }
                for r in self.records
            ],
            "transfers": [{"source": p.source, "target": p.target} for p in self.transfers],
        }

    def canonical_bytes(self) -> bytes:
        return json.dumps(self.to_document(), sort_keys=True, separators=(",", ":")).encode("utf-8")

    @property
    def digest(self) -> str:
        digest = hashlib.sha256(self.canonical_bytes()).hexdigest()
        if self._digest is None:
            object.__setattr__(self, "_digest", digest)
        return digest


def snapshot_from_document(doc: dict) -> RegistrySnapshot:
    """Inverse of `RegistrySnapshot.to_document`, with full validation."""
    reg = Registry()
    for m in doc.get("models", []):
        reg.add_model(
            ModelCard(
                name=m["name"],
                family=m["family"],
                year=int(m["year"]),
                venue=m["venue"],
                deep_supervision=bool(m["deep_supervision"]),
                pretrained=bool(m["pretrained"]),
                params=float(m["params_m"]),
                flops=float(m["flops_g"]),
                fps=float(m["fps"]),
            )
        )
    for d in doc.get("datasets", []):
        reg.add_dataset(
            DatasetCard(
                name=d["name"],
                modality=d["modality"],
                role=d["role"],
                class_count=int(d.get("class_count", 1)),
                scale_label=d.get("scale_label"),
                shape_label=d.get("shape_label"),
                boundary_label=d.get("boundary_label"),
            )
        )
    for t in doc.get("transfers", []):
        reg.add_transfer(t["source"], t["target"])
    for r in doc.get("records", []):
        reg.add_record(
            EvaluationRecord(
                model=r["model"],
                dataset=r["dataset"],
                scope=r["scope"],
                source=r.get("source"),
                sample_ious=tuple(float(v) for v in r.get("sample_ious", [])),
                mean_iou=float(r["mean_iou"]),
            )
        )
    return reg.snapshot()


# ---------------------------------------------------------------------------
# File ingestion


def _require_keys(obj: dict, keys: tuple[str, ...], where: str) -> None:
    missing = [k for k in keys if k not in obj]
    if missing:
        raise IngestError(f"{where}: missing required field(s) {missing}")


def ingest_model_cards(data: bytes | str) -> list[ModelCard]:
    """Parse a model-card JSON document (array of card objects)."""
    text = data.decode("utf-8") if isinstance(data, bytes) else data
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise IngestError(f"model cards: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    if not isinstance(raw, list):
        raise IngestError("model cards: top-level value must be an array")
    cards: list[ModelCard] = []
    seen: set[str] = set()
    for i, obj in enumerate(raw):
        where = f"model cards: entry {i}"
        if not isinstance(obj, dict):
            raise IngestError(f"{where}: expected an object")
        _require_keys(obj, ("name", "family", "year", "venue", "deep_supervision", "pretrained", "params_m", "flops_g", "fps"), where)
        card = ModelCard(
            name=str(obj["name"]),
            family=str(obj["family"]),
            year=int(obj["year"]),
            venue=str(obj["venue"]),
            deep_supervision=bool(obj["deep_supervision"]),
            pretrained=bool(obj["pretrained"]),
            params=float(obj["params_m"]),
            flops=float(obj["flops_g"]),
            fps=float(obj["fps"]),
        )
        if card.name in seen:
            raise DuplicateNameError(f"{where}: duplicate model name {card.name!r}")
        seen.add(card.name)
        cards.append(card)
    return cards


def ingest_dataset_cards(data: bytes | str) -> list[DatasetCard]:
    text = data.decode("utf-8") if isinstance(data, bytes) else data
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise IngestError(f"dataset cards: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    if not isinstance(raw, list):
        raise IngestError("dataset cards: top-level value must be an array")
    cards: list[DatasetCard] = []
    seen: set[str] = set()
    for i, obj in enumerate(raw):
        where = f"dataset cards: entry {i}"
        if not isinstance(obj, dict):
            raise IngestError(f"{where}: expected an object")
        _require_keys(obj, ("name", "modality", "role"), where)
        card = DatasetCard(
            name=str(obj["name"]),
            modality=str(obj["modality"]),
            role=str(obj["role"]),
            class_count=int(obj.get("class_count", 1)),
            scale_label=obj.get("scale_label"),
            shape_label=obj.get("shape_label"),
            boundary_label=obj.get("boundary_label"),
        )
        if card.name in seen:
            raise DuplicateNameError(f"{where}: duplicate dataset name {card.name!r}")
        seen.add(card.name)
        cards.append(card)
    return cards


def _read_csv(data: bytes | str, required: tuple[str, ...], what: str):
    text = data.decode("utf-8") if isinstance(data, bytes) else data
    reader = csv.DictReader(io.StringIO(text))
    header = reader.fieldnames or []
    missing = [c for c in required if c not in header]
    if missing:
        raise IngestError(f"{what}: header missing column(s) {missing}; got {header}")
    return reader


def ingest_records(data: bytes | str, registry: Registry, means: bytes | str | None = None) -> Registry:
    """Attach per-sample records (and optional mean-only records).

    The long CSV carries one row per sample; rows are grouped by
    (model, dataset, scope, source) and sample_index must be contiguous
    from 0 within each group. A means table cross-checks any group it
    covers against the recomputed mean and contributes mean-only records
    for groups without sample rows.
    """
    groups: dict[tuple, dict[int, float]] = {}
    order: list[tuple] = []
    reader = _read_csv(data, ("model", "dataset", "scope", "sample_index", "iou"), "records")
    for line_no, row in enumerate(reader, start=2):
        try:
            scope = canonical_scope(row["scope"])
            idx = int(row["sample_index"])
            iou = float(row["iou"])
        except (IngestError, ValueError) as exc:
            raise IngestError(f"records: line {line_no}: {exc}") from exc
        if not (0.0 <= iou <= 1.0):
            raise IngestError(f"records: line {line_no}: IoU {iou} outside [0, 1]")
        source = (row.get("source") or "").strip() or None
        key = (row["model"], row["dataset"], scope, source)
        if key not in groups:
            groups[key] = {}
            order.append(key)
        if idx in groups[key]:
            raise IngestError(f"records: line {line_no}: duplicate sample_index {idx} for {key[:2]}")
        groups[key][idx] = iou

    declared_means: dict[tuple, float] = {}
    if means is not None:
        reader = _read_csv(means, ("model", "dataset", "scope", "mean_iou"), "means")
        for line_no, row in enumerate(reader, start=2):
            try:
                scope = canonical_scope(row["scope"])
                mean_iou = float(row["mean_iou"])
            except (IngestError, ValueError) as exc:
                raise IngestError(f"means: line {line_no}: {exc}") from exc
            source = (row.get("source") or "").strip() or None
            key = (row["model"], row["dataset"], scope, source)
            if key in declared_means:
                raise IngestError(f"means: line {line_no}: duplicate mean for {key[:2]}")
            declared_means[key] = mean_iou
            if key not in groups:
                order.append(key)

    staged: list[EvaluationRecord] = []
    for key in order:
        model, dataset, scope, source = key
        samples = groups.get(key)
        if samples:
            indices = sorted(samples)
            if indices != list(range(len(indices))):
                raise IngestError(f"records: ({model}, {dataset}): sample_index must run 0..n-1, got {indices}")
            vector = tuple(samples[i] for i in indices)
            mean_iou = sum(vector) / len(vector)
            declared = declared_means.get(key)
            if declared is not None and abs(declared - mean_iou) > MEAN_TOLERANCE:
                raise IngestError(
                    f"records: ({model}, {dataset}): declared mean {declared} differs from "
                    f"recomputed mean {mean_iou} by more than {MEAN_TOLERANCE}"
                )
        else:
            vector = ()
            mean_iou = declared_means[key]
        staged.append(
            EvaluationRecord(
                model=model, dataset=dataset, scope=scope, source=source,
                sample_ious=vector, mean_iou=mean_iou,
            )
        )

    # Validate the whole batch against a copy first so a failure midway
    # cannot leave the registry half-updated.
    trial = Registry()
    trial.models = dict(registry.models)
    trial.datasets = dict(registry.datasets)
    trial.records = dict(registry.records)
    trial.transfers = list(registry.transfers)
    for record in staged:
        trial.add_record(record)
    registry.records = trial.records
    return registry


def resolve_transfers(data: bytes | str, registry: Registry) -> list[TransferPair]:
    reader = _read_csv(data, ("source", "target"), "transfers")
    pairs = []
    for line_no, row in enumerate(reader, start=2):
        try:
            pairs.append(registry.add_transfer(row["source"], row["target"]))
        except IngestError as exc:
            raise type(exc)(f"transfers: line {line_no}: {exc}") from exc
    return pairs


def load_registry(directory: str | Path) -> Registry:
    """Load a registry input directory.

    Layout: models.json and datasets.json (required), transfers.csv,
    records.csv and means.csv (each optional).
    """
    directory = Path(directory)
    reg = Registry()
    models_path = directory / "models.json"
    datasets_path = directory / "datasets.json"
    for path in (models_path, datasets_path):
        if not path.exists():
            raise IngestError(f"registry directory {directory}: missing {path.name}")
    for card in ingest_model_cards(models_path.read_bytes()):
        reg.add_model(card)
    for card in ingest_dataset_cards(datasets_path.read_bytes()):
        reg.add_dataset(card)
    transfers_path = directory / "transfers.csv"
    if transfers_path.exists():
        resolve_transfers(transfers_path.read_bytes(), reg)
    records_path = directory / "records.csv"
    means_path = directory / "means.csv"
    ingest_records(
        records_path.read_bytes() if records_path.exists() else "model,dataset,scope,sample_index,iou\n",
        reg,
        means=means_path.read_bytes() if means_path.exists() else None,
    )
    return reg


def with_records(snapshot: RegistrySnapshot, records: tuple[EvaluationRecord, ...]) -> RegistrySnapshot:
    return replace(snapshot, records=records, _digest=None)
