"""Read-only HTTP JSON API for the explorer UI.

Everything is served from one immutable registry snapshot loaded at
startup; every successful payload carries the snapshot digest so a
client can attribute any number on screen to the data it came from.
Mutation happens only through CLI ingestion, never through the API.
"""

from __future__ import annotations

import json
from pathlib import Path

from fastapi import FastAPI, HTTPException, Query
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel, Field

from . import advise as advise_mod
from . import features, reports, stats, uscore
from .ranker import RankerModel
from .registry import IngestError, RegistrySnapshot, UnknownNameError, canonical_scope
from .cli import _load_bands, _load_snapshot, _mean_breakdowns, _published_values_path, _tier_map

API_PREFIX = "/api/v1"


class AdviseConstraints(BaseModel):
    storage: str | None = None
    compute: str | None = None
    speed: str | None = None


class AdviseRequest(BaseModel):
    modality: str
    scale: str | None = None
    shape: str | None = None
    boundary: str | None = None
    constraints: AdviseConstraints = Field(default_factory=AdviseConstraints)
    k: int = 10
    label_kind: str = "uscore"


class ServiceState:
    """Immutable per-process state shared by all requests."""

    def __init__(
        self, registry_dir: str, ranker_path: str | None, bands_path: str | None = None, baseline: str = "U-Net"
    ):
        self.registry_dir = registry_dir
        self.snapshot: RegistrySnapshot = _load_snapshot(registry_dir)
        self.digest = self.snapshot.digest
        self.bands = _load_bands(registry_dir, bands_path)
        self.rankers = self._load_rankers(ranker_path)
        self.breakdowns = _mean_breakdowns(self.snapshot, self.bands)
        self.tiers = {}
        for scope in ("source", "target"):
            try:
                self.tiers[scope] = _tier_map(self.snapshot, baseline, scope)
            except (UnknownNameError, IngestError):
                self.tiers[scope] = {}
        self.leaderboards = {
            (metric, scope): self._leaderboard(metric, scope)
            for metric in ("iou", "uscore")
            for scope in ("source", "target")
        }

    @staticmethod
    def _load_rankers(ranker_path: str | None) -> dict[str, RankerModel]:
        if ranker_path is None:
            return {}
        path = Path(ranker_path)
        if path.is_dir():
            out = {}
            for kind in ("iou", "uscore"):
                candidate = path / f"{kind}.json"
                if candidate.exists():
                    out[kind] = RankerModel.from_document(json.loads(candidate.read_text()))
            if not out:
                raise IngestError(f"ranker directory {path} holds no iou.json or uscore.json")
            return out
        model = RankerModel.from_document(json.loads(path.read_text()))
        return {"iou": model, "uscore": model}

    def _leaderboard(self, metric: str, scope: str):
        tiers = self.tiers.get(scope, {})
        published = _published_values_path(self.registry_dir, metric, canonical_scope(scope))
        if published is not None and published.exists():
            entries = uscore.build_leaderboard(uscore.parse_value_table(published.read_bytes()), tiers)
            return entries, "published_values"
        try:
            entries = uscore.leaderboard_from_records(self.snapshot, scope, metric, self.bands, tiers)
        except (IngestError, ValueError):
            entries = []
        return entries, "computed"


def _ok(state: ServiceState, payload: dict) -> dict:
    return {"status": "ok", "registry_digest": state.digest, "payload": payload}


def create_app(state: ServiceState, ui_dir: str | None = None) -> FastAPI:
    app = FastAPI(title="zooscore", docs_url=None, redoc_url=None)
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["GET", "POST"], allow_headers=["*"]
    )

    @app.get(API_PREFIX + "/models")
    def get_models():
        models = []
        for card in state.snapshot.models:
            storage, compute, speed = features.discretize_model(card.params, card.flops, card.fps)
            bd = state.breakdowns.get(card.name)
            models.append(
                {
                    "name": card.name,
                    "family": card.family,
                    "year": card.year,
                    "venue": card.venue,
                    "deep_supervision": card.deep_supervision,
                    "pretrained": card.pretrained,
                    "params_m": card.params,
                    "flops_g": card.flops,
                    "fps": card.fps,
                    "bins": {"storage": storage, "compute": compute, "speed": speed},
                    "breakdown": None if bd is None else _breakdown_doc(bd),
                }
            )
        return _ok(state, {"models": models})

    @app.get(API_PREFIX + "/datasets")
    def get_datasets():
        datasets = [
            {
                "name": card.name,
                "modality": card.modality,
                "role": card.role,
                "class_count": card.class_count,
                "scale_label": card.scale_label,
                "shape_label": card.shape_label,
                "boundary_label": card.boundary_label,
            }
            for card in state.snapshot.datasets
        ]
        return _ok(state, {"datasets": datasets})

    @app.get(API_PREFIX + "/leaderboard")
    def get_leaderboard(metric: str = Query("iou"), scope: str = Query("source")):
        if metric not in ("iou", "uscore"):
            raise HTTPException(status_code=422, detail=f"unknown metric {metric!r}")
        try:
            scope_name = "source" if canonical_scope(scope) == "in_domain" else "target"
        except IngestError as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        entries, source = state.leaderboards[(metric, scope_name)]
        doc = reports.leaderboard_document(entries, metric, scope_name, state.digest)
        doc["value_source"] = source
        return _ok(state, doc)

    @app.get(API_PREFIX + "/uscore/{model_name}")
    def get_uscore(model_name: str):
        try:
            state.snapshot.model(model_name)
        except UnknownNameError as exc:
            raise HTTPException(status_code=404, detail=str(exc))
        per_dataset = {}
        for scope in ("in_domain", "zero_shot"):
            try:
                scores = uscore.score_registry(state.snapshot, scope, state.bands)
            except (IngestError, ValueError):
                continue
            for (model, scope_key), bd in scores.items():
                if model == model_name:
                    per_dataset[scope_key] = _breakdown_doc(bd)
        mean = state.breakdowns.get(model_name)
        return _ok(
            state,
            {"model": model_name, "per_dataset": per_dataset, "mean": None if mean is None else _breakdown_doc(mean)},
        )

    @app.get(API_PREFIX + "/significance")
    def get_significance(baseline: str = Query("U-Net"), scope: str = Query("source")):
        try:
            cells = stats.significance_matrix(state.snapshot, baseline, scope)
        except UnknownNameError as exc:
            raise HTTPException(status_code=404, detail=str(exc))
        except IngestError as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        return _ok(
            state,
            {
                "baseline": baseline,
                "cells": [
                    {
                        "model": c.model,
                        "dataset": c.dataset,
                        "scope": c.scope,
                        "source": c.source,
                        "t": c.t_stat,
                        "df": c.df,
                        "p": c.p,
                        "tier": c.tier.tier,
                        "direction": c.tier.direction,
                    }
                    for c in cells
                ],
            },
        )

    @app.post(API_PREFIX + "/advise")
    def post_advise(request: AdviseRequest):
        if request.label_kind not in ("iou", "uscore"):
            raise HTTPException(status_code=422, detail=f"unknown label_kind {request.label_kind!r}")
        model = state.rankers.get(request.label_kind)
        if model is None:
            raise HTTPException(status_code=503, detail="no ranker loaded for this label kind")
        query = advise_mod.AdvisorQuery(
            modality=request.modality,
            scale=request.scale,
            shape=request.shape,
            boundary=request.boundary,
            storage=request.constraints.storage,
            compute=request.constraints.compute,
            speed=request.constraints.speed,
            k=request.k,
            label_kind=request.label_kind,
        )
        try:
            result = advise_mod.advise(state.snapshot, model, query, state.breakdowns)
        except ValueError as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        return _ok(
            state,
            {
                "excluded": result.excluded,
                "binding_constraint": result.binding_constraint,
                "entries": [
                    {
                        "rank": r.rank,
                        "model": r.model,
                        "score": r.score,
                        "bins": r.bins,
                        "breakdown": None if r.breakdown is None else _breakdown_doc(r.breakdown),
                    }
                    for r in result.entries
                ],
            },
        )

    if ui_dir is not None:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app


def _breakdown_doc(bd: uscore.UScoreBreakdown) -> dict:
    return {"a": bd.a, "p": bd.p, "g": bd.g, "s": bd.s, "eff": bd.eff, "u": bd.u}


def serve(
    registry_dir: str,
    ranker_path: str | None,
    port: int,
    bands_path: str | None = None,
    ui_dir: str | None = None,
) -> int:
    import uvicorn

    state = ServiceState(registry_dir, ranker_path, bands_path)
    app = create_app(state, ui_dir=ui_dir)
    uvicorn.run(app, host="127.0.0.1", port=port, log_level="warning")
    return 0
