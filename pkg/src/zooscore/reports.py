"""Deterministic report emission: CSV, JSON, and Markdown tables.

Identical inputs produce byte-identical output in every format; numeric
JSON fields keep full precision (display rounding is a client concern),
while CSV/Markdown render leaderboard values at the two-decimal display
convention. Markdown cells carry a glyph per significance tier.
"""

from __future__ import annotations

import csv
import io
import json

from .stats import SignificanceCell, SignificanceTier
from .uscore import LeaderboardEntry

TIER_GLYPHS = {
    "p<0.0001": "****",
    "p<0.001": "***",
    "p<0.01": "**",
    "p<0.05": "*",
    "not_significant": "ns",
    "unavailable": "-",
}


def _tier_doc(tier: SignificanceTier | None) -> dict | None:
    if tier is None:
        return None
    return {"tier": tier.tier, "direction": tier.direction, "glyph": TIER_GLYPHS[tier.tier]}


def leaderboard_document(entries: list[LeaderboardEntry], metric: str, scope: str, digest: str) -> dict:
    return {
        "metric": metric,
        "scope": scope,
        "registry_digest": digest,
        "entries": [
            {
                "rank": e.rank,
                "model": e.model,
                "value": e.value,
                "per_dataset": e.per_dataset,
                "tier": _tier_doc(e.tier),
            }
            for e in entries
        ],
    }


def emit_leaderboard(entries: list[LeaderboardEntry], fmt: str, metric: str, scope: str, digest: str) -> bytes:
    if fmt == "json":
        doc = leaderboard_document(entries, metric, scope, digest)
        return (json.dumps(doc, sort_keys=True, indent=2) + "\n").encode("utf-8")
    datasets = sorted({d for e in entries for d in e.per_dataset})
    if fmt == "csv":
        out = io.StringIO()
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(["rank", "model", "value", *datasets, "tier", "direction"])
        for e in entries:
            writer.writerow(
                [
                    e.rank,
                    e.model,
                    f"{e.value:.2f}",
                    *[f"{e.per_dataset[d]:.2f}" if d in e.per_dataset else "" for d in datasets],
                    e.tier.tier if e.tier else "",
                    e.tier.direction if e.tier else "",
                ]
            )
        return out.getvalue().encode("utf-8")
    if fmt == "md":
        if not entries:
            raise ValueError("markdown emission requires at least one entry")
        lines = [f"| Rank | Model | {metric} |" + "".join(f" {d} |" for d in datasets) + " Sig |"]
        lines.append("|---|---|---|" + "---|" * len(datasets) + "---|")
        for e in entries:
            cells = [str(e.rank), e.model, f"{e.value:.2f}"]
            cells += [f"{e.per_dataset[d]:.2f}" if d in e.per_dataset else "" for d in datasets]
            cells.append(TIER_GLYPHS[e.tier.tier] if e.tier else "")
            lines.append("| " + " | ".join(cells) + " |")
        return ("\n".join(lines) + "\n").encode("utf-8")
    raise ValueError(f"unsupported report format {fmt!r}; expected csv, json, or md")


def emit_significance(cells: list[SignificanceCell], fmt: str, digest: str) -> bytes:
    if fmt == "json":
        doc = {
            "registry_digest": digest,
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
        }
        return (json.dumps(doc, sort_keys=True, indent=2) + "\n").encode("utf-8")
    if fmt == "csv":
        out = io.StringIO()
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(["model", "dataset", "scope", "source", "t", "df", "p", "tier", "direction"])
        for c in cells:
            writer.writerow(
                [
                    c.model,
                    c.dataset,
                    c.scope,
                    c.source or "",
                    "" if c.t_stat is None else repr(c.t_stat),
                    "" if c.df is None else c.df,
                    "" if c.p is None else repr(c.p),
                    c.tier.tier,
                    c.tier.direction,
                ]
            )
        return out.getvalue().encode("utf-8")
    if fmt == "md":
        lines = ["| Model | Dataset | Scope | p | Tier | Direction |", "|---|---|---|---|---|---|"]
        for c in cells:
            p_text = "" if c.p is None else f"{c.p:.3g}"
            lines.append(
                f"| {c.model} | {c.dataset} | {c.scope} | {p_text} | {TIER_GLYPHS[c.tier.tier]} | {c.tier.direction} |"
            )
        return ("\n".join(lines) + "\n").encode("utf-8")
    raise ValueError(f"unsupported report format {fmt!r}; expected csv, json, or md")


def emit_scores(scores: dict, digest: str, fmt: str = "csv") -> bytes:
    rows = sorted(scores.items())
    if fmt == "json":
        doc = {
            "registry_digest": digest,
            "scores": [
                {
                    "model": model,
                    "dataset": scope_key,
                    "a": bd.a, "p": bd.p, "g": bd.g, "s": bd.s,
                    "eff": bd.eff, "u": bd.u,
                }
                for (model, scope_key), bd in rows
            ],
        }
        return (json.dumps(doc, sort_keys=True, indent=2) + "\n").encode("utf-8")
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["model", "dataset", "a", "p", "g", "s", "eff", "u"])
    for (model, scope_key), bd in rows:
        writer.writerow([model, scope_key, *(repr(v) for v in (bd.a, bd.p, bd.g, bd.s, bd.eff, bd.u))])
    return out.getvalue().encode("utf-8")
