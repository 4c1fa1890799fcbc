"""Command-line entry points.

Subcommands compose through files: ingest validates a registry directory
into a canonical snapshot, characterize profiles mask folders, score and
significance derive tables from a snapshot, leaderboard renders rankings
(recomputed or from a published value table), advisor-train/advisor-eval
handle the ranker lifecycle, advise answers one query, and serve exposes
the read-only HTTP API. Exit codes: 0 success, 1 domain error, 2 usage
error. All file outputs are written atomically and deterministically.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import tempfile
from pathlib import Path

from . import advise as advise_mod
from . import masks, reports, stats, uscore
from .ranker import RankerModel
from .registry import IngestError, canonical_scope, load_registry, snapshot_from_document

LOG = logging.getLogger("zooscore")


def _setup_logging() -> None:
    level = os.environ.get("UBENCH_LOG", "warning").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING), format="%(levelname)s %(name)s: %(message)s")


def atomic_write(path: str | Path, data: bytes) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "wb") as handle:
            handle.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _load_snapshot(registry_dir: str):
    path = Path(registry_dir)
    snapshot_file = path / "snapshot.json"
    if snapshot_file.exists() and not (path / "models.json").exists():
        return snapshot_from_document(json.loads(snapshot_file.read_text())["registry"])
    return load_registry(path).snapshot()


def _load_bands(registry_dir: str, bands_arg: str | None):
    if bands_arg:
        return uscore.parse_bands(Path(bands_arg).read_bytes())
    default = Path(registry_dir) / "bands.csv"
    if default.exists():
        return uscore.parse_bands(default.read_bytes())
    return None


def _tier_map(snapshot, baseline: str, scope: str) -> dict:
    """Model -> overall tier: most significant tier among its datasets."""
    order = [name for _, name in stats.TIER_THRESHOLDS] + [stats.TIER_NOT_SIGNIFICANT, stats.TIER_UNAVAILABLE]
    best: dict[str, stats.SignificanceTier] = {}
    for cell in stats.significance_matrix(snapshot, baseline, scope):
        current = best.get(cell.model)
        if current is None or order.index(cell.tier.tier) < order.index(current.tier):
            best[cell.model] = cell.tier
    return best


# ---------------------------------------------------------------------------
# Subcommand handlers


def _cmd_ingest(args) -> int:
    snapshot = load_registry(args.registry).snapshot()
    doc = {"digest": snapshot.digest, "registry": snapshot.to_document()}
    payload = (json.dumps(doc, sort_keys=True, indent=2) + "\n").encode("utf-8")
    out = Path(args.out)
    if out.exists() and out.read_bytes() == payload:
        LOG.info("ingest: output unchanged (digest %s); skipping rewrite", snapshot.digest)
        print(snapshot.digest)
        return 0
    atomic_write(out, payload)
    print(snapshot.digest)
    return 0


def _cmd_characterize(args) -> int:
    mask_dir = Path(args.masks)
    mask_paths = sorted(mask_dir.glob("*.png"))
    if not mask_paths:
        raise IngestError(f"no PNG masks found under {mask_dir}")
    samples = []
    names = []
    for mask_path in mask_paths:
        image = None
        if args.images:
            image_path = Path(args.images) / mask_path.name
            if image_path.exists():
                image = masks.read_gray_png(image_path)
        samples.append((masks.read_mask_png(mask_path), image))
        names.append(mask_path.name)
    cfg = masks.CharacterizationConfig(ring_radius=args.ring_radius, band_width=args.band_width)
    profile = masks.characterize_dataset(samples, cfg)
    doc = masks.profile_to_document(profile, names)
    atomic_write(args.out, (json.dumps(doc, sort_keys=True, indent=2) + "\n").encode("utf-8"))
    print(f"{profile.scale_label},{profile.shape_label},{profile.boundary_label}")
    return 0


def _cmd_score(args) -> int:
    snapshot = _load_snapshot(args.registry)
    bands = _load_bands(args.registry, args.bands)
    scores = uscore.score_registry(snapshot, canonical_scope(args.scope), bands)
    if not scores:
        raise IngestError(f"no records in scope {args.scope!r}; nothing to score")
    atomic_write(args.out, reports.emit_scores(scores, snapshot.digest, args.format))
    return 0


def _cmd_significance(args) -> int:
    snapshot = _load_snapshot(args.registry)
    cells = stats.significance_matrix(snapshot, args.baseline, canonical_scope(args.scope))
    atomic_write(args.out, reports.emit_significance(cells, args.format, snapshot.digest))
    return 0


def _cmd_leaderboard(args) -> int:
    snapshot = _load_snapshot(args.registry)
    scope = canonical_scope(args.scope)
    tiers = None
    if args.tiers_baseline:
        tiers = _tier_map(snapshot, args.tiers_baseline, scope)
    if args.values:
        values_path = Path(args.values)
        if not values_path.exists():
            raise IngestError(f"value table {values_path} does not exist")
    else:
        values_path = _published_values_path(args.registry, args.metric, scope)
    if values_path is not None and values_path.exists():
        entries = uscore.build_leaderboard(uscore.parse_value_table(values_path.read_bytes()), tiers)
    else:
        bands = _load_bands(args.registry, args.bands)
        entries = uscore.leaderboard_from_records(snapshot, scope, args.metric, bands, tiers)
    atomic_write(args.out, reports.emit_leaderboard(entries, args.format, args.metric, scope, snapshot.digest))
    if args.year_max:
        years = {card.name: card.year for card in snapshot.models}
        rows = uscore.per_year_max([e for e in entries if e.model in years], years)
        text = "year,model,value\n" + "".join(f"{y},{m},{v:.2f}\n" for y, m, v in rows)
        atomic_write(args.year_max, text.encode("utf-8"))
    if args.family_aggregate:
        families = {card.name: card.family for card in snapshot.models}
        agg = uscore.family_aggregate([e for e in entries if e.model in families], families)
        text = "family,value\n" + "".join(f"{f},{v:.2f}\n" for f, v in sorted(agg.items()))
        atomic_write(args.family_aggregate, text.encode("utf-8"))
    return 0


def _published_values_path(registry_dir: str, metric: str, scope: str) -> Path | None:
    scope_name = "source" if scope == "in_domain" else "target"
    return Path(registry_dir) / "leaderboards" / f"{metric}_{scope_name}.csv"


def _cmd_advisor_train(args) -> int:
    snapshot = _load_snapshot(args.registry)
    bands = _load_bands(args.registry, args.bands)
    holdout = tuple(s for s in (args.holdout or "").split(",") if s)
    train, _ = advise_mod.build_groups(snapshot, args.label_kind, holdout, bands)
    if not train:
        raise IngestError("no training groups; the registry has no usable in-domain records")
    model = advise_mod.train_ranker(
        snapshot, train,
        rounds=args.rounds, max_depth=args.max_depth, learning_rate=args.learning_rate,
        min_leaf=args.min_leaf, seed=args.seed,
    )
    payload = (json.dumps(model.to_document(), sort_keys=True, indent=2) + "\n").encode("utf-8")
    atomic_write(args.out, payload)
    print(f"trained on {len(train)} groups; final loss {model.train_loss[-1]:.6f}")
    return 0


def _cmd_advisor_eval(args) -> int:
    snapshot = _load_snapshot(args.registry)
    bands = _load_bands(args.registry, args.bands)
    model = RankerModel.from_document(json.loads(Path(args.ranker).read_text()))
    holdout = tuple(s for s in (args.holdout or "").split(",") if s)
    if not holdout:
        raise IngestError("advisor-eval requires --holdout dataset names")
    _, held = advise_mod.build_groups(snapshot, args.label_kind, holdout, bands)
    if not held:
        raise IngestError(f"holdout datasets {holdout} have no in-domain records")
    ks = tuple(int(k) for k in args.ks.split(","))
    result = advise_mod.evaluate_ranker(snapshot, model, held, ks)
    doc = {"ndcg_at": {str(k): v for k, v in result["ndcg_at"].items()}, "map": result["map"], "spearman": result["spearman"]}
    text = json.dumps(doc, sort_keys=True, indent=2) + "\n"
    if args.out:
        atomic_write(args.out, text.encode("utf-8"))
    print(text, end="")
    return 0


def _cmd_advise(args) -> int:
    snapshot = _load_snapshot(args.registry)
    bands = _load_bands(args.registry, args.bands)
    model = RankerModel.from_document(json.loads(Path(args.ranker).read_text()))
    query = advise_mod.AdvisorQuery(
        modality=args.modality, scale=args.scale, shape=args.shape, boundary=args.boundary,
        storage=args.storage, compute=args.compute, speed=args.speed,
        k=args.k, label_kind=args.label_kind,
    )
    breakdowns = _mean_breakdowns(snapshot, bands)
    result = advise_mod.advise(snapshot, model, query, breakdowns)
    doc = {
        "registry_digest": snapshot.digest,
        "excluded": result.excluded,
        "binding_constraint": result.binding_constraint,
        "entries": [
            {
                "rank": r.rank, "model": r.model, "score": r.score, "bins": r.bins,
                "breakdown": None if r.breakdown is None else {
                    "a": r.breakdown.a, "p": r.breakdown.p, "g": r.breakdown.g,
                    "s": r.breakdown.s, "eff": r.breakdown.eff, "u": r.breakdown.u,
                },
            }
            for r in result.entries
        ],
    }
    text = json.dumps(doc, sort_keys=True, indent=2) + "\n"
    if args.out:
        atomic_write(args.out, text.encode("utf-8"))
    print(text, end="")
    return 0


def _mean_breakdowns(snapshot, bands):
    """Per-model mean composite scores for tie-breaks and explanations."""
    try:
        scores = uscore.score_registry(snapshot, "in_domain", bands)
    except (IngestError, ValueError):
        return {}
    by_model: dict[str, list] = {}
    for (model, _), bd in scores.items():
        by_model.setdefault(model, []).append(bd)
    out = {}
    for model, bds in by_model.items():
        n = len(bds)
        out[model] = uscore.UScoreBreakdown(
            a=sum(b.a for b in bds) / n, p=sum(b.p for b in bds) / n, g=sum(b.g for b in bds) / n,
            s=sum(b.s for b in bds) / n, eff=sum(b.eff for b in bds) / n, u=sum(b.u for b in bds) / n,
        )
    return out


def _cmd_serve(args) -> int:
    from . import service

    return service.serve(args.registry, args.ranker, args.port, bands_path=args.bands, ui_dir=args.ui)


# ---------------------------------------------------------------------------
# Parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="zooscore", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="verb", required=True)

    p = sub.add_parser("ingest", help="validate a registry directory into a canonical snapshot")
    p.add_argument("--registry", required=True, help="registry input directory")
    p.add_argument("--out", required=True, help="snapshot JSON path")
    p.set_defaults(func=_cmd_ingest)

    p = sub.add_parser("characterize", help="profile a folder of mask PNGs")
    p.add_argument("--masks", required=True)
    p.add_argument("--images", default=None, help="matching grayscale images for contrast scoring")
    p.add_argument("--ring-radius", type=int, default=masks.DEFAULT_RING_RADIUS)
    p.add_argument("--band-width", type=int, default=masks.DEFAULT_BAND_WIDTH)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_characterize)

    p = sub.add_parser("score", help="composite accuracy-efficiency scores per record")
    p.add_argument("--registry", required=True)
    p.add_argument("--scope", default="source")
    p.add_argument("--bands", default=None, help="override band table (metric,scope_key,q10,q90)")
    p.add_argument("--format", default="csv", choices=["csv", "json"])
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_score)

    p = sub.add_parser("significance", help="paired t-tests of every variant against a baseline")
    p.add_argument("--registry", required=True)
    p.add_argument("--baseline", default="U-Net")
    p.add_argument("--scope", default="source")
    p.add_argument("--format", default="csv", choices=["csv", "json", "md"])
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_significance)

    p = sub.add_parser("leaderboard", help="ranked models by mean metric")
    p.add_argument("--registry", required=True)
    p.add_argument("--metric", default="iou", choices=["iou", "uscore"])
    p.add_argument("--scope", default="source")
    p.add_argument("--values", default=None, help="published value table (model,value); defaults to registry leaderboards/")
    p.add_argument("--bands", default=None)
    p.add_argument("--tiers-baseline", default=None, help="annotate entries with tiers against this baseline")
    p.add_argument("--format", default="csv", choices=["csv", "json", "md"])
    p.add_argument("--year-max", default=None, help="also write the per-year best-entry CSV here")
    p.add_argument("--family-aggregate", default=None, help="also write the per-family mean CSV here")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_leaderboard)

    p = sub.add_parser("advisor-train", help="train the pairwise ranker on in-domain groups")
    p.add_argument("--registry", required=True)
    p.add_argument("--label-kind", default="uscore", choices=["iou", "uscore"])
    p.add_argument("--holdout", default="", help="comma-separated datasets to exclude from training")
    p.add_argument("--bands", default=None)
    p.add_argument("--rounds", type=int, default=200)
    p.add_argument("--max-depth", type=int, default=4)
    p.add_argument("--learning-rate", type=float, default=0.1)
    p.add_argument("--min-leaf", type=int, default=2)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_advisor_train)

    p = sub.add_parser("advisor-eval", help="ranking metrics on held-out groups")
    p.add_argument("--registry", required=True)
    p.add_argument("--ranker", required=True)
    p.add_argument("--label-kind", default="uscore", choices=["iou", "uscore"])
    p.add_argument("--holdout", required=True)
    p.add_argument("--ks", default="5,20")
    p.add_argument("--bands", default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_advisor_eval)

    p = sub.add_parser("advise", help="constraint-filtered model recommendations")
    p.add_argument("--registry", required=True)
    p.add_argument("--ranker", required=True)
    p.add_argument("--modality", required=True)
    p.add_argument("--scale", default=None, choices=["small", "large"])
    p.add_argument("--shape", default=None, choices=["irregular", "regular"])
    p.add_argument("--boundary", default=None, choices=["clear", "blur"])
    p.add_argument("--storage", default=None, help="largest acceptable storage bin")
    p.add_argument("--compute", default=None, help="largest acceptable compute bin")
    p.add_argument("--speed", default=None, help="slowest acceptable speed bin")
    p.add_argument("-k", type=int, default=10)
    p.add_argument("--label-kind", default="uscore", choices=["iou", "uscore"])
    p.add_argument("--bands", default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_advise)

    p = sub.add_parser("serve", help="read-only HTTP JSON API")
    p.add_argument("--registry", required=True)
    p.add_argument("--ranker", default=None, help="ranker JSON file, or a directory with iou.json/uscore.json")
    p.add_argument("--bands", default=None)
    p.add_argument("--ui", default=None, help="static directory to mount at / (the built explorer UI)")
    p.add_argument("--port", type=int, default=8765)
    p.set_defaults(func=_cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    _setup_logging()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else 2
    try:
        return args.func(args)
    except (IngestError, ValueError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
