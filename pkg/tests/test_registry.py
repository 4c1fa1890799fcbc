import json

import pytest

from zooscore.registry import (
    DatasetCard,
    DuplicateNameError,
    EvaluationRecord,
    IngestError,
    ModelCard,
    Registry,
    UnknownNameError,
    canonical_scope,
    ingest_model_cards,
    ingest_records,
    resolve_transfers,
    snapshot_from_document,
)

UNET = {
    "name": "U-Net", "family": "CNN", "year": 2015, "venue": "MICCAI",
    "deep_supervision": False, "pretrained": False,
    "params_m": 34.53, "flops_g": 65.52, "fps": 137.05,
}


def small_registry():
    reg = Registry()
    reg.add_model(ModelCard("U-Net", "CNN", 2015, "MICCAI", False, False, 34.53, 65.52, 137.05))
    reg.add_model(ModelCard("UNeXt", "CNN", 2022, "MICCAI", False, False, 1.47, 0.57, 256.68))
    reg.add_dataset(DatasetCard("BUSI", "Ultrasound", "source"))
    reg.add_dataset(DatasetCard("BUS", "Ultrasound", "target"))
    reg.add_transfer("BUSI", "BUS")
    return reg


def test_ingest_model_cards_single():
    cards = ingest_model_cards(json.dumps([UNET]))
    assert len(cards) == 1
    card = cards[0]
    assert (card.name, card.family, card.params, card.flops, card.fps) == ("U-Net", "CNN", 34.53, 65.52, 137.05)


def test_ingest_model_cards_empty():
    assert ingest_model_cards(b"[]") == []


def test_ingest_model_cards_duplicate_name():
    with pytest.raises(DuplicateNameError, match="U-Net"):
        ingest_model_cards(json.dumps([UNET, UNET]))


def test_ingest_model_cards_nonpositive_resource():
    bad = dict(UNET, params_m=0.0)
    with pytest.raises(IngestError, match="params"):
        ingest_model_cards(json.dumps([bad]))


def test_ingest_model_cards_parse_error_location():
    with pytest.raises(IngestError, match="line"):
        ingest_model_cards(b'[{"name": "x",]')


def test_ingest_model_cards_unknown_family():
    with pytest.raises(IngestError, match="family"):
        ingest_model_cards(json.dumps([dict(UNET, family="GAN")]))


def test_ingest_records_mean_recomputed():
    reg = small_registry()
    csv_data = "model,dataset,scope,sample_index,iou\n" + "".join(
        f"U-Net,BUSI,in_domain,{i},{v}\n" for i, v in enumerate([0.6, 0.7, 0.7])
    )
    ingest_records(csv_data, reg)
    record = reg.snapshot().records[0]
    assert record.mean_iou == pytest.approx(0.666667, abs=1e-6)
    assert record.sample_ious == (0.6, 0.7, 0.7)


def test_ingest_records_unknown_model():
    reg = small_registry()
    with pytest.raises(UnknownNameError, match="Foo"):
        ingest_records("model,dataset,scope,sample_index,iou\nFoo,BUSI,in_domain,0,0.5\n", reg)


def test_ingest_records_iou_out_of_range():
    reg = small_registry()
    with pytest.raises(IngestError, match=r"outside \[0, 1\]"):
        ingest_records("model,dataset,scope,sample_index,iou\nU-Net,BUSI,in_domain,0,1.5\n", reg)


def test_ingest_records_mean_mismatch():
    reg = small_registry()
    records = "model,dataset,scope,sample_index,iou\nU-Net,BUSI,in_domain,0,0.6\nU-Net,BUSI,in_domain,1,0.8\n"
    means = "model,dataset,scope,mean_iou\nU-Net,BUSI,in_domain,0.75\n"
    with pytest.raises(IngestError, match="differs from recomputed mean"):
        ingest_records(records, reg, means=means)


def test_ingest_records_mean_only_accepted():
    reg = small_registry()
    ingest_records(
        "model,dataset,scope,sample_index,iou\n",
        reg,
        means="model,dataset,scope,mean_iou\nU-Net,BUSI,in_domain,0.6558\n",
    )
    record = reg.snapshot().records[0]
    assert record.sample_ious == () and record.mean_iou == 0.6558


def test_zero_shot_row_loads_nine_records(benchmark_snapshot):
    records = [r for r in benchmark_snapshot.records if r.model == "RWKV-UNet" and r.scope == "zero_shot"]
    assert len(records) == 9
    assert {(r.source, r.dataset) for r in records} >= {("BUSI", "BUS"), ("BUSBRA", "BUS"), ("Kvasir", "CVC300")}


def test_zero_shot_requires_transfer_target():
    reg = small_registry()
    reg.add_dataset(DatasetCard("TNSCUI", "Ultrasound", "source"))
    with pytest.raises(IngestError, match="transfer map"):
        reg.add_record(EvaluationRecord("U-Net", "TNSCUI", "zero_shot", mean_iou=0.5))


def test_resolve_transfers_one_source_many_targets():
    reg = Registry()
    for name in ("Kvasir",):
        reg.add_dataset(DatasetCard(name, "Endoscopy", "source"))
    for name in ("CVC300", "CVC-ClinicDB"):
        reg.add_dataset(DatasetCard(name, "Endoscopy", "target"))
    pairs = resolve_transfers("source,target\nKvasir,CVC300\nKvasir,CVC-ClinicDB\n", reg)
    assert len(pairs) == 2


def test_resolve_transfers_role_violation():
    reg = small_registry()
    with pytest.raises(IngestError, match="role"):
        resolve_transfers("source,target\nBUS,BUSI\n", reg)


def test_resolve_transfers_empty():
    assert resolve_transfers("source,target\n", small_registry()) == []


def test_snapshot_digest_deterministic():
    a = small_registry().snapshot()
    b = small_registry().snapshot()
    assert a.digest == b.digest


def test_snapshot_digest_sensitive_to_mean():
    reg = small_registry()
    ingest_records("model,dataset,scope,sample_index,iou\n", reg, means="model,dataset,scope,mean_iou\nU-Net,BUSI,in_domain,0.5\n")
    base = reg.snapshot().digest
    reg2 = small_registry()
    ingest_records("model,dataset,scope,sample_index,iou\n", reg2, means="model,dataset,scope,mean_iou\nU-Net,BUSI,in_domain,0.501\n")
    assert reg2.snapshot().digest != base


def test_snapshot_empty_registry():
    digest = Registry().snapshot().digest
    assert digest == Registry().snapshot().digest and len(digest) == 64


def test_snapshot_order_independent():
    reg = Registry()
    reg.add_model(ModelCard("B", "CNN", 2020, "x", False, False, 1, 1, 1))
    reg.add_model(ModelCard("A", "CNN", 2020, "x", False, False, 1, 1, 1))
    reg2 = Registry()
    reg2.add_model(ModelCard("A", "CNN", 2020, "x", False, False, 1, 1, 1))
    reg2.add_model(ModelCard("B", "CNN", 2020, "x", False, False, 1, 1, 1))
    assert reg.snapshot().canonical_bytes() == reg2.snapshot().canonical_bytes()


def test_round_trip_document(benchmark_snapshot):
    doc = benchmark_snapshot.to_document()
    again = snapshot_from_document(json.loads(json.dumps(doc)))
    assert again == benchmark_snapshot
    assert again.digest == benchmark_snapshot.digest


def test_failed_batch_leaves_registry_unchanged():
    reg = small_registry()
    good_then_bad = (
        "model,dataset,scope,sample_index,iou\n"
        "U-Net,BUSI,in_domain,0,0.5\n"
        "Foo,BUSI,in_domain,0,0.5\n"
    )
    with pytest.raises(UnknownNameError):
        ingest_records(good_then_bad, reg)
    assert reg.records == {}


def test_duplicate_record_rejected():
    reg = small_registry()
    reg.add_record(EvaluationRecord("U-Net", "BUSI", "in_domain", mean_iou=0.5))
    with pytest.raises(DuplicateNameError):
        reg.add_record(EvaluationRecord("U-Net", "BUSI", "in_domain", mean_iou=0.6))


def test_canonical_scope_spellings():
    assert canonical_scope("source") == "in_domain"
    assert canonical_scope("target") == "zero_shot"
    assert canonical_scope("Zero-Shot") == "zero_shot"
    with pytest.raises(IngestError):
        canonical_scope("sideways")
