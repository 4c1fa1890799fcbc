"""Capture real API payloads for the frontend test suite.

Boots the service over the shipped fixture registry (training small
rankers for both relevance kinds) and snapshots a set of responses into
frontend/tests/fixtures/api.json, so the UI tests run against genuine
server bodies rather than hand-written approximations.

Usage: python3 tools/capture_api_fixtures.py
"""

import json
import tempfile
from pathlib import Path

from fastapi.testclient import TestClient

from zooscore.cli import main as cli_main
from zooscore.service import ServiceState, create_app

ROOT = Path(__file__).resolve().parent.parent
REGISTRY = ROOT / "fixtures" / "registry"
OUT = ROOT / "frontend" / "tests" / "fixtures" / "api.json"


def capture() -> dict:
    with tempfile.TemporaryDirectory() as tmp:
        rankers = Path(tmp) / "rankers"
        rankers.mkdir()
        for kind in ("iou", "uscore"):
            code = cli_main(
                [
                    "advisor-train", "--registry", str(REGISTRY), "--label-kind", kind,
                    "--holdout", "BUSI,SkinCancer", "--rounds", "30",
                    "--out", str(rankers / f"{kind}.json"),
                ]
            )
            assert code == 0
        client = TestClient(create_app(ServiceState(str(REGISTRY), str(rankers))))

        payloads: dict = {}
        for metric in ("iou", "uscore"):
            for scope in ("source", "target"):
                response = client.get("/api/v1/leaderboard", params={"metric": metric, "scope": scope})
                response.raise_for_status()
                payloads[f"leaderboard_{metric}_{scope}"] = response.json()
        payloads["datasets"] = client.get("/api/v1/datasets").json()
        payloads["models"] = client.get("/api/v1/models").json()

        def advise(name: str, body: dict) -> None:
            response = client.post("/api/v1/advise", json=body)
            response.raise_for_status()
            payloads[name] = {"request": body, "response": response.json()}

        base = {"modality": "Ultrasound", "scale": "small", "shape": "irregular", "boundary": "blur", "k": 100}
        for kind in ("iou", "uscore"):
            advise(f"advise_{kind}_open", {**base, "label_kind": kind, "constraints": {}})
        for cap in ("Large", "Medium", "Small", "Tiny"):
            advise(f"advise_uscore_storage_{cap}", {**base, "label_kind": "uscore", "constraints": {"storage": cap}})
        for cap in ("High", "Medium", "Low"):
            advise(f"advise_uscore_compute_{cap}", {**base, "label_kind": "uscore", "constraints": {"compute": cap}})
        for floor in ("Slow", "Medium", "Fast"):
            advise(f"advise_uscore_speed_{floor}", {**base, "label_kind": "uscore", "constraints": {"speed": floor}})
        return payloads


if __name__ == "__main__":
    OUT.parent.mkdir(parents=True, exist_ok=True)
    OUT.write_text(json.dumps(capture(), sort_keys=True, indent=1) + "\n")
    print(f"wrote {OUT} ({OUT.stat().st_size} bytes)")
