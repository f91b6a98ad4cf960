#!/usr/bin/env python3
"""Record live service responses into frontend/fixtures/ for the UI
contract tests.

Drives the real session service over the golden one-city dataset through a
create -> three turns -> reads sequence, plus a real 422 and a real 409.
"""

from __future__ import annotations

import json
import sys
import tempfile
import threading
from pathlib import Path

from fastapi.testclient import TestClient

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT))

from triplan import load_dataset, query_to_dict  # noqa: E402
from triplan.service import create_app  # noqa: E402
from tests.fixtures import myrtle_dataset, myrtle_query  # noqa: E402

OUT = ROOT / "frontend" / "fixtures"


def dump(name: str, payload) -> None:
    OUT.mkdir(parents=True, exist_ok=True)
    (OUT / f"{name}.json").write_text(json.dumps(payload, indent=2) + "\n")
    print(f"wrote {name}.json")


def record_409(client: TestClient, session_id: str, query: dict) -> dict:
    import triplan.service as service_mod
    from unittest import mock

    original = service_mod.run_turn
    gate, release = threading.Event(), threading.Event()

    def slow(state, q, cfg=None):
        gate.set()
        release.wait(timeout=10)
        return original(state, q, cfg)

    holder = {}
    with mock.patch.object(service_mod, "run_turn", slow):
        def first():
            holder["first"] = client.post(f"/sessions/{session_id}/turns",
                                          json={"query": query})

        thread = threading.Thread(target=first)
        thread.start()
        assert gate.wait(timeout=10)
        second = client.post(f"/sessions/{session_id}/turns", json={"query": query})
        release.set()
        thread.join(timeout=30)
    assert second.status_code == 409, second.status_code
    return {"status": second.status_code, "body": second.json()}


def main() -> int:
    with tempfile.TemporaryDirectory() as td:
        sandbox = load_dataset(myrtle_dataset(Path(td)))
        client = TestClient(create_app(sandbox))
        query = query_to_dict(myrtle_query())

        created = client.post("/sessions", json={"query": query})
        assert created.status_code == 201, created.text
        handle = created.json()
        dump("session", handle)
        sid = handle["id"]

        turn1 = client.post(f"/sessions/{sid}/turns", json={"query": query})
        assert turn1.status_code == 200, turn1.text
        dump("turn1", turn1.json())

        turn2 = client.post(f"/sessions/{sid}/turns", json={
            "patches": [{"op": "modify", "field": "budget", "value": 1000}]})
        assert turn2.status_code == 200, turn2.text
        dump("turn2", turn2.json())

        turn3 = client.post(f"/sessions/{sid}/turns", json={
            "patches": [{"op": "add", "field": "prefs.cuisines", "value": "Italian"}]})
        assert turn3.status_code == 200, turn3.text
        dump("turn3", turn3.json())

        dump("plan", client.get(f"/sessions/{sid}/plan").json())
        dump("trace", client.get(f"/sessions/{sid}/trace").json())
        dump("constraints", client.get(f"/sessions/{sid}/constraints").json())
        dump("query", query)

        bad = client.post(f"/sessions/{sid}/turns", json={
            "patches": [{"op": "modify", "field": "bogus-field", "value": 1}]})
        assert bad.status_code == 422
        dump("error_422", {"status": bad.status_code, "body": bad.json()})

        dump("error_409", record_409(client, sid, query))

        after = client.get(f"/sessions/{sid}/plan")
        assert after.status_code == 200
        dump("plan_after_errors", after.json())
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
