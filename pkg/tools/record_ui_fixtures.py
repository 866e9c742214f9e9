"""Record API responses from the default generated bundle as UI test fixtures.

Run from the repo root:  python tools/record_ui_fixtures.py
"""

import json
import os

from fastapi.testclient import TestClient

from sherdcube.generator import default_manifest, generate
from sherdcube.server import create_app

TYPOLOGY_QUERY = (
    'MEASURE count(samples) WHERE dating.period = "Medieval" '
    'WHERE description CONTAINS "Zeuxippus" GROUP BY provenance AT country;'
)
STRICTO_QUERY = (
    'MEASURE count(samples) WHERE groups = "Zeuxippus Ware stricto sensu" '
    'GROUP BY provenance AT country;'
)
PIVOT_2D_QUERY = (
    "MEASURE count(facts) GROUP BY provenance AT country GROUP BY technique;"
)

OUT_DIR = os.path.join(os.path.dirname(__file__), "..", "frontend", "fixtures")


def main() -> None:
    client = TestClient(create_app())
    files, _ = generate(default_manifest())
    body = {"files": {k: v.decode("utf-8") for k, v in files.items()}, "name": "acceptance"}
    assert client.post("/datasets", json=body).status_code == 200

    def record(name: str, payload: dict) -> None:
        payload = dict(payload)
        payload.pop("elapsed_ms", None)  # nondeterministic
        path = os.path.join(OUT_DIR, name)
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, indent=2, ensure_ascii=False)
            fh.write("\n")
        print("wrote", path)

    record("metadata.json", client.get("/cubes/acceptance/metadata").json())
    record("query_typology.json",
           client.post("/cubes/acceptance/query", json={"cql": TYPOLOGY_QUERY}).json())
    record("query_stricto.json",
           client.post("/cubes/acceptance/query", json={"cql": STRICTO_QUERY}).json())
    record("query_pivot2d.json",
           client.post("/cubes/acceptance/query", json={"cql": PIVOT_2D_QUERY}).json())
    record("compare.json", client.get(
        "/cubes/acceptance/chart/compare",
        params={"left": TYPOLOGY_QUERY, "right": STRICTO_QUERY, "axis": "provenance.country"},
    ).json())
    record("error_syntax.json",
           client.post("/cubes/acceptance/query", json={"cql": "GROUP BY provenance;"}).json())
    with open(os.path.join(OUT_DIR, "queries.json"), "w", encoding="utf-8") as fh:
        json.dump({
            "typology": TYPOLOGY_QUERY,
            "stricto": STRICTO_QUERY,
            "pivot2d": PIVOT_2D_QUERY,
        }, fh, indent=2)
        fh.write("\n")
    print("wrote queries.json")


if __name__ == "__main__":
    main()
