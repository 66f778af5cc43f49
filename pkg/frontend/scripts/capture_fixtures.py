"""Capture HTTP fixtures for the frontend test suite.

Runs the real parcelsteer server in-process against a small synthetic
dataset and records the JSON bodies the UI consumes: the tree document,
node detail for the two parcels the merge-flow test locks, connectivity
payloads before and after that merge, and one slice per plane. The
frontend tests replay these files through a stubbed fetch, so `npm test`
needs no Python service.

Re-run from the frontend directory after any server schema change:

    python3 scripts/capture_fixtures.py
"""
import json
import tempfile
from pathlib import Path

from fastapi.testclient import TestClient

from parcelsteer import server, synth

FIXTURES = Path(__file__).resolve().parent.parent / "tests" / "fixtures"

SPEC = synth.SynthSpec(
    dims=(12, 8, 6),
    n_networks=2,
    clusters_per_network=2,
    timepoints=60,
    noise_sd=0.3,
    seed=7,
    svs_per_cluster=3,
)
INIT_THRESHOLD = 0.6


def save(name: str, payload) -> None:
    path = FIXTURES / name
    path.write_text(json.dumps(payload, indent=2) + "\n")
    print(f"wrote {path.relative_to(Path.cwd())}")


def main() -> None:
    FIXTURES.mkdir(parents=True, exist_ok=True)
    with tempfile.TemporaryDirectory() as tmp:
        paths = synth.write_dataset(SPEC, Path(tmp))
        dataset = server.load_dataset(paths["scan"], paths["atlas"], paths["meta"])
    client = TestClient(server.create_app(default_dataset=dataset))

    session = client.post("/session", json={}).json()
    sid = session["session_id"]
    save("session.json", session)

    doc = client.post(
        f"/session/{sid}/hierarchy", json={"threshold": INIT_THRESHOLD}
    ).json()
    save("hierarchy.json", doc)

    # the merge-flow test locks the first two parcels of one network
    by_id = {n["node_id"]: n for n in doc["nodes"]}
    network = next(
        n
        for n in doc["nodes"]
        if n["kind"] == "network"
        and sum(by_id[c]["kind"] == "leaf" for c in n["children"]) >= 2
    )
    m1, m2 = [c for c in network["children"] if by_id[c]["kind"] == "leaf"][:2]

    save("node_m1.json", client.get(f"/session/{sid}/node/{m1}").json())
    save("node_m2.json", client.get(f"/session/{sid}/node/{m2}").json())

    save("fc_pre.json", client.get(f"/session/{sid}/fc?lo=0.0&hi=1.0").json())
    save("fc_filtered.json", client.get(f"/session/{sid}/fc?lo=0.25&hi=1.0").json())

    dims = session["dims"]
    indices = {plane: dims[axis] // 2 for plane, axis in
               (("sagittal", 0), ("coronal", 1), ("axial", 2))}
    for plane, index in indices.items():
        save(
            f"slice_{plane}_pre.json",
            client.get(f"/session/{sid}/slice/{plane}/{index}").json(),
        )

    # one slice with a highlighted contour, for the black-stroke check
    axial = json.loads((FIXTURES / "slice_axial_pre.json").read_text())
    present = [c["leaf_id"] for c in axial["contours"]]
    highlight = m1 if m1 in present else present[0]
    resp = client.get(
        f"/session/{sid}/slice/axial/{indices['axial']}?highlight={highlight}"
    ).json()
    assert any(c["highlighted"] for c in resp["contours"])
    save("slice_highlight.json", resp)

    client.put(f"/session/{sid}/selection", json={"locked": [m1]})
    client.put(f"/session/{sid}/selection", json={"locked": [m1, m2]})
    delta = client.post(
        f"/session/{sid}/merge", json={"target_id": m1, "source_id": m2}
    ).json()
    save("merge_delta.json", delta)

    save("node_m1_post.json", client.get(f"/session/{sid}/node/{m1}").json())
    save("fc_post.json", client.get(f"/session/{sid}/fc?lo=0.0&hi=1.0").json())
    for plane, index in indices.items():
        save(
            f"slice_{plane}_post.json",
            client.get(f"/session/{sid}/slice/{plane}/{index}").json(),
        )

    save(
        "meta.json",
        {
            "m1": m1,
            "m2": m2,
            "init_threshold": INIT_THRESHOLD,
            "dims": dims,
            "nt": session["nt"],
            "slice_indices": indices,
            "highlight_leaf": highlight,
            "filtered_lo": 0.25,
            "post_revision": delta["revision"],
        },
    )


if __name__ == "__main__":
    main()
