"""
Driving the HTTP API
====================

The same engine behind a session-holding HTTP service. This walks the
comparison-and-merge flow a client would perform: create a session, build a
hierarchy, lock two parcels side by side, merge them, and watch every view
refresh under the new revision. Runs in-process via the test client; point
a real client at `parcelsteer serve` for the same endpoints over a socket.
"""
from fastapi.testclient import TestClient

from parcelsteer import SynthSpec, generate
from parcelsteer.server import Dataset, create_app

spec = SynthSpec(dims=(12, 8, 6), n_networks=2, clusters_per_network=2,
                 svs_per_cluster=3, timepoints=100, noise_sd=0.4, seed=12)
ds = generate(spec)
app = create_app(default_dataset=Dataset(ds.scan, ds.atlas, ds.meta))
client = TestClient(app)

body = client.post("/session", json={}).json()
sid = body["session_id"]
print(f"session {sid}: {body['n_supervoxels']} super-voxels, nt={body['nt']}")

doc = client.post(f"/session/{sid}/hierarchy", json={"threshold": 0.5}).json()
leaves = [n for n in doc["nodes"] if n["kind"] == "leaf"]
print(f"hierarchy at t=0.5: {doc['leaf_count']} parcels, revision {doc['revision']}")

# Lock two parcels for side-by-side comparison (the service allows at most
# two), then inspect one: banded time-course and its connectivity row.
a, b = leaves[0]["node_id"], leaves[1]["node_id"]
client.put(f"/session/{sid}/selection", json={"locked": [a, b]})
info = client.get(f"/session/{sid}/node/{a}").json()
row = {e["leaf_id"]: e["r"] for e in info["fc_row"]}
print(f"locked {a} and {b}; parcel {a} homogeneity {info['homogeneity']:.3f}, "
      f"r to {b} = {row[b]:+.3f}, r to itself = {row[a]:+.1f}")

# Merge b into a. The delta names removed and updated nodes, the locked set
# drops the vanished parcel, and the connectivity view reports the new
# revision immediately (reads always see acknowledged writes).
delta = client.post(f"/session/{sid}/merge",
                    json={"target_id": a, "source_id": b}).json()
print(f"merge applied: removed {delta['removed']}, "
      f"{delta['leaf_count']} parcels, revision {delta['revision']}")
print("selection after merge:", client.get(f"/session/{sid}/selection").json())

fc = client.get(f"/session/{sid}/fc", params={"lo": 0.3, "hi": 1.0}).json()
print(f"connectivity at revision {fc['revision']}: {len(fc['chords'])} chords "
      f"over {len(fc['parcel_order'])} parcels")

view = client.get(f"/session/{sid}/slice/axial/2", params={"highlight": a}).json()
flags = [c["leaf_id"] for c in view["contours"] if c["highlighted"]]
print(f"axial slice 2 shows {len(view['contours'])} contours; "
      f"highlighted parcels: {sorted(set(flags))}")

# The exported document restores the session elsewhere, byte for byte.
exported = client.get(f"/session/{sid}/export").json()
other = client.post("/session", json={}).json()["session_id"]
restored = client.post(f"/session/{other}/restore",
                       json={"document": exported["hierarchy"]}).json()
print("restored session matches export:", restored == exported["hierarchy"])
