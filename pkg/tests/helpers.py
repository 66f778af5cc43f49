"""Shared test utilities: hand-rolled oracles and tiny builders.

The linkage oracle deliberately recomputes everything from scratch at every
step with plain Python loops, so it shares no code path with the library.
"""
import struct

import numpy as np

from parcelsteer import SuperVoxel, TimeCourse


def make_sv(sv_id, samples, network_id=1, hemisphere="L", n_voxels=1, first_voxel=0):
    """A SuperVoxel with a given mean course and synthetic voxel indices."""
    return SuperVoxel(
        sv_id=sv_id,
        voxel_indices=np.arange(first_voxel, first_voxel + n_voxels),
        mean_tc=TimeCourse(samples=np.asarray(samples, dtype=np.float64), source_count=n_voxels),
        network_id=network_id,
        hemisphere=hemisphere,
    )


def oracle_linkage(square_d, ids=None):
    """Step-by-step max-linkage recomputed from scratch each round.

    Ties at exactly equal minimal distance go to the pair whose combined
    membership is lexicographically smallest as (min id, max id, full sorted
    membership). Returns (left, right, distance) with the usual cluster-id
    convention: items are 0..n-1, the k-th merge creates id n+k.
    """
    n = len(square_d)
    if ids is None:
        ids = list(range(n))
    members = {i: (int(ids[i]),) for i in range(n)}
    rows = {i: (i,) for i in range(n)}
    steps = []
    for k in range(n - 1):
        best = None
        for a in members:
            for b in members:
                if a >= b:
                    continue
                dist = max(square_d[i][j] for i in rows[a] for j in rows[b])
                union = tuple(sorted(members[a] + members[b]))
                key = (dist, union[0], union[-1], union)
                if best is None or key < best[0]:
                    best = (key, a, b)
        key, a, b = best
        steps.append((a, b, key[0]))
        new_id = n + k
        members[new_id] = tuple(sorted(members[a] + members[b]))
        rows[new_id] = rows[a] + rows[b]
        for gone in (a, b):
            del members[gone], rows[gone]
    return steps


def oracle_cut(square_d, ids, t):
    """Flat clusters from the oracle's merge sequence, threshold inclusive."""
    n = len(square_d)
    steps = oracle_linkage(square_d, ids)
    parent = list(range(n + len(steps)))

    def find(x):
        while parent[x] != x:
            x = parent[x]
        return x

    for k, (a, b, dist) in enumerate(steps):
        if dist <= t:
            parent[find(a)] = n + k
            parent[find(b)] = n + k
    groups = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return sorted(tuple(v) for v in groups.values())


def random_distance_matrix(rng, n, quantize=None):
    """Symmetric random distances in [0, 2]; quantize forces exact ties."""
    d = rng.uniform(0.0, 2.0, size=(n, n))
    if quantize:
        d = np.round(d * quantize) / quantize
    d = np.triu(d, k=1)
    d = d + d.T
    return d


def read_header_fields(path):
    """Decode the on-disk header with struct only (no library code)."""
    raw = open(path, "rb").read(352)
    return {
        "sizeof_hdr": struct.unpack_from("<i", raw, 0)[0],
        "dim": struct.unpack_from("<8h", raw, 40),
        "datatype": struct.unpack_from("<h", raw, 70)[0],
        "bitpix": struct.unpack_from("<h", raw, 72)[0],
        "pixdim": struct.unpack_from("<8f", raw, 76),
        "vox_offset": struct.unpack_from("<f", raw, 108)[0],
        "scl_slope": struct.unpack_from("<f", raw, 112)[0],
        "scl_inter": struct.unpack_from("<f", raw, 116)[0],
        "magic": raw[344:348],
    }


def write_nifti(path, dim, datatype, bitpix, payload, *, sizeof_hdr=348,
                magic=b"n+1\x00", vox_offset=352.0, scl=(0.0, 0.0), endian="<"):
    """Hand-build a NIfTI-1 file byte by byte for reader tests."""
    hdr = bytearray(348)
    struct.pack_into(endian + "i", hdr, 0, sizeof_hdr)
    struct.pack_into(endian + "8h", hdr, 40, *dim)
    struct.pack_into(endian + "2h", hdr, 70, datatype, bitpix)
    pixdim = [1.0] * 8
    struct.pack_into(endian + "8f", hdr, 76, *pixdim)
    struct.pack_into(endian + "f", hdr, 108, vox_offset)
    struct.pack_into(endian + "2f", hdr, 112, *scl)
    hdr[344:348] = magic
    pad = int(vox_offset) - 348 if vox_offset >= 348 else 4
    with open(path, "wb") as f:
        f.write(bytes(hdr))
        f.write(b"\x00" * pad)
        f.write(payload)
    return path
