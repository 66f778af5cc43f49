"""Synthetic dataset generator: determinism, planted correlations, layout."""
import json

import numpy as np
import pytest

from parcelsteer import SynthSpec, extract_supervoxels, generate, pairwise_r, write_dataset


def sv_matrix(spec):
    ds = generate(spec)
    svs = extract_supervoxels(ds.scan, ds.atlas, ds.meta)
    x = np.vstack([sv.mean_tc.samples for sv in sorted(svs, key=lambda s: s.sv_id)])
    return ds, x


def test_same_seed_same_bytes(tmp_path):
    spec = SynthSpec(dims=(12, 8, 6), timepoints=40, seed=3, svs_per_cluster=2,
                     clusters_per_network=2)
    a = tmp_path / "a"
    b = tmp_path / "b"
    write_dataset(spec, a)
    write_dataset(spec, b)
    for name in ("scan.nii", "atlas.nii", "meta.tsv", "truth.json"):
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_different_seed_different_scan(tmp_path):
    base = dict(dims=(12, 8, 6), timepoints=40, svs_per_cluster=2, clusters_per_network=2)
    a = tmp_path / "a"
    b = tmp_path / "b"
    write_dataset(SynthSpec(seed=1, **base), a)
    write_dataset(SynthSpec(seed=2, **base), b)
    assert (a / "scan.nii").read_bytes() != (b / "scan.nii").read_bytes()
    # the atlas only depends on the layout, not the seed
    assert (a / "atlas.nii").read_bytes() == (b / "atlas.nii").read_bytes()


def test_noiseless_within_cluster_r_is_exactly_one():
    spec = SynthSpec(dims=(12, 8, 6), noise_sd=0.0, timepoints=50, seed=5,
                     clusters_per_network=2, svs_per_cluster=3)
    ds, x = sv_matrix(spec)
    r, degenerate = pairwise_r(x)
    assert not degenerate.any()
    cluster_of = ds.truth["cluster_of_label"]
    n = x.shape[0]
    for i in range(n):
        for j in range(i + 1, n):
            if cluster_of[str(i + 1)] == cluster_of[str(j + 1)]:
                assert r[i, j] == 1.0


def test_planted_correlations_match_design():
    spec = SynthSpec(dims=(24, 12, 12), noise_sd=0.5, timepoints=200, seed=0)
    ds, x = sv_matrix(spec)
    r, _ = pairwise_r(x)
    cluster_of = ds.truth["cluster_of_label"]
    n = x.shape[0]
    within, between = [], []
    for i in range(n):
        for j in range(i + 1, n):
            same = cluster_of[str(i + 1)] == cluster_of[str(j + 1)]
            (within if same else between).append(r[i, j])
    assert abs(np.mean(within) - spec.within_r) < 0.05
    assert abs(np.mean(between) - spec.between_r) < 0.05
    # the separating threshold actually separates the two populations
    assert 1.0 - max(within) < spec.separating_threshold < 1.0 - max(between)


def test_truth_document_layout(small_spec, small_dataset):
    truth = small_dataset.truth
    n = small_spec.n_networks * small_spec.clusters_per_network * small_spec.svs_per_cluster
    assert truth["n_supervoxels"] == n
    assert sorted(int(k) for k in truth["cluster_of_label"]) == list(range(1, n + 1))
    # labels are dense per cluster: svs_per_cluster consecutive labels share one
    for label, cluster in truth["cluster_of_label"].items():
        want = (int(label) - 1) // small_spec.svs_per_cluster + 1
        assert cluster == want
    for label, net in truth["network_of_label"].items():
        per_net = small_spec.clusters_per_network * small_spec.svs_per_cluster
        assert net == (int(label) - 1) // per_net + 1
    assert truth["spec"] == small_spec.to_doc()


def test_odd_networks_left_even_networks_right(small_dataset):
    labels = small_dataset.atlas.labels
    nx = labels.shape[0]
    net_of = {e.label_id: e.network_id for e in small_dataset.meta.entries}
    hemi_of = {e.label_id: e.hemisphere for e in small_dataset.meta.entries}
    for label in np.unique(labels):
        if label == 0:
            continue
        xs = np.argwhere(labels == label)[:, 0]
        if net_of[int(label)] % 2 == 1:
            assert hemi_of[int(label)] == "L"
            assert xs.max() < nx // 2
        else:
            assert hemi_of[int(label)] == "R"
            assert xs.min() >= nx // 2


def test_every_label_occupies_a_block(small_dataset):
    labels = small_dataset.atlas.labels
    for label in np.unique(labels):
        if label == 0:
            continue
        where = np.argwhere(labels == label)
        lo = where.min(axis=0)
        hi = where.max(axis=0)
        block = labels[lo[0] : hi[0] + 1, lo[1] : hi[1] + 1, lo[2] : hi[2] + 1]
        assert np.all(block == label)


def test_scan_types_and_shapes(small_spec, small_dataset):
    assert small_dataset.scan.data.dtype == np.float32
    assert small_dataset.scan.data.shape == small_spec.dims + (small_spec.timepoints,)
    assert small_dataset.atlas.labels.shape == small_spec.dims
    assert np.all(np.isfinite(small_dataset.scan.data))


def test_spec_doc_round_trip(small_spec):
    assert SynthSpec.from_doc(small_spec.to_doc()) == small_spec


def test_spec_rejects_unknown_fields():
    with pytest.raises(ValueError):
        SynthSpec.from_doc({"n_networks": 2, "smoothing": 3})


@pytest.mark.parametrize(
    "kw",
    [
        {"dims": (0, 4, 4)},
        {"dims": (4, 4)},
        {"timepoints": 1},
        {"noise_sd": -0.1},
        {"n_networks": 0},
        {"clusters_per_network": 0},
        {"svs_per_cluster": 0},
    ],
)
def test_spec_rejects_bad_values(kw):
    with pytest.raises(ValueError):
        SynthSpec(**kw)


def test_generate_rejects_dims_too_small():
    with pytest.raises(ValueError):
        generate(SynthSpec(dims=(2, 2, 2), n_networks=4, clusters_per_network=4))


def test_write_dataset_manifest(tmp_path):
    spec = SynthSpec(dims=(12, 8, 6), timepoints=30, seed=9, svs_per_cluster=2,
                     clusters_per_network=2)
    manifest = write_dataset(spec, tmp_path / "ds")
    assert set(manifest) == {"scan", "atlas", "meta", "truth"}
    truth = json.loads(open(manifest["truth"]).read())
    assert truth["spec"] == spec.to_doc()
    from parcelsteer import load_atlas, load_timeseries

    scan = load_timeseries(manifest["scan"])
    atlas, meta = load_atlas(manifest["atlas"], manifest["meta"])
    svs = extract_supervoxels(scan, atlas, meta)
    assert len(svs) == truth["n_supervoxels"]
