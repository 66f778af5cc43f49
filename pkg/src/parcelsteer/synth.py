"""Synthetic scan generator with planted cluster structure.

Builds a desk-scale volume whose ground truth is known exactly: every
planted cluster has one latent course and its member voxels are that latent
plus independent noise, so within- and between-cluster correlations have
closed-form design values.

The model: latents are temporally smoothed, standardized white noise. Each
cluster's latent is g_c = sqrt(rho) * h + sqrt(1 - rho) * u_c with one
shared course h, giving cross-cluster correlation rho between latents. A
voxel in a supervoxel of v voxels is g_c plus Gaussian noise of sd
noise_sd * sqrt(v), so the supervoxel MEAN course carries noise of sd
noise_sd exactly, independent of v. Design values for supervoxel mean
courses follow:

    within-cluster  r = 1 / (1 + noise_sd**2)
    between-cluster r = rho / (1 + noise_sd**2)

so noise_sd = 0.5 plants within r = 0.8, and rho = 0.125 puts between r at
0.1. With noise_sd = 0 all courses in a cluster are identical and within r
is exactly 1.

Spatially, odd networks go to the left hemisphere (low x), even to the
right; each network owns a z-slab of its hemisphere, split along y into
cluster blocks, each split along x into supervoxel blocks. Labels are
consecutive from 1 in (network, cluster, supervoxel) order.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .volume_io import (
    AtlasEntry,
    AtlasMeta,
    AtlasVolume,
    TimeSeriesVolume,
    save_atlas_meta,
    save_label_volume,
    save_timeseries,
)

CROSS_CLUSTER_RHO = 0.125
SMOOTH_SD = 2.0


@dataclass(frozen=True)
class SynthSpec:
    """Generator parameters; identical spec and seed give identical files."""

    dims: tuple = (24, 12, 12)
    n_networks: int = 2
    clusters_per_network: int = 4
    timepoints: int = 200
    noise_sd: float = 0.5
    seed: int = 0
    svs_per_cluster: int = 5

    def __post_init__(self):
        if len(self.dims) != 3 or any(int(d) < 1 for d in self.dims):
            raise ValueError("dims must be three positive extents")
        for name in ("n_networks", "clusters_per_network", "timepoints", "svs_per_cluster"):
            if int(getattr(self, name)) < 1:
                raise ValueError(f"{name} must be positive")
        if self.timepoints < 2:
            raise ValueError("timepoints must be at least 2")
        if self.noise_sd < 0:
            raise ValueError("noise_sd must be non-negative")

    @property
    def within_r(self) -> float:
        return 1.0 / (1.0 + self.noise_sd**2)

    @property
    def between_r(self) -> float:
        return CROSS_CLUSTER_RHO * self.within_r

    @property
    def separating_threshold(self) -> float:
        """Midpoint between the designed within and between distances."""
        return ((1.0 - self.within_r) + (1.0 - self.between_r)) / 2.0

    @classmethod
    def from_doc(cls, doc: dict) -> "SynthSpec":
        known = {f for f in cls.__dataclass_fields__}
        extra = set(doc) - known
        if extra:
            raise ValueError(f"unknown spec fields: {sorted(extra)}")
        if "dims" in doc:
            doc = dict(doc, dims=tuple(int(d) for d in doc["dims"]))
        return cls(**doc)

    def to_doc(self) -> dict:
        return {
            "dims": [int(d) for d in self.dims],
            "n_networks": int(self.n_networks),
            "clusters_per_network": int(self.clusters_per_network),
            "timepoints": int(self.timepoints),
            "noise_sd": float(self.noise_sd),
            "seed": int(self.seed),
            "svs_per_cluster": int(self.svs_per_cluster),
        }


@dataclass
class SynthResult:
    scan: TimeSeriesVolume
    atlas: AtlasVolume
    meta: AtlasMeta
    truth: dict = field(default_factory=dict)


def _smooth_standardized(rng: np.random.Generator, nt: int) -> np.ndarray:
    """Temporally smoothed white noise with sample mean 0 and sd 1."""
    radius = int(3 * SMOOTH_SD)
    taps = np.exp(-0.5 * (np.arange(-radius, radius + 1) / SMOOTH_SD) ** 2)
    taps /= taps.sum()
    x = np.convolve(rng.standard_normal(nt + 2 * radius), taps, mode="valid")
    x = x - x.mean()
    sd = x.std()
    if sd == 0.0:
        x = np.zeros(nt)
        x[0] = 1.0
        x -= x.mean()
        sd = x.std()
    return x / sd


def _split_extent(extent: int, parts: int):
    """Contiguous (start, stop) ranges covering [0, extent) as evenly as possible."""
    bounds = np.linspace(0, extent, parts + 1).round().astype(int)
    return [(int(bounds[i]), int(bounds[i + 1])) for i in range(parts)]


def generate(spec: SynthSpec) -> SynthResult:
    """Build scan, atlas, meta and the ground-truth document in memory."""
    nx, ny, nz = (int(d) for d in spec.dims)
    nt = int(spec.timepoints)
    n_net = int(spec.n_networks)
    n_clu = int(spec.clusters_per_network)
    n_sv = int(spec.svs_per_cluster)

    hemi_of = {net: ("L" if net % 2 == 1 else "R") for net in range(1, n_net + 1)}
    nets_left = [n for n in range(1, n_net + 1) if hemi_of[n] == "L"]
    nets_right = [n for n in range(1, n_net + 1) if hemi_of[n] == "R"]
    if nets_right and nx < 2:
        raise ValueError("dims too small to hold two hemispheres")
    x_split = nx // 2 if nets_right else nx
    hemi_x = {"L": (0, x_split), "R": (x_split, nx)}

    for hemi, nets in (("L", nets_left), ("R", nets_right)):
        if not nets:
            continue
        x0, x1 = hemi_x[hemi]
        if nz < len(nets) or ny < n_clu or (x1 - x0) < n_sv:
            raise ValueError(
                "dims too small for the requested networks/clusters/supervoxels"
            )

    rng = np.random.default_rng(int(spec.seed))
    shared = _smooth_standardized(rng, nt)

    labels3d = np.zeros((nx, ny, nz), dtype=np.int32)
    data = np.zeros((nx, ny, nz, nt), dtype=np.float64)
    entries = []
    truth_cluster = {}
    truth_network = {}
    label = 0
    w_shared = np.sqrt(CROSS_CLUSTER_RHO)
    w_own = np.sqrt(1.0 - CROSS_CLUSTER_RHO)

    for net in range(1, n_net + 1):
        hemi = hemi_of[net]
        x0, x1 = hemi_x[hemi]
        slot = (nets_left if hemi == "L" else nets_right).index(net)
        z0, z1 = _split_extent(nz, len(nets_left if hemi == "L" else nets_right))[slot]
        for clu, (y0, y1) in enumerate(_split_extent(ny, n_clu), start=1):
            latent = w_shared * shared + w_own * _smooth_standardized(rng, nt)
            for sv, (sx0, sx1) in enumerate(_split_extent(x1 - x0, n_sv), start=1):
                label += 1
                block = (
                    slice(x0 + sx0, x0 + sx1),
                    slice(y0, y1),
                    slice(z0, z1),
                )
                v = (sx1 - sx0) * (y1 - y0) * (z1 - z0)
                if v == 0:
                    raise ValueError("dims too small: an empty supervoxel block")
                labels3d[block] = label
                voxel_sd = spec.noise_sd * np.sqrt(v)
                noise = voxel_sd * rng.standard_normal((sx1 - sx0, y1 - y0, z1 - z0, nt))
                data[block] = latent + noise
                entries.append(
                    AtlasEntry(
                        label_id=label,
                        name=f"N{net}-C{clu}-S{sv}",
                        network_id=net,
                        hemisphere=hemi,
                    )
                )
                truth_cluster[label] = (net - 1) * n_clu + clu
                truth_network[label] = net

    scan = TimeSeriesVolume(data=data.astype(np.float32))
    atlas = AtlasVolume(labels=labels3d)
    meta = AtlasMeta(entries=tuple(entries))
    truth = {
        "spec": spec.to_doc(),
        "design": {
            "within_r": float(spec.within_r),
            "between_r": float(spec.between_r),
            "cross_cluster_rho": CROSS_CLUSTER_RHO,
            "separating_threshold": float(spec.separating_threshold),
        },
        "n_supervoxels": label,
        "cluster_of_label": {str(k): int(v) for k, v in truth_cluster.items()},
        "network_of_label": {str(k): int(v) for k, v in truth_network.items()},
    }
    return SynthResult(scan=scan, atlas=atlas, meta=meta, truth=truth)


def write_dataset(spec: SynthSpec, out_dir) -> dict:
    """Generate and write scan.nii, atlas.nii, meta.tsv and truth.json.

    Returns a manifest of the written paths plus the ground-truth document.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    result = generate(spec)
    paths = {
        "scan": out / "scan.nii",
        "atlas": out / "atlas.nii",
        "meta": out / "meta.tsv",
        "truth": out / "truth.json",
    }
    save_timeseries(result.scan, paths["scan"])
    save_label_volume(result.atlas, paths["atlas"])
    save_atlas_meta(result.meta, paths["meta"])
    paths["truth"].write_text(json.dumps(result.truth, indent=2, sort_keys=True) + "\n")
    return {name: str(p) for name, p in paths.items()}
