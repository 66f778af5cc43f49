"""Command line entry points: serve the API, headless init, synthetic data.

Thresholds given on the command line are correlation distances (1 - r), so
the valid range is 0 to 2: 0 keeps every super-voxel separate, 2 collapses
each (hemisphere, network) group into a single parcel.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import engine, server, synth, volume_io
from .errors import ParcelSteerError


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="parcelsteer",
        description="interactive fMRI parcellation: API server, headless "
        "initialization, and synthetic dataset generation",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    serve_p = sub.add_parser("serve", help="load a dataset and serve the HTTP API")
    serve_p.add_argument("--scan", required=True, help="4-D time-series volume (.nii)")
    serve_p.add_argument("--atlas", required=True, help="3-D label volume (.nii)")
    serve_p.add_argument("--meta", required=True, help="label table (.tsv)")
    serve_p.add_argument("--host", default="127.0.0.1", help="bind address")
    serve_p.add_argument("--port", type=int, default=8000, help="bind port")
    serve_p.add_argument(
        "--data-root",
        default=None,
        help="base directory for relative paths in POST /session "
        f"(default: ${server.DATA_ROOT_ENV} or the working directory)",
    )

    init_p = sub.add_parser(
        "init", help="initialize a hierarchy headlessly and export it"
    )
    init_p.add_argument("--scan", required=True, help="4-D time-series volume (.nii)")
    init_p.add_argument("--atlas", required=True, help="3-D label volume (.nii)")
    init_p.add_argument("--meta", required=True, help="label table (.tsv)")
    init_p.add_argument(
        "--threshold",
        type=float,
        required=True,
        help="clustering threshold in correlation-distance units, range 0-2",
    )
    init_p.add_argument(
        "--out", required=True, help="output directory for parcellation.nii + hierarchy.json"
    )

    synth_p = sub.add_parser(
        "synth", help="generate a synthetic dataset with known cluster structure"
    )
    synth_p.add_argument(
        "--spec",
        default=None,
        help="JSON file of generator parameters (dims, n_networks, "
        "clusters_per_network, svs_per_cluster, timepoints, noise_sd, seed); "
        "defaults are used when omitted",
    )
    synth_p.add_argument(
        "--out", required=True, help="output directory for scan/atlas/meta/truth files"
    )
    return parser


def _load_dataset(args):
    try:
        return server.load_dataset(args.scan, args.atlas, args.meta)
    except (ParcelSteerError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return None


def _cmd_serve(args) -> int:
    import uvicorn

    dataset = _load_dataset(args)
    if dataset is None:
        return 2
    nx, ny, nz, nt = dataset.scan.dims
    print(
        f"loaded dataset: {len(dataset.table)} super-voxels, "
        f"{nt} timepoints on a {nx}x{ny}x{nz} grid",
        flush=True,
    )
    app = server.create_app(data_root=args.data_root, default_dataset=dataset)
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


def _cmd_init(args) -> int:
    dataset = _load_dataset(args)
    if dataset is None:
        return 2
    try:
        hierarchy = engine.init_hierarchy(dataset.table, args.threshold)
    except ParcelSteerError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    label_volume, document = hierarchy.export(dataset.atlas)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    volume_io.save_label_volume(label_volume, out / "parcellation.nii")
    (out / "hierarchy.json").write_text(json.dumps(document, indent=2) + "\n")
    print(
        f"initialized at threshold {args.threshold}: "
        f"{hierarchy.leaf_count()} parcels -> {out}",
        flush=True,
    )
    return 0


def _cmd_synth(args) -> int:
    if args.spec is not None:
        try:
            doc = json.loads(Path(args.spec).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            print(f"error: cannot read spec file: {exc}", file=sys.stderr)
            return 2
    else:
        doc = {}
    try:
        spec = synth.SynthSpec.from_doc(doc)
        manifest = synth.write_dataset(spec, args.out)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(json.dumps(manifest, indent=2), flush=True)
    return 0


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    handlers = {"serve": _cmd_serve, "init": _cmd_init, "synth": _cmd_synth}
    return handlers[args.command](args)


if __name__ == "__main__":
    raise SystemExit(main())
