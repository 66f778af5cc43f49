"""Volume and atlas-table I/O.

Reads and writes a deliberately small, bit-exact subset of the NIfTI-1
format: single-file (magic ``n+1\\0``), uncompressed, little-endian, with
datatype 16 (float32) for scans and 4/8 (int16/int32) for label volumes.
Gzip, ``.hdr``/``.img`` pairs, big-endian files and NIfTI-2 are rejected with
explicit errors rather than half-supported.

Samples are kept in x-fastest order: the value at (x, y, z, t) lives at flat
index ``x + nx*(y + ny*(z + nz*t))``, which is how NIfTI lays the stream out
on disk. Arrays returned here are indexed ``[x, y, z, t]`` accordingly.

Orientation fields (qform/sform block) are carried through load/save
verbatim but never interpreted; slice axes are array axes throughout the
package.

The atlas metadata table is a separate UTF-8 tab-separated file with a
required header row (``label_id``, ``name``, ``network_id``, ``hemisphere``,
hemisphere spelled L or R); NIfTI-1 has no standard label-table extension.
"""
from __future__ import annotations

import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import (
    DimsMismatch,
    DuplicateLabel,
    MalformedHeader,
    NonFiniteSample,
    UnknownLabel,
    UnsupportedDatatype,
)

HEADER_SIZE = 348
DATA_OFFSET = 352
MAGIC_SINGLE = b"n+1\x00"

DT_INT16 = 4
DT_INT32 = 8
DT_FLOAT32 = 16

_DTYPES = {DT_INT16: np.dtype("<i2"), DT_INT32: np.dtype("<i4"), DT_FLOAT32: np.dtype("<f4")}
_BITPIX = {DT_INT16: 16, DT_INT32: 32, DT_FLOAT32: 32}

# qform_code .. intent_name (offsets 252..343): read and preserved, never used
_ORIENT_SLICE = slice(252, 344)
_DEFAULT_ORIENT = bytes(_ORIENT_SLICE.stop - _ORIENT_SLICE.start)


@dataclass
class TimeSeriesVolume:
    """4-D BOLD volume, float32, indexed [x, y, z, t]."""

    data: np.ndarray
    voxel_size_mm: tuple = (1.0, 1.0, 1.0)
    orientation: bytes = _DEFAULT_ORIENT

    def __post_init__(self):
        if self.data.ndim != 4:
            raise ValueError("scan data must be 4-D (x, y, z, t)")
        if self.data.dtype != np.float32:
            self.data = self.data.astype(np.float32)
        if self.data.shape[3] < 2:
            raise ValueError("a scan needs at least 2 timepoints")

    @property
    def dims(self) -> tuple:
        return tuple(int(d) for d in self.data.shape)

    @property
    def nt(self) -> int:
        return int(self.data.shape[3])


@dataclass
class AtlasVolume:
    """3-D label volume, int32, 0 = background."""

    labels: np.ndarray
    voxel_size_mm: tuple = (1.0, 1.0, 1.0)
    orientation: bytes = _DEFAULT_ORIENT

    def __post_init__(self):
        if self.labels.ndim != 3:
            raise ValueError("atlas labels must be 3-D")
        if self.labels.dtype != np.int32:
            self.labels = self.labels.astype(np.int32)

    @property
    def dims(self) -> tuple:
        return tuple(int(d) for d in self.labels.shape)


@dataclass(frozen=True)
class AtlasEntry:
    label_id: int
    name: str
    network_id: int
    hemisphere: str


@dataclass
class AtlasMeta:
    """Per-label network/hemisphere lookup table."""

    entries: list
    by_label: dict = field(init=False, repr=False)

    def __post_init__(self):
        self.by_label = {e.label_id: e for e in self.entries}

    def __len__(self) -> int:
        return len(self.entries)


def _read_header(raw: bytes, path) -> dict:
    if len(raw) >= 2 and raw[:2] == b"\x1f\x8b":
        raise MalformedHeader(f"{path}: gzip-compressed input; only uncompressed NIfTI-1 is supported")
    if len(raw) < HEADER_SIZE:
        raise MalformedHeader(f"{path}: file shorter than the {HEADER_SIZE}-byte NIfTI-1 header")
    (sizeof_hdr,) = struct.unpack_from("<i", raw, 0)
    if sizeof_hdr == 540:
        raise MalformedHeader(f"{path}: NIfTI-2 is not supported")
    if sizeof_hdr != HEADER_SIZE:
        (swapped,) = struct.unpack_from(">i", raw, 0)
        if swapped == HEADER_SIZE:
            raise MalformedHeader(f"{path}: big-endian NIfTI-1 is not supported")
        raise MalformedHeader(f"{path}: sizeof_hdr is {sizeof_hdr}, expected {HEADER_SIZE}")
    magic = raw[344:348]
    if magic != MAGIC_SINGLE:
        raise MalformedHeader(f"{path}: magic {magic!r} is not single-file NIfTI-1 ('n+1')")
    dim = struct.unpack_from("<8h", raw, 40)
    (datatype, bitpix) = struct.unpack_from("<2h", raw, 70)
    pixdim = struct.unpack_from("<8f", raw, 76)
    (vox_offset,) = struct.unpack_from("<f", raw, 108)
    (scl_slope, scl_inter) = struct.unpack_from("<2f", raw, 112)
    if vox_offset != int(vox_offset) or int(vox_offset) < DATA_OFFSET:
        raise MalformedHeader(f"{path}: vox_offset {vox_offset} must be an integer >= {DATA_OFFSET}")
    return {
        "dim": dim,
        "datatype": int(datatype),
        "bitpix": int(bitpix),
        "pixdim": pixdim,
        "vox_offset": int(vox_offset),
        "scl_slope": float(scl_slope),
        "scl_inter": float(scl_inter),
        "orientation": raw[_ORIENT_SLICE],
    }


def _read_array(raw: bytes, hdr: dict, shape, path) -> np.ndarray:
    datatype = hdr["datatype"]
    dtype = _DTYPES[datatype]
    if hdr["bitpix"] != _BITPIX[datatype]:
        raise MalformedHeader(
            f"{path}: bitpix {hdr['bitpix']} inconsistent with datatype {datatype}"
        )
    count = int(np.prod(shape))
    nbytes = count * dtype.itemsize
    buf = raw[hdr["vox_offset"] : hdr["vox_offset"] + nbytes]
    if len(buf) < nbytes:
        raise MalformedHeader(
            f"{path}: file truncated, expected {nbytes} data bytes, found {len(buf)}"
        )
    flat = np.frombuffer(buf, dtype=dtype, count=count)
    return flat.reshape(shape, order="F")


def _voxel_size(pixdim) -> tuple:
    return tuple(float(p) if p > 0 else 1.0 for p in pixdim[1:4])


def load_timeseries(path) -> TimeSeriesVolume:
    """Load a 4-D scan; int16 data is promoted to float32 via scl_slope/inter.

    Raises MalformedHeader on structural problems, UnsupportedDatatype for
    datatypes outside {float32, int16}, NonFiniteSample (with the offending
    (x, y, z, t)) when the scan contains NaN or infinity.
    """
    path = Path(path)
    raw = path.read_bytes()
    hdr = _read_header(raw, path)
    ndim = hdr["dim"][0]
    if ndim != 4:
        raise MalformedHeader(f"{path}: header declares {ndim} dims, a scan needs 4")
    shape = tuple(int(d) for d in hdr["dim"][1:5])
    if any(d < 1 for d in shape):
        raise MalformedHeader(f"{path}: non-positive dimension in {shape}")
    if shape[3] < 2:
        raise MalformedHeader(f"{path}: scan has {shape[3]} timepoint(s), need at least 2")
    if hdr["datatype"] not in (DT_FLOAT32, DT_INT16):
        raise UnsupportedDatatype(
            f"{path}: datatype code {hdr['datatype']} not supported for scans (want 16 or 4)"
        )
    arr = _read_array(raw, hdr, shape, path)
    slope, inter = hdr["scl_slope"], hdr["scl_inter"]
    if arr.dtype != np.float32:
        arr = arr.astype(np.float32)
        if slope != 0.0:
            arr = arr * np.float32(slope) + np.float32(inter)
    elif slope != 0.0 and (slope != 1.0 or inter != 0.0):
        arr = arr * np.float32(slope) + np.float32(inter)
    finite = np.isfinite(arr)
    if not finite.all():
        bad = int(np.argmax(~finite.ravel(order="F")))
        raise NonFiniteSample(np.unravel_index(bad, shape, order="F"))
    return TimeSeriesVolume(
        data=arr, voxel_size_mm=_voxel_size(hdr["pixdim"]), orientation=hdr["orientation"]
    )


def load_label_volume(path) -> AtlasVolume:
    """Load a 3-D integer label volume (datatype 4 or 8)."""
    path = Path(path)
    raw = path.read_bytes()
    hdr = _read_header(raw, path)
    ndim = hdr["dim"][0]
    if ndim != 3:
        raise MalformedHeader(f"{path}: header declares {ndim} dims, an atlas needs 3")
    shape = tuple(int(d) for d in hdr["dim"][1:4])
    if any(d < 1 for d in shape):
        raise MalformedHeader(f"{path}: non-positive dimension in {shape}")
    if hdr["datatype"] not in (DT_INT16, DT_INT32):
        raise UnsupportedDatatype(
            f"{path}: datatype code {hdr['datatype']} not supported for atlases (want 4 or 8)"
        )
    arr = _read_array(raw, hdr, shape, path).astype(np.int32)
    return AtlasVolume(
        labels=arr, voxel_size_mm=_voxel_size(hdr["pixdim"]), orientation=hdr["orientation"]
    )


def load_atlas_meta(path) -> AtlasMeta:
    """Parse the tab-separated label table; header row is required."""
    path = Path(path)
    lines = path.read_text(encoding="utf-8").splitlines()
    rows = [ln for ln in lines if ln.strip()]
    if not rows:
        raise MalformedHeader(f"{path}: empty metadata table")
    header = rows[0].split("\t")
    required = ("label_id", "name", "network_id", "hemisphere")
    try:
        cols = {name: header.index(name) for name in required}
    except ValueError:
        raise MalformedHeader(
            f"{path}: header row must contain columns {required}, got {header}"
        ) from None
    entries = []
    seen = set()
    for lineno, row in enumerate(rows[1:], start=2):
        parts = row.split("\t")
        if len(parts) < len(header):
            raise MalformedHeader(f"{path}:{lineno}: expected {len(header)} columns")
        try:
            label_id = int(parts[cols["label_id"]])
            network_id = int(parts[cols["network_id"]])
        except ValueError:
            raise MalformedHeader(f"{path}:{lineno}: label_id and network_id must be integers") from None
        if label_id <= 0:
            raise MalformedHeader(f"{path}:{lineno}: label_id must be positive, got {label_id}")
        if label_id in seen:
            raise DuplicateLabel(f"{path}:{lineno}: label_id {label_id} listed twice")
        seen.add(label_id)
        hemisphere = parts[cols["hemisphere"]].strip()
        if hemisphere not in ("L", "R"):
            raise MalformedHeader(f"{path}:{lineno}: hemisphere must be L or R, got {hemisphere!r}")
        entries.append(
            AtlasEntry(
                label_id=label_id,
                name=parts[cols["name"]].strip(),
                network_id=network_id,
                hemisphere=hemisphere,
            )
        )
    return AtlasMeta(entries=entries)


def load_atlas(vol_path, meta_path):
    """Load and cross-validate a label volume with its metadata table.

    Every nonzero label in the grid must appear in the table (UnknownLabel
    otherwise); extra table entries without voxels are allowed.
    """
    vol = load_label_volume(vol_path)
    meta = load_atlas_meta(meta_path)
    present = np.unique(vol.labels)
    present = present[present != 0]
    for label in present:
        if int(label) not in meta.by_label:
            raise UnknownLabel(int(label))
    return vol, meta


def ensure_compatible(scan: TimeSeriesVolume, atlas: AtlasVolume) -> None:
    """Raise DimsMismatch unless the atlas matches the scan's spatial grid."""
    if scan.dims[:3] != atlas.dims:
        raise DimsMismatch(
            f"atlas dims {atlas.dims} do not match scan spatial dims {scan.dims[:3]}"
        )


def _pack_header(dim, datatype, pixdim, orientation) -> bytes:
    hdr = bytearray(HEADER_SIZE)
    struct.pack_into("<i", hdr, 0, HEADER_SIZE)
    dim8 = [len(dim)] + list(dim) + [1] * (7 - len(dim))
    struct.pack_into("<8h", hdr, 40, *dim8)
    struct.pack_into("<2h", hdr, 70, datatype, _BITPIX[datatype])
    pix8 = [1.0] + list(pixdim) + [1.0] * (7 - len(pixdim))
    struct.pack_into("<8f", hdr, 76, *pix8)
    struct.pack_into("<f", hdr, 108, float(DATA_OFFSET))
    struct.pack_into("<2f", hdr, 112, 0.0, 0.0)  # scl_slope 0: stored values are final
    hdr[_ORIENT_SLICE] = orientation
    hdr[344:348] = MAGIC_SINGLE
    return bytes(hdr)


def _volume_bytes(array, datatype, pixdim, orientation) -> bytes:
    hdr = _pack_header(array.shape, datatype, pixdim, orientation)
    # header, empty extension flag, then the voxels x-fastest
    return hdr + b"\x00\x00\x00\x00" + array.tobytes(order="F")


def _write_volume(path, array, datatype, pixdim, orientation) -> None:
    with open(path, "wb") as f:
        f.write(_volume_bytes(array, datatype, pixdim, orientation))


def label_volume_bytes(vol: AtlasVolume) -> bytes:
    """The int32 single-file encoding of a label volume, as bytes."""
    data = np.asarray(vol.labels, dtype="<i4")
    return _volume_bytes(data, DT_INT32, vol.voxel_size_mm, vol.orientation)


def save_timeseries(vol: TimeSeriesVolume, path) -> None:
    """Write a scan as float32 single-file NIfTI-1; reload is bit-exact."""
    data = np.asarray(vol.data, dtype="<f4")
    _write_volume(path, data, DT_FLOAT32, vol.voxel_size_mm, vol.orientation)


def save_label_volume(vol: AtlasVolume, path) -> None:
    """Write a label volume as int32 single-file NIfTI-1; reload is bit-exact."""
    data = np.asarray(vol.labels, dtype="<i4")
    _write_volume(path, data, DT_INT32, vol.voxel_size_mm, vol.orientation)


def save_atlas_meta(meta: AtlasMeta, path) -> None:
    """Write the tab-separated label table with its header row."""
    lines = ["label_id\tname\tnetwork_id\themisphere"]
    for e in meta.entries:
        lines.append(f"{e.label_id}\t{e.name}\t{e.network_id}\t{e.hemisphere}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
