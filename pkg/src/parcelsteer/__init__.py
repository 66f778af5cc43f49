"""Interactive, atlas-seeded fMRI parcellation.

The pipeline: load a 4-D scan and a 3-D atlas (volume_io), average each
atlas region into a super-voxel time-course, cluster per hemisphere and
network with complete linkage over correlation distance (engine), then
steer the result interactively with expand, merge and collapse while
inspecting homogeneity, banded time-courses, functional connectivity
(metrics) and orthographic slice overlays (slices). A session-holding HTTP
server (server) and a CLI (cli) wrap the same engine; synth generates
desk-scale datasets with planted, analytically known cluster structure.
"""

from .errors import (
    DimsMismatch,
    DuplicateLabel,
    EmptyAtlas,
    ForbiddenKind,
    IndexOutOfRange,
    InvalidRange,
    LengthMismatch,
    MalformedHeader,
    NoHierarchy,
    NonFiniteSample,
    NotALeaf,
    ParcelSteerError,
    SameNode,
    SingletonLeaf,
    ThresholdNotTighter,
    ThresholdOutOfRange,
    UnknownLabel,
    UnsupportedDatatype,
    ZeroVariance,
)
from .engine import (
    Hierarchy,
    LinkageStep,
    NodeKind,
    ParcelNode,
    SuperVoxel,
    SuperVoxelTable,
    complete_linkage,
    cut_at_threshold,
    extract_supervoxels,
    init_hierarchy,
    replay,
)
from .metrics import (
    BandedTimeCourse,
    DistanceMatrix,
    FCMatrix,
    TimeCourse,
    distance_matrix,
    fc_filter,
    fc_matrix,
    homogeneity,
    mean_se,
    pairwise_r,
    pearson_r,
)
from .slices import SliceOverlay, polygon_area, render_slice, slice_labels, trace_contours
from .synth import SynthSpec, generate, write_dataset
from .volume_io import (
    AtlasEntry,
    AtlasMeta,
    AtlasVolume,
    TimeSeriesVolume,
    load_atlas,
    load_atlas_meta,
    load_label_volume,
    load_timeseries,
    save_atlas_meta,
    save_label_volume,
    save_timeseries,
)

__version__ = "0.1.0"

__all__ = [
    "AtlasEntry",
    "AtlasMeta",
    "AtlasVolume",
    "BandedTimeCourse",
    "DimsMismatch",
    "DistanceMatrix",
    "DuplicateLabel",
    "EmptyAtlas",
    "FCMatrix",
    "ForbiddenKind",
    "Hierarchy",
    "IndexOutOfRange",
    "InvalidRange",
    "LengthMismatch",
    "LinkageStep",
    "MalformedHeader",
    "NoHierarchy",
    "NodeKind",
    "NonFiniteSample",
    "NotALeaf",
    "ParcelNode",
    "ParcelSteerError",
    "SameNode",
    "SingletonLeaf",
    "ThresholdNotTighter",
    "ThresholdOutOfRange",
    "UnknownLabel",
    "UnsupportedDatatype",
    "ZeroVariance",
    "SliceOverlay",
    "SuperVoxel",
    "SuperVoxelTable",
    "SynthSpec",
    "TimeCourse",
    "TimeSeriesVolume",
    "complete_linkage",
    "cut_at_threshold",
    "distance_matrix",
    "extract_supervoxels",
    "fc_filter",
    "fc_matrix",
    "generate",
    "homogeneity",
    "init_hierarchy",
    "load_atlas",
    "load_atlas_meta",
    "load_label_volume",
    "load_timeseries",
    "mean_se",
    "pairwise_r",
    "pearson_r",
    "polygon_area",
    "render_slice",
    "replay",
    "save_atlas_meta",
    "save_label_volume",
    "save_timeseries",
    "slice_labels",
    "trace_contours",
    "write_dataset",
    "__version__",
]
