"""Orthographic slice views of the current parcellation.

Slices are taken straight off the voxel grid (no reslicing): sagittal fixes
x and shows the yz plane, coronal fixes y (xz), axial fixes z (xy). Each
in-plane voxel is mapped from its atlas label to the leaf that currently
owns it, and every parcel's boundary is traced as closed staircase polygons
along pixel edges.

Contour vertices are (x, y) pairs in pixel-edge coordinates where x runs
along the grid's second axis (columns) and y along the first (rows); the
cell at row r, column c spans x in [c, c+1] and y in [r, r+1]. Outer
boundaries are emitted clockwise in these display coordinates (positive
shoelace area), holes counterclockwise (negative), so the signed areas of a
label's contours sum to exactly its pixel count.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import IndexOutOfRange

PLANE_AXES = {"sagittal": 0, "coronal": 1, "axial": 2}


@dataclass(frozen=True)
class Contour:
    leaf_id: int
    network_id: int
    points: tuple


@dataclass(frozen=True)
class SliceOverlay:
    plane: str
    index: int
    label_image: np.ndarray
    contours: tuple
    highlight: int | None = None


def plane_axis(plane: str) -> int:
    if plane not in PLANE_AXES:
        raise ValueError(f"unknown plane {plane!r}; expected sagittal, coronal or axial")
    return PLANE_AXES[plane]


def plane_slice(volume: np.ndarray, plane: str, index: int) -> np.ndarray:
    """Extract one 2D slice from a 3D array; rows/cols keep axis order.

    Sagittal slices are (y, z) grids, coronal (x, z), axial (x, y).
    """
    axis = plane_axis(plane)
    if not 0 <= index < volume.shape[axis]:
        raise IndexOutOfRange(
            f"{plane} index {index} outside [0, {volume.shape[axis] - 1}]"
        )
    return np.take(volume, index, axis=axis)


def slice_labels(parcellation, atlas, plane: str, index: int) -> np.ndarray:
    """2D grid of current leaf ids for one slice (0 = background).

    ``parcellation`` is the engine's current_parcellation list; atlas labels
    not claimed by any leaf (there are none in a consistent session) and
    background stay 0.
    """
    raw = plane_slice(atlas.labels, plane, index)
    lookup = np.zeros(int(atlas.labels.max()) + 1, dtype=np.int32)
    for leaf_id, sv_members, _, _ in parcellation:
        for sv in sv_members:
            lookup[sv] = leaf_id
    return lookup[raw]


def _mask_contours(mask: np.ndarray):
    """Closed boundary loops of a boolean grid, one per connected border.

    Regions are 4-connected: two cells of the mask meeting only at a corner
    get separate loops, resolved by always continuing along the same cell
    that emitted the incoming edge.
    """
    padded = np.pad(mask, 1, constant_values=False)
    sides = (
        # (neighbour view, start corner dx dy, end corner dx dy)
        (padded[:-2, 1:-1], (0, 0), (1, 0)),  # open above: left-to-right along the top
        (padded[1:-1, 2:], (1, 0), (1, 1)),  # open right: downward along the right
        (padded[2:, 1:-1], (1, 1), (0, 1)),  # open below: right-to-left along the bottom
        (padded[1:-1, :-2], (0, 1), (0, 0)),  # open left: upward along the left
    )
    edges = []
    for neighbour, (sx, sy), (ex, ey) in sides:
        for r, c in np.argwhere(mask & ~neighbour):
            start = (int(c) + sx, int(r) + sy)
            end = (int(c) + ex, int(r) + ey)
            edges.append((start, end, (int(r), int(c))))
    edges.sort(key=lambda e: (e[0], e[1]))
    by_start: dict = {}
    for i, (start, _, _) in enumerate(edges):
        by_start.setdefault(start, []).append(i)

    used = [False] * len(edges)
    loops = []
    for first in range(len(edges)):
        if used[first]:
            continue
        points = [edges[first][0]]
        current = first
        while True:
            used[current] = True
            start, end, cell = edges[current]
            _append_vertex(points, end)
            if end == points[0]:
                break
            candidates = [i for i in by_start[end] if not used[i]]
            if len(candidates) == 1:
                current = candidates[0]
            else:
                # corner where two boundaries touch: stay on the same cell
                same_cell = [i for i in candidates if edges[i][2] == cell]
                current = same_cell[0]
        loops.append(tuple(points))
    return loops


def _append_vertex(points, vertex) -> None:
    """Append, fusing the vertex into a straight run when collinear."""
    if len(points) >= 2:
        ax, ay = points[-2]
        bx, by = points[-1]
        if (bx - ax == 0 and vertex[0] - bx == 0) or (
            by - ay == 0 and vertex[1] - by == 0
        ):
            points[-1] = vertex
            return
    points.append(vertex)


def trace_contours(label_image: np.ndarray):
    """All boundary loops of every nonzero label, as (label, points) pairs.

    Points are closed (first equals last) staircase polylines in pixel-edge
    coordinates. A label with several components or holes contributes
    several pairs.
    """
    grid = np.asarray(label_image)
    out = []
    for label in np.unique(grid):
        if label == 0:
            continue
        for loop in _mask_contours(grid == label):
            out.append((int(label), loop))
    return out


def polygon_area(points) -> float:
    """Signed shoelace area; positive for outer loops, negative for holes."""
    total = 0.0
    for (x0, y0), (x1, y1) in zip(points[:-1], points[1:]):
        total += x0 * y1 - x1 * y0
    return total / 2.0


def render_slice(parcellation, atlas, plane: str, index: int, highlight=None) -> SliceOverlay:
    """Compose the full overlay for one slice.

    ``highlight`` is carried through untouched so the client can stroke the
    matching contours black; a leaf absent from this slice simply yields no
    highlighted contours.
    """
    grid = slice_labels(parcellation, atlas, plane, index)
    network_of = {leaf_id: network_id for leaf_id, _, network_id, _ in parcellation}
    contours = tuple(
        Contour(leaf_id=label, network_id=network_of[label], points=points)
        for label, points in trace_contours(grid)
    )
    return SliceOverlay(
        plane=plane,
        index=index,
        label_image=grid,
        contours=contours,
        highlight=None if highlight is None else int(highlight),
    )
