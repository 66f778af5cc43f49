"""Steerable parcellation hierarchy.

Super-voxel extraction from an atlas-labelled scan, complete-linkage
agglomerative initialization per (hemisphere, network) group, and the three
steering operations: expand (re-cluster a leaf at a tighter threshold),
merge (one leaf absorbs another) and collapse (fuse a cluster subtree into a
single leaf).

Clustering is local by construction: groups are clustered independently at
initialization and only a single leaf's members are ever re-clustered on
expand; there is no global re-clustering. Ties in agglomeration are broken
by the lexicographically smallest (min member id, max member id) of the
merged pair's combined membership, with the full sorted membership as the
final tie-break, so results are reproducible on any input.

All thresholds are correlation distances, d = 1 - r, in [0, 2]; merging is
inclusive (linkage distance <= threshold), so t = 2 always yields a single
cluster per group.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from . import metrics
from .errors import (
    EmptyAtlas,
    ForbiddenKind,
    NotALeaf,
    SameNode,
    SingletonLeaf,
    ThresholdNotTighter,
    ThresholdOutOfRange,
    UnknownLabel,
)
from .metrics import DistanceMatrix, TimeCourse
from .volume_io import AtlasMeta, AtlasVolume, TimeSeriesVolume, ensure_compatible

SCHEMA_VERSION = 1


class NodeKind(str, Enum):
    ROOT = "root"
    HEMISPHERE = "hemisphere"
    NETWORK = "network"
    CLUSTER = "cluster"
    LEAF = "leaf"


@dataclass(frozen=True)
class SuperVoxel:
    """One atlas region: its member voxels and their mean time-course."""

    sv_id: int
    voxel_indices: np.ndarray
    mean_tc: TimeCourse
    network_id: int
    hemisphere: str


@dataclass
class ParcelNode:
    node_id: int
    kind: NodeKind
    parent: int | None
    children: list
    sv_members: tuple = ()
    network_id: int | None = None
    hemisphere: str | None = None
    homogeneity: float = 1.0
    formation_threshold: float = 0.0


@dataclass(frozen=True)
class LinkageStep:
    """One agglomeration: clusters ``left`` and ``right`` merge at ``distance``.

    Cluster ids follow the usual convention: 0..n-1 are the original items,
    and the cluster created by step k gets id n + k.
    """

    left: int
    right: int
    distance: float


@dataclass
class OpRecord:
    kind: str
    args: dict
    timestamp: float
    leaf_count: int

    def to_doc(self) -> dict:
        return {
            "kind": self.kind,
            "args": dict(self.args),
            "timestamp": float(self.timestamp),
            "leaf_count": int(self.leaf_count),
        }


@dataclass
class HierarchyDelta:
    """Incremental tree change: enough for a client to patch its model."""

    op: str
    removed: list
    added: list
    updated: list
    leaf_count: int
    revision: int
    no_split: bool = False

    def to_doc(self) -> dict:
        return {
            "op": self.op,
            "removed": [int(i) for i in self.removed],
            "added": list(self.added),
            "updated": list(self.updated),
            "leaf_count": int(self.leaf_count),
            "revision": int(self.revision),
            "no_split": bool(self.no_split),
        }


# ---------------------------------------------------------------------------
# super-voxel extraction


def extract_supervoxels(scan: TimeSeriesVolume, atlas: AtlasVolume, meta: AtlasMeta):
    """One SuperVoxel per atlas label with at least one voxel.

    The mean time-course is the unweighted voxelwise mean over the label's
    member voxels, accumulated in float64.
    """
    ensure_compatible(scan, atlas)
    nx, ny, nz, nt = scan.dims
    nvox = nx * ny * nz
    flat_labels = atlas.labels.ravel(order="F")
    courses = scan.data.reshape((nvox, nt), order="F")

    order = np.argsort(flat_labels, kind="stable")
    sorted_labels = flat_labels[order]
    labels, starts = np.unique(sorted_labels, return_index=True)
    bounds = list(starts) + [nvox]

    svs = []
    for k, label in enumerate(labels):
        if label == 0:
            continue
        label = int(label)
        if label not in meta.by_label:
            raise UnknownLabel(label)
        entry = meta.by_label[label]
        idx = np.sort(order[bounds[k] : bounds[k + 1]])
        mean = courses[idx].astype(np.float64).mean(axis=0)
        svs.append(
            SuperVoxel(
                sv_id=label,
                voxel_indices=idx,
                mean_tc=TimeCourse(samples=mean, source_count=idx.size),
                network_id=entry.network_id,
                hemisphere=entry.hemisphere,
            )
        )
    if not svs:
        raise EmptyAtlas("atlas volume has no nonzero labels")
    return svs


class SuperVoxelTable:
    """Indexed super-voxel store with the precomputed pairwise correlations.

    Homogeneity of any node and any re-clustering on expand read from one
    (n_sv, n_sv) correlation matrix computed here once, which is what keeps
    steering operations inside the interactive budget.
    """

    def __init__(self, svs):
        if not svs:
            raise ValueError("need at least one super-voxel")
        self.svs = sorted(svs, key=lambda s: s.sv_id)
        self.ids = np.array([s.sv_id for s in self.svs], dtype=np.int64)
        if len(set(self.ids.tolist())) != len(self.svs):
            raise ValueError("duplicate sv_id in super-voxel list")
        self.row = {int(s.sv_id): i for i, s in enumerate(self.svs)}
        self.courses = np.vstack([s.mean_tc.samples for s in self.svs])
        self.corr, self.degenerate = metrics.pairwise_r(self.courses)

    def __len__(self) -> int:
        return len(self.svs)

    def rows_for(self, sv_ids) -> np.ndarray:
        return np.array([self.row[int(s)] for s in sv_ids], dtype=np.intp)

    def homogeneity(self, sv_ids) -> float:
        rows = self.rows_for(sv_ids)
        return metrics.homogeneity_from_corr(self.corr[np.ix_(rows, rows)])

    def distance_matrix(self, sv_ids) -> DistanceMatrix:
        """Condensed correlation distances between the given super-voxels."""
        rows = self.rows_for(sv_ids)
        sub = self.corr[np.ix_(rows, rows)]
        iu = np.triu_indices(rows.size, k=1)
        d = 1.0 - sub[iu]
        deg = self.degenerate[rows]
        return DistanceMatrix(n=rows.size, d=d, degenerate=deg[iu[0]] | deg[iu[1]])

    def mean_course(self, sv_ids) -> np.ndarray:
        """Unweighted mean over member super-voxel mean courses."""
        rows = self.rows_for(sv_ids)
        return self.courses[rows].mean(axis=0)


# ---------------------------------------------------------------------------
# complete-linkage clustering


def _tie_key(members_a, members_b):
    union = tuple(sorted(members_a + members_b))
    return (union[0], union[-1], union)


def complete_linkage(d: DistanceMatrix, ids=None):
    """Agglomerative merge sequence under maximum (complete) linkage.

    ``ids`` names the items for tie-breaking (defaults to 0..n-1); among
    pairs at the same minimal distance the one whose combined membership has
    the lexicographically smallest (min id, max id, full sorted membership)
    merges first. Distances are nondecreasing along the sequence because
    complete linkage admits no inversions.
    """
    n = d.n
    if ids is None:
        ids = list(range(n))
    ids = [int(i) for i in ids]
    if len(ids) != n:
        raise ValueError("ids length must match the distance matrix")

    D = d.as_square()
    np.fill_diagonal(D, np.inf)
    members = [(i,) for i in ids]  # per slot, sorted member ids
    cluster_of = list(range(n))  # per slot, current cluster id
    alive = np.ones(n, dtype=bool)

    steps = []
    for k in range(n - 1):
        m = D.min()
        tied = np.argwhere(D == m)
        best = None
        for i, j in tied:
            if i >= j:
                continue
            key = _tie_key(members[i], members[j])
            if best is None or key < best[0]:
                best = (key, int(i), int(j))
        _, i, j = best
        a, b = cluster_of[i], cluster_of[j]
        steps.append(LinkageStep(left=min(a, b), right=max(a, b), distance=float(m)))
        # slot i absorbs slot j; complete linkage keeps the pairwise max
        np.maximum(D[i, :], D[j, :], out=D[i, :])
        D[:, i] = D[i, :]
        D[i, i] = np.inf
        D[j, :] = np.inf
        D[:, j] = np.inf
        members[i] = tuple(sorted(members[i] + members[j]))
        cluster_of[i] = n + k
        alive[j] = False
    return steps


def cut_at_threshold(steps, t: float, n_items: int | None = None):
    """Flat clusters after applying every step with distance <= t.

    Returns item-index clusters (tuples into 0..n-1), ordered by their
    smallest member. Items never merged stay singletons.
    """
    if not 0.0 <= t <= 2.0:
        raise ThresholdOutOfRange(f"threshold {t} outside [0, 2]")
    n = n_items if n_items is not None else len(steps) + 1
    parent = list(range(n + len(steps)))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for k, step in enumerate(steps):
        if step.distance <= t:
            cid = n + k
            parent[find(step.left)] = cid
            parent[find(step.right)] = cid
    groups = {}
    for item in range(n):
        groups.setdefault(find(item), []).append(item)
    clusters = [tuple(v) for v in groups.values()]
    clusters.sort(key=lambda c: c[0])
    return clusters


def _cluster_sv_ids(table: SuperVoxelTable, sv_ids, t: float):
    """Cluster the given super-voxels at threshold t; returns id tuples."""
    sv_ids = sorted(int(s) for s in sv_ids)
    if len(sv_ids) == 1:
        return [tuple(sv_ids)]
    dm = table.distance_matrix(sv_ids)
    steps = complete_linkage(dm, ids=sv_ids)
    clusters = cut_at_threshold(steps, t, n_items=len(sv_ids))
    return [tuple(sv_ids[i] for i in c) for c in clusters]


# ---------------------------------------------------------------------------
# the hierarchy


class Hierarchy:
    """The steerable tree: root, hemispheres, networks, clusters, leaves.

    Leaves partition the full super-voxel set at all times; merge, collapse
    and expand preserve that invariant by construction. A single writer is
    assumed: callers serialize mutations (the HTTP layer holds a per-session
    lock) while reads work on plain snapshots.
    """

    def __init__(self, table: SuperVoxelTable, init_threshold: float):
        self.table = table
        self.init_threshold = float(init_threshold)
        self.nodes: dict = {}
        self.root_id = 0
        self.op_log: list = []
        self.revision = 1
        self._next_id = 0

    # -- construction

    def _new_node(self, **kw) -> ParcelNode:
        node = ParcelNode(node_id=self._next_id, **kw)
        self.nodes[node.node_id] = node
        self._next_id += 1
        return node

    @classmethod
    def build(cls, table: SuperVoxelTable, t: float) -> "Hierarchy":
        if not 0.0 <= t <= 2.0:
            raise ThresholdOutOfRange(f"threshold {t} outside [0, 2]")
        h = cls(table, t)
        root = h._new_node(kind=NodeKind.ROOT, parent=None, children=[], formation_threshold=t)
        hemis = {}
        for hemi in ("L", "R"):
            node = h._new_node(
                kind=NodeKind.HEMISPHERE,
                parent=root.node_id,
                children=[],
                hemisphere=hemi,
                formation_threshold=t,
            )
            root.children.append(node.node_id)
            hemis[hemi] = node

        groups = {}
        for sv in table.svs:
            groups.setdefault((sv.hemisphere, sv.network_id), []).append(sv.sv_id)
        for (hemi, network_id) in sorted(groups):
            sv_ids = sorted(groups[(hemi, network_id)])
            net = h._new_node(
                kind=NodeKind.NETWORK,
                parent=hemis[hemi].node_id,
                children=[],
                network_id=network_id,
                hemisphere=hemi,
                formation_threshold=t,
            )
            hemis[hemi].children.append(net.node_id)
            for members in _cluster_sv_ids(table, sv_ids, t):
                leaf = h._new_node(
                    kind=NodeKind.LEAF,
                    parent=net.node_id,
                    children=[],
                    sv_members=members,
                    network_id=network_id,
                    hemisphere=hemi,
                    formation_threshold=t,
                )
                net.children.append(leaf.node_id)
        for node in h.nodes.values():
            node.homogeneity = h._node_homogeneity(node)
        return h

    # -- derived views

    def node(self, node_id: int) -> ParcelNode:
        return self.nodes[int(node_id)]

    def members(self, node_id: int):
        """Member sv_ids of a node: stored for leaves, union for interiors."""
        node = self.node(node_id)
        if node.kind is NodeKind.LEAF:
            return node.sv_members
        out = []
        for child in node.children:
            out.extend(self.members(child))
        return tuple(sorted(out))

    def _node_homogeneity(self, node: ParcelNode) -> float:
        members = self.members(node.node_id)
        if not members:
            return 1.0
        return self.table.homogeneity(members)

    def leaves(self):
        return [n for n in self.nodes.values() if n.kind is NodeKind.LEAF]

    def leaf_count(self) -> int:
        return len(self.leaves())

    def descendants(self, node_id: int):
        out = []
        for child in self.node(node_id).children:
            out.append(child)
            out.extend(self.descendants(child))
        return out

    def current_parcellation(self):
        """Ordered (leaf_id, sv_members, network_id, hemisphere) list."""
        leaves = self.leaves()
        leaves.sort(key=lambda n: (n.hemisphere, n.network_id, n.node_id))
        return [(n.node_id, n.sv_members, n.network_id, n.hemisphere) for n in leaves]

    def leaf_courses(self):
        """(leaf_ids, courses) for the current parcellation order."""
        parcellation = self.current_parcellation()
        ids = [p[0] for p in parcellation]
        courses = np.vstack([self.table.mean_course(p[1]) for p in parcellation])
        return ids, courses

    def leaf_is_degenerate(self, leaf_id: int) -> bool:
        course = self.table.mean_course(self.node(leaf_id).sv_members)
        return bool(np.all(course == course[0]))

    # -- steering operations

    def _log(self, kind: str, args: dict, timestamp=None) -> None:
        ts = time.time() if timestamp is None else float(timestamp)
        self.op_log.append(OpRecord(kind=kind, args=args, timestamp=ts, leaf_count=self.leaf_count()))
        self.revision += 1

    def expand(self, node_id: int, t_new: float, timestamp=None) -> HierarchyDelta:
        """Re-cluster a leaf at a strictly tighter threshold.

        If the tighter threshold still yields one cluster the tree is left
        untouched and the delta carries a no_split notice.
        """
        node = self._require(node_id)
        if node.kind is not NodeKind.LEAF:
            raise NotALeaf(f"node {node_id} is a {node.kind.value}, expand needs a leaf")
        if len(node.sv_members) < 2:
            raise SingletonLeaf(f"leaf {node_id} has a single member")
        if not 0.0 <= t_new <= 2.0:
            raise ThresholdOutOfRange(f"threshold {t_new} outside [0, 2]")
        if t_new >= node.formation_threshold:
            raise ThresholdNotTighter(
                f"threshold {t_new} must be strictly below the node's "
                f"formation threshold {node.formation_threshold}"
            )
        clusters = _cluster_sv_ids(self.table, node.sv_members, t_new)
        if len(clusters) == 1:
            return HierarchyDelta(
                op="expand",
                removed=[],
                added=[],
                updated=[],
                leaf_count=self.leaf_count(),
                revision=self.revision,
                no_split=True,
            )
        node.kind = NodeKind.CLUSTER
        node.sv_members = ()
        added = []
        for members in clusters:
            leaf = self._new_node(
                kind=NodeKind.LEAF,
                parent=node.node_id,
                children=[],
                sv_members=members,
                network_id=node.network_id,
                hemisphere=node.hemisphere,
                formation_threshold=t_new,
            )
            leaf.homogeneity = self._node_homogeneity(leaf)
            node.children.append(leaf.node_id)
            added.append(self.node_doc(leaf.node_id))
        self._log("expand", {"node_id": int(node_id), "threshold": float(t_new)}, timestamp)
        return HierarchyDelta(
            op="expand",
            removed=[],
            added=added,
            updated=[self.node_doc(node.node_id)],
            leaf_count=self.leaf_count(),
            revision=self.revision,
        )

    def merge(self, target_id: int, source_id: int, timestamp=None) -> HierarchyDelta:
        """Target leaf absorbs the source leaf's members; source disappears.

        The merged leaf keeps the target's network and hemisphere (so
        cross-network merges move the source's super-voxels into the
        target's network) and takes the smaller of the two formation
        thresholds so expand stays meaningful.
        """
        target = self._require(target_id)
        source = self._require(source_id)
        if target.node_id == source.node_id:
            raise SameNode("merge needs two distinct leaves")
        for node in (target, source):
            if node.kind is not NodeKind.LEAF:
                raise NotALeaf(f"node {node.node_id} is a {node.kind.value}, merge needs leaves")

        old_source_ancestors = self._ancestors(source.node_id)
        target.sv_members = tuple(sorted(target.sv_members + source.sv_members))
        target.formation_threshold = min(target.formation_threshold, source.formation_threshold)

        removed = [source.node_id]
        parent = self.node(source.parent)
        parent.children.remove(source.node_id)
        del self.nodes[source.node_id]
        structural = []
        if parent.kind is NodeKind.CLUSTER and len(parent.children) == 1:
            # a single-child cluster is redundant: splice it out
            only = self.node(parent.children[0])
            grand = self.node(parent.parent)
            grand.children[grand.children.index(parent.node_id)] = only.node_id
            only.parent = grand.node_id
            removed.append(parent.node_id)
            del self.nodes[parent.node_id]
            structural.extend([only.node_id, grand.node_id])
        elif parent.kind is NodeKind.NETWORK and not parent.children:
            # the source was the network's last parcel; drop the empty node
            hemi = self.node(parent.parent)
            hemi.children.remove(parent.node_id)
            removed.append(parent.node_id)
            del self.nodes[parent.node_id]
            structural.append(hemi.node_id)
        else:
            structural.append(parent.node_id)

        touched = {target.node_id}
        touched.update(structural)
        touched.update(self._ancestors(target.node_id))
        touched.update(a for a in old_source_ancestors if a in self.nodes)
        for nid in touched:
            node = self.nodes[nid]
            node.homogeneity = self._node_homogeneity(node)
        self._log(
            "merge", {"target_id": int(target_id), "source_id": int(source_id)}, timestamp
        )
        updated = [self.node_doc(nid) for nid in sorted(touched)]
        return HierarchyDelta(
            op="merge",
            removed=removed,
            added=[],
            updated=updated,
            leaf_count=self.leaf_count(),
            revision=self.revision,
        )

    def collapse(self, node_id: int, timestamp=None) -> HierarchyDelta:
        """Fuse all leaf descendants of a cluster node into one leaf."""
        node = self._require(node_id)
        if node.kind is not NodeKind.CLUSTER:
            raise ForbiddenKind(
                f"collapse applies to cluster nodes only, node {node_id} is a {node.kind.value}"
            )
        doomed = self.descendants(node.node_id)
        members = self.members(node.node_id)
        for nid in doomed:
            del self.nodes[nid]
        node.children = []
        node.kind = NodeKind.LEAF
        node.sv_members = members
        # same member union as before, so homogeneity and ancestors are unchanged
        self._log("collapse", {"node_id": int(node_id)}, timestamp)
        return HierarchyDelta(
            op="collapse",
            removed=doomed,
            added=[],
            updated=[self.node_doc(node.node_id)],
            leaf_count=self.leaf_count(),
            revision=self.revision,
        )

    def apply_op(self, kind: str, args: dict, timestamp=None) -> HierarchyDelta:
        if kind == "expand":
            return self.expand(args["node_id"], args["threshold"], timestamp=timestamp)
        if kind == "merge":
            return self.merge(args["target_id"], args["source_id"], timestamp=timestamp)
        if kind == "collapse":
            return self.collapse(args["node_id"], timestamp=timestamp)
        raise ValueError(f"unknown operation kind {kind!r}")

    def _require(self, node_id: int) -> ParcelNode:
        node_id = int(node_id)
        if node_id not in self.nodes:
            raise KeyError(node_id)
        return self.nodes[node_id]

    def _ancestors(self, node_id: int):
        out = []
        parent = self.node(node_id).parent
        while parent is not None:
            out.append(parent)
            parent = self.node(parent).parent
        return out

    # -- documents and export

    def node_doc(self, node_id: int) -> dict:
        node = self.node(node_id)
        doc = {
            "node_id": int(node.node_id),
            "kind": node.kind.value,
            "parent": None if node.parent is None else int(node.parent),
            "children": [int(c) for c in node.children],
            "network_id": None if node.network_id is None else int(node.network_id),
            "hemisphere": node.hemisphere,
            "homogeneity": float(node.homogeneity),
            "formation_threshold": float(node.formation_threshold),
            "n_svs": len(self.members(node.node_id)),
        }
        if node.kind is NodeKind.LEAF:
            doc["sv_members"] = [int(s) for s in node.sv_members]
            doc["degenerate"] = self.leaf_is_degenerate(node.node_id)
        return doc

    def to_document(self) -> dict:
        """Full tree document; stable field names, versioned schema."""
        return {
            "schema_version": SCHEMA_VERSION,
            "init_threshold": float(self.init_threshold),
            "root_id": int(self.root_id),
            "next_node_id": int(self._next_id),
            "revision": int(self.revision),
            "leaf_count": int(self.leaf_count()),
            "nodes": [self.node_doc(nid) for nid in sorted(self.nodes)],
            "op_log": [rec.to_doc() for rec in self.op_log],
        }

    def export_label_volume(self, atlas: AtlasVolume) -> AtlasVolume:
        """Label volume where each voxel carries its current leaf id."""
        lookup = np.zeros(int(atlas.labels.max()) + 1, dtype=np.int32)
        for leaf_id, sv_members, _, _ in self.current_parcellation():
            for sv in sv_members:
                lookup[sv] = leaf_id
        return AtlasVolume(
            labels=lookup[atlas.labels],
            voxel_size_mm=atlas.voxel_size_mm,
            orientation=atlas.orientation,
        )

    def export(self, atlas: AtlasVolume):
        return self.export_label_volume(atlas), self.to_document()


def init_hierarchy(svs, t: float) -> Hierarchy:
    """Build the initial hierarchy at threshold t.

    Each (hemisphere, network) group is clustered independently; every
    resulting cluster becomes a leaf under its network node. ``svs`` may be
    a list of SuperVoxel or a prebuilt SuperVoxelTable.
    """
    table = svs if isinstance(svs, SuperVoxelTable) else SuperVoxelTable(svs)
    return Hierarchy.build(table, t)


def replay(svs, document: dict) -> Hierarchy:
    """Rebuild a hierarchy from an exported document.

    Re-initializes at the document's threshold and re-applies the op_log
    with its original timestamps, so the rebuilt document is identical to
    the exported one byte for byte.
    """
    h = init_hierarchy(svs, document["init_threshold"])
    for rec in document["op_log"]:
        h.apply_op(rec["kind"], rec["args"], timestamp=rec["timestamp"])
    return h
