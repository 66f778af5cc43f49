/**
 * Client-side view state and the mirrored tree document.
 *
 * The mirror is patched from steering deltas rather than refetched: a delta
 * carries every node it removed, added or updated as a full node document,
 * so upserting those and adopting the delta's revision and leaf count keeps
 * the mirror equal to the server's tree. Every view renders from one mirror
 * snapshot, which is what keeps the panels on a single revision.
 *
 * Steering preconditions are duplicated here as pure predicates (canMerge,
 * canCollapse, canExpand, expandThresholdError) so buttons and dialogs can
 * refuse a request the server would reject anyway.
 */
import type {
  DeltaDoc,
  HierarchyDoc,
  NodeDoc,
  PlaneName,
} from "./types.js";

export interface FilterRange {
  lo: number;
  hi: number;
}

export interface ViewState {
  doc: HierarchyDoc | null;
  selected: number | null;
  locked: number[];
  fcRange: FilterRange;
  sliceIndex: Record<PlaneName, number>;
  brush: [number, number] | null;
}

export function initialState(): ViewState {
  return {
    doc: null,
    selected: null,
    locked: [],
    fcRange: { lo: 0, hi: 1 },
    sliceIndex: { sagittal: 0, coronal: 0, axial: 0 },
    brush: null,
  };
}

type Listener = (state: ViewState) => void;

export class Store {
  private state: ViewState;
  private listeners = new Set<Listener>();

  constructor(state: ViewState = initialState()) {
    this.state = state;
  }

  get(): ViewState {
    return this.state;
  }

  set(patch: Partial<ViewState>): void {
    this.state = { ...this.state, ...patch };
    for (const fn of this.listeners) fn(this.state);
  }

  subscribe(fn: Listener): () => void {
    this.listeners.add(fn);
    return () => this.listeners.delete(fn);
  }
}

// ----------------------------------------------------------------------
// tree mirror helpers

export function docIndex(doc: HierarchyDoc): Map<number, NodeDoc> {
  return new Map(doc.nodes.map((n) => [n.node_id, n]));
}

export function nodeById(doc: HierarchyDoc | null, id: number | null): NodeDoc | null {
  if (doc === null || id === null) return null;
  return doc.nodes.find((n) => n.node_id === id) ?? null;
}

/** Leaf ids in tree traversal order: hemisphere, then network, then position. */
export function leafOrder(doc: HierarchyDoc): number[] {
  const byId = docIndex(doc);
  const out: number[] = [];
  const walk = (id: number): void => {
    const node = byId.get(id);
    if (!node) return;
    if (node.kind === "leaf") {
      out.push(id);
      return;
    }
    for (const child of node.children) walk(child);
  };
  walk(doc.root_id);
  return out;
}

/** Patch the mirror with a steering delta; a no-split delta changes nothing. */
export function applyDelta(doc: HierarchyDoc, delta: DeltaDoc): HierarchyDoc {
  if (delta.no_split) return doc;
  const byId = docIndex(doc);
  for (const id of delta.removed) byId.delete(id);
  for (const node of [...delta.added, ...delta.updated]) byId.set(node.node_id, node);
  const nodes = [...byId.values()].sort((a, b) => a.node_id - b.node_id);
  const nextId = Math.max(doc.next_node_id, ...delta.added.map((n) => n.node_id + 1));
  return {
    ...doc,
    nodes,
    next_node_id: nextId,
    revision: delta.revision,
    leaf_count: delta.leaf_count,
  };
}

/** Drop selection and locks that point at nodes the last delta removed. */
export function pruneSelection(
  doc: HierarchyDoc,
  selected: number | null,
  locked: number[],
): { selected: number | null; locked: number[] } {
  const byId = docIndex(doc);
  return {
    selected: selected !== null && byId.has(selected) ? selected : null,
    locked: locked.filter((id) => byId.has(id)),
  };
}

// ----------------------------------------------------------------------
// interaction rules

export interface LockOutcome {
  locked: number[];
  changed: boolean;
  reason?: string;
}

export function toggleLock(
  doc: HierarchyDoc | null,
  locked: number[],
  nodeId: number,
): LockOutcome {
  const node = nodeById(doc, nodeId);
  if (!node || node.kind !== "leaf") {
    return { locked, changed: false, reason: "only parcels (tree leaves) can be locked" };
  }
  if (locked.includes(nodeId)) {
    return { locked: locked.filter((id) => id !== nodeId), changed: true };
  }
  if (locked.length >= 2) {
    return {
      locked,
      changed: false,
      reason: "two parcels are already locked; unlock one first",
    };
  }
  return { locked: [...locked, nodeId], changed: true };
}

export function canMerge(doc: HierarchyDoc | null, locked: number[]): boolean {
  if (!doc || locked.length !== 2 || locked[0] === locked[1]) return false;
  return locked.every((id) => nodeById(doc, id)?.kind === "leaf");
}

export function canCollapse(doc: HierarchyDoc | null, selected: number | null): boolean {
  return nodeById(doc, selected)?.kind === "cluster";
}

export function canExpand(doc: HierarchyDoc | null, selected: number | null): boolean {
  const node = nodeById(doc, selected);
  return node !== null && node.kind === "leaf" && node.n_svs >= 2;
}

/**
 * Validation the expand dialog runs before sending anything. Mirrors the
 * server's checks in the same order: range first, then strict tightness
 * against the leaf's formation threshold.
 */
export function expandThresholdError(node: NodeDoc, tNew: number): string | null {
  if (!Number.isFinite(tNew)) return "threshold must be a number";
  if (tNew < 0 || tNew > 2) return `threshold ${tNew} is outside [0, 2]`;
  if (tNew >= node.formation_threshold) {
    return (
      `threshold ${tNew} must be strictly below the parcel's formation ` +
      `threshold ${node.formation_threshold}`
    );
  }
  return null;
}
