// Component-level checks of the visual encodings, run against recorded
// server payloads: homogeneity-to-radius linearity in the tree, bar-height
// normalization in the chord arcs, one color per parcel across all views,
// and the |r| chord filter.
import { describe, expect, it } from "vitest";

import { ARC_HEIGHT, barHeight, filterChords, renderChords } from "../src/chords.js";
import { networkColor } from "../src/palette.js";
import { renderSlices } from "../src/slices.js";
import { leafOrder, nodeById } from "../src/state.js";
import { NODE_RADIUS, homogeneityRadius, renderTree } from "../src/tree.js";
import type {
  FcPayload,
  HierarchyDoc,
  SlicePayload,
} from "../src/types.js";
import fcFilteredJson from "./fixtures/fc_filtered.json";
import fcPreJson from "./fixtures/fc_pre.json";
import hierarchyJson from "./fixtures/hierarchy.json";
import meta from "./fixtures/meta.json";
import axialJson from "./fixtures/slice_axial_pre.json";
import coronalJson from "./fixtures/slice_coronal_pre.json";
import sagittalJson from "./fixtures/slice_sagittal_pre.json";
import { q, qa, syntheticTree } from "./helpers.js";

const doc = hierarchyJson as unknown as HierarchyDoc;
const fc = fcPreJson as unknown as FcPayload;
const fcFiltered = fcFilteredJson as unknown as FcPayload;

const treeHandlers = { onSelect() {}, onToggleLock() {} };
const chordHandlers = { onSelect() {} };
const sliceHandlers = { onIndexChange() {}, onVoxelClick() {} };

function drawTree(tree: HierarchyDoc): HTMLElement {
  const container = document.createElement("div");
  renderTree(container, tree, { selected: null, locked: [] }, treeHandlers);
  return container;
}

function drawChords(range: { lo: number; hi: number }): HTMLElement {
  const container = document.createElement("div");
  renderChords(container, fc, range, chordHandlers);
  return container;
}

function innerRadius(container: HTMLElement, nodeId: number): number {
  return Number(
    q(`.node[data-node-id="${nodeId}"] circle.inner`, container).getAttribute("r"),
  );
}

/** The two arc radii of an annular-sector path, outer first. */
function arcRadii(d: string): [number, number] {
  const radii = [...d.matchAll(/A ([0-9.eE+-]+) /g)].map((m) => parseFloat(m[1]));
  if (radii.length !== 2) throw new Error(`expected two arcs in path: ${d}`);
  return [radii[0], radii[1]];
}

describe("homogeneity to radius", () => {
  it("is linear, clamped to [0, 1], and fills the ring at 1.0", () => {
    expect(homogeneityRadius(1.0)).toBe(NODE_RADIUS);
    expect(homogeneityRadius(0.5)).toBeCloseTo(NODE_RADIUS / 2, 12);
    expect(homogeneityRadius(0)).toBe(0);
    expect(homogeneityRadius(-0.3)).toBe(0);
    expect(homogeneityRadius(1.7)).toBe(NODE_RADIUS);
    // doubling homogeneity doubles the radius
    expect(homogeneityRadius(0.8) / homogeneityRadius(0.4)).toBeCloseTo(2, 12);
  });

  it("renders 0.4 at exactly half the disc radius of 0.8", () => {
    const container = drawTree(syntheticTree(0.4, 0.8));
    expect(innerRadius(container, 4) / innerRadius(container, 5)).toBeCloseTo(0.5, 12);
  });

  it("keeps radii proportional to homogeneity across the captured tree", () => {
    const container = drawTree(doc);
    const leaves = doc.nodes.filter((n) => n.kind === "leaf");
    expect(leaves.length).toBeGreaterThan(1);
    for (const leaf of leaves) {
      expect(innerRadius(container, leaf.node_id)).toBeCloseTo(
        homogeneityRadius(leaf.homogeneity),
        9,
      );
    }
    for (const a of leaves) {
      for (const b of leaves) {
        const ratio = innerRadius(container, a.node_id) / innerRadius(container, b.node_id);
        expect(ratio).toBeCloseTo(a.homogeneity / b.homogeneity, 9);
      }
    }
  });
});

describe("bar-height normalization", () => {
  it("maps |r| linearly onto the arc height, full height at |r| = 1", () => {
    expect(barHeight(1)).toBe(ARC_HEIGHT);
    expect(barHeight(0.5)).toBeCloseTo(ARC_HEIGHT / 2, 12);
    expect(barHeight(0)).toBe(0);
    expect(barHeight(1.4)).toBe(ARC_HEIGHT);
  });

  it("draws every bar with radial extent |r| * ARC_HEIGHT", () => {
    const container = drawChords({ lo: 0, hi: 1 });
    const bars = qa<SVGPathElement>(".bar", container);
    const n = fc.parcel_order.length;
    expect(bars).toHaveLength(n * (n - 1));
    for (const bar of bars) {
      const i = fc.parcel_order.indexOf(Number(bar.getAttribute("data-parcel")));
      const j = fc.parcel_order.indexOf(Number(bar.getAttribute("data-other")));
      expect(i).toBeGreaterThanOrEqual(0);
      expect(j).toBeGreaterThanOrEqual(0);
      const expected = Math.abs(fc.matrix[i][j]) * ARC_HEIGHT;
      const [outer, inner] = arcRadii(bar.getAttribute("d") ?? "");
      expect(outer - inner).toBeCloseTo(expected, 9);
      expect(Number(bar.getAttribute("data-h"))).toBeCloseTo(expected, 12);
    }
  });
});

describe("cross-view color consistency", () => {
  it("gives one parcel the same color in tree, chord arcs, and slice contours", () => {
    const treeC = drawTree(doc);
    const chordC = drawChords({ lo: 0, hi: 1 });
    const sliceC = document.createElement("div");
    renderSlices(
      sliceC,
      {
        sagittal: sagittalJson as unknown as SlicePayload,
        coronal: coronalJson as unknown as SlicePayload,
        axial: axialJson as unknown as SlicePayload,
      },
      doc,
      meta.dims,
      meta.slice_indices as Record<"sagittal" | "coronal" | "axial", number>,
      sliceHandlers,
    );

    for (const parcel of fc.parcels) {
      const expected = networkColor(parcel.network_id, parcel.hemisphere);
      const treeFill = q(
        `.node[data-node-id="${parcel.leaf_id}"] circle.inner`,
        treeC,
      ).getAttribute("fill");
      const arcFill = q(
        `.parcel-arc[data-leaf-id="${parcel.leaf_id}"]`,
        chordC,
      ).getAttribute("fill");
      expect(treeFill).toBe(expected);
      expect(arcFill).toBe(expected);
      const contours = qa(`.contour[data-leaf-id="${parcel.leaf_id}"]`, sliceC);
      expect(contours.length).toBeGreaterThan(0);
      for (const contour of contours) {
        expect(contour.getAttribute("stroke")).toBe(expected);
        expect(contour.getAttribute("fill")).toBe(expected);
      }
    }
  });

  it("keeps hemisphere variants of one network distinct but related to the group arc", () => {
    expect(networkColor(1, "L")).not.toBe(networkColor(1, "R"));
    expect(networkColor(1, "L")).not.toBe(networkColor(2, "L"));
    const chordC = drawChords({ lo: 0, hi: 1 });
    for (const arc of qa(".network-arc", chordC)) {
      const netId = Number(arc.getAttribute("data-network-id"));
      const hemi = arc.getAttribute("data-hemisphere") as "L" | "R";
      expect(arc.getAttribute("fill")).toBe(networkColor(netId, hemi));
    }
  });
});

describe("chord filtering", () => {
  it("hides chords outside the |r| range but keeps the parcel arcs", () => {
    const all = drawChords({ lo: 0, hi: 1 });
    const n = fc.parcel_order.length;
    expect(qa(".chord", all)).toHaveLength((n * (n - 1)) / 2);
    expect(qa(".parcel-arc", all)).toHaveLength(n);

    const none = drawChords({ lo: 0.999, hi: 1 });
    expect(qa(".chord", none)).toHaveLength(0);
    expect(qa(".parcel-arc", none)).toHaveLength(n);
  });

  it("matches the server's own filter output on the captured range", () => {
    const mine = filterChords(fc, { lo: meta.filtered_lo, hi: 1 }).map((c) => ({
      a: fc.parcel_order[c.i],
      b: fc.parcel_order[c.j],
      r: c.r,
    }));
    expect(mine).toEqual(fcFiltered.chords);
  });

  it("shows only incident chords while hovering a parcel arc", () => {
    const container = drawChords({ lo: 0, hi: 1 });
    const group = q(`.parcel-group[data-leaf-id="${meta.m1}"]`, container);
    group.dispatchEvent(new Event("pointerenter"));

    const visible = qa(".chord:not(.dimmed)", container);
    const hidden = qa(".chord.dimmed", container);
    expect(visible).toHaveLength(fc.parcel_order.length - 1);
    for (const chord of visible) {
      const touches =
        chord.getAttribute("data-a") === String(meta.m1) ||
        chord.getAttribute("data-b") === String(meta.m1);
      expect(touches).toBe(true);
      expect(chord.getAttribute("visibility")).toBe("visible");
    }
    for (const chord of hidden) {
      expect(chord.getAttribute("visibility")).toBe("hidden");
    }

    group.dispatchEvent(new Event("pointerleave"));
    expect(qa(".chord.dimmed", container)).toHaveLength(0);
  });

  it("lays parcels around the circle in the tree's own leaf order", () => {
    const container = drawChords({ lo: 0, hi: 1 });
    const arcIds = qa(".parcel-arc", container).map((a) =>
      Number(a.getAttribute("data-leaf-id")),
    );
    expect(arcIds).toEqual(leafOrder(doc));
    expect(arcIds).toEqual(fc.parcel_order);
    // and that order is hemisphere-major: all left parcels precede all right
    const hemis = arcIds.map((id) => nodeById(doc, id)?.hemisphere);
    const firstRight = hemis.indexOf("R");
    expect(firstRight).toBeGreaterThan(0);
    expect(hemis.slice(0, firstRight).every((h) => h === "L")).toBe(true);
    expect(hemis.slice(firstRight).every((h) => h === "R")).toBe(true);
  });
});
