/**
 * Node-link diagram of the parcel hierarchy.
 *
 * Leaves are spaced evenly in tree order and parents sit centered above
 * their children. Each node draws an outer ring plus an inner disc whose
 * radius encodes homogeneity: the value is clamped to [0, 1] and mapped
 * linearly onto [0, NODE_RADIUS], so twice the homogeneity means twice the
 * radius and 1.0 fills the ring exactly.
 */
import { clear, htmlEl, svgEl } from "./dom.js";
import { networkColor } from "./palette.js";
import { docIndex } from "./state.js";
import type { HierarchyDoc, NodeDoc } from "./types.js";

export const NODE_RADIUS = 14;
const LEAF_SPACING = 46;
const LEVEL_HEIGHT = 72;
const MARGIN = 30;

export function homogeneityRadius(h: number, maxRadius: number = NODE_RADIUS): number {
  const clamped = Math.min(1, Math.max(0, h));
  return clamped * maxRadius;
}

export interface TreeHandlers {
  onSelect(nodeId: number): void;
  onToggleLock(nodeId: number): void;
}

interface Placed {
  node: NodeDoc;
  x: number;
  y: number;
}

function layout(doc: HierarchyDoc): Map<number, Placed> {
  const byId = docIndex(doc);
  const placed = new Map<number, Placed>();
  let nextLeafX = 0;
  const walk = (id: number, depth: number): number => {
    const node = byId.get(id);
    if (!node) return nextLeafX;
    let x: number;
    if (node.children.length === 0) {
      x = nextLeafX;
      nextLeafX += LEAF_SPACING;
    } else {
      const xs = node.children.map((c) => walk(c, depth + 1));
      x = (Math.min(...xs) + Math.max(...xs)) / 2;
    }
    placed.set(id, { node, x, y: depth * LEVEL_HEIGHT });
    return x;
  };
  walk(doc.root_id, 0);
  return placed;
}

export function renderTree(
  container: HTMLElement,
  doc: HierarchyDoc | null,
  view: { selected: number | null; locked: number[] },
  handlers: TreeHandlers,
): void {
  clear(container);
  if (doc === null) {
    container.appendChild(
      htmlEl(
        "div",
        { class: "empty-state", "data-role": "empty-state" },
        "No hierarchy yet. Pick a threshold and press init to cluster the dataset.",
      ),
    );
    delete container.dataset.revision;
    return;
  }
  container.dataset.revision = String(doc.revision);

  const placed = layout(doc);
  const maxX = Math.max(...[...placed.values()].map((p) => p.x));
  const maxY = Math.max(...[...placed.values()].map((p) => p.y));
  const width = maxX + 2 * MARGIN;
  const height = maxY + 2 * MARGIN;
  const svg = svgEl("svg", {
    class: "tree",
    viewBox: `0 0 ${width} ${height}`,
    width,
    height,
  });

  const edges = svgEl("g", { class: "edges" });
  for (const { node, x, y } of placed.values()) {
    if (node.parent === null) continue;
    const parent = placed.get(node.parent);
    if (!parent) continue;
    edges.appendChild(
      svgEl("line", {
        x1: parent.x + MARGIN,
        y1: parent.y + MARGIN,
        x2: x + MARGIN,
        y2: y + MARGIN,
        class: "edge",
      }),
    );
  }
  svg.appendChild(edges);

  const nodes = svgEl("g", { class: "nodes" });
  for (const { node, x, y } of placed.values()) {
    const color = networkColor(node.network_id, node.hemisphere);
    const selected = view.selected === node.node_id;
    const locked = view.locked.includes(node.node_id);
    const g = svgEl("g", {
      class:
        "node" + (selected ? " selected" : "") + (locked ? " locked" : ""),
      transform: `translate(${x + MARGIN}, ${y + MARGIN})`,
      "data-node-id": node.node_id,
      "data-kind": node.kind,
    });
    if (locked) {
      g.appendChild(
        svgEl("circle", {
          class: "lock-ring",
          r: NODE_RADIUS + 4,
          fill: "none",
          stroke: "#1f1f1f",
          "stroke-dasharray": "3 2",
          "stroke-width": 1.5,
        }),
      );
    }
    g.appendChild(
      svgEl("circle", {
        class: "ring",
        r: NODE_RADIUS,
        fill: "#ffffff",
        stroke: color,
        "stroke-width": selected ? 3 : 1.5,
      }),
    );
    g.appendChild(
      svgEl("circle", {
        class: "inner",
        r: homogeneityRadius(node.homogeneity),
        fill: color,
      }),
    );
    const title = svgEl("title");
    title.textContent =
      `${node.kind} ${node.node_id}` +
      (node.network_id !== null ? ` net ${node.network_id}${node.hemisphere}` : "") +
      ` h=${node.homogeneity.toFixed(3)} n_svs=${node.n_svs}`;
    g.appendChild(title);
    g.addEventListener("click", () => handlers.onSelect(node.node_id));
    g.addEventListener("dblclick", () => handlers.onToggleLock(node.node_id));
    nodes.appendChild(g);
  }
  svg.appendChild(nodes);
  container.appendChild(svg);
}
