/**
 * Chord diagram of the current parcellation's functional connectivity.
 *
 * Parcels are laid out around a circle in the same hemisphere-then-network
 * order the tree uses (the server's parcel_order is already that order).
 * Each parcel owns an arc carrying one bar per other parcel: bar length is
 * |r| mapped linearly onto the arc's radial height, so |r| = 1 fills the
 * arc. Network arcs wrap each group in the shared network color. Chords
 * connect pairs whose |r| falls inside the filter range, inclusive on both
 * ends, matching the server's own filter rule. Hovering a parcel arc hides
 * every chord not incident to it.
 */
import { clear, htmlEl, svgEl } from "./dom.js";
import { networkColor } from "./palette.js";
import type { FilterRange } from "./state.js";
import type { FcPayload } from "./types.js";

export const ARC_HEIGHT = 18;
const R_CHORD = 116;
const R_ARC = 122;
const R_NET = R_ARC + ARC_HEIGHT + 4;
const NET_THICKNESS = 10;
const GROUP_GAP = 0.12;
const PARCEL_GAP = 0.02;
const SIZE = 2 * (R_NET + NET_THICKNESS + 8);
const CENTER = SIZE / 2;

export function barHeight(absR: number): number {
  return Math.min(1, Math.max(0, absR)) * ARC_HEIGHT;
}

export interface ChordHandlers {
  onSelect(leafId: number): void;
}

interface Slot {
  a0: number;
  a1: number;
}

function polar(r: number, angle: number): [number, number] {
  return [CENTER + r * Math.cos(angle), CENTER + r * Math.sin(angle)];
}

function annularSector(r0: number, r1: number, a0: number, a1: number): string {
  const large = a1 - a0 > Math.PI ? 1 : 0;
  const [x0, y0] = polar(r1, a0);
  const [x1, y1] = polar(r1, a1);
  const [x2, y2] = polar(r0, a1);
  const [x3, y3] = polar(r0, a0);
  return (
    `M ${x0} ${y0} A ${r1} ${r1} 0 ${large} 1 ${x1} ${y1} ` +
    `L ${x2} ${y2} A ${r0} ${r0} 0 ${large} 0 ${x3} ${y3} Z`
  );
}

/** Angular slots per parcel, with wider gaps between network groups. */
function slots(fc: FcPayload): Slot[] {
  const n = fc.parcels.length;
  let groups = 0;
  for (let i = 0; i < n; i++) {
    const prev = fc.parcels[i - 1];
    const cur = fc.parcels[i];
    if (
      i === 0 ||
      prev.network_id !== cur.network_id ||
      prev.hemisphere !== cur.hemisphere
    ) {
      groups += 1;
    }
  }
  const gapTotal = groups * GROUP_GAP + (n - groups) * PARCEL_GAP;
  const span = (2 * Math.PI - gapTotal) / n;
  const out: Slot[] = [];
  let angle = -Math.PI / 2;
  for (let i = 0; i < n; i++) {
    if (i > 0) {
      const prev = fc.parcels[i - 1];
      const cur = fc.parcels[i];
      const sameGroup =
        prev.network_id === cur.network_id && prev.hemisphere === cur.hemisphere;
      angle += sameGroup ? PARCEL_GAP : GROUP_GAP;
    }
    out.push({ a0: angle, a1: angle + span });
    angle += span;
  }
  return out;
}

/** Client-side mirror of the server's chord filter: i < j, lo <= |r| <= hi. */
export function filterChords(
  fc: FcPayload,
  range: FilterRange,
): { i: number; j: number; r: number }[] {
  const out: { i: number; j: number; r: number }[] = [];
  const n = fc.parcel_order.length;
  for (let i = 0; i < n; i++) {
    for (let j = i + 1; j < n; j++) {
      const r = fc.matrix[i][j];
      if (range.lo <= Math.abs(r) && Math.abs(r) <= range.hi) {
        out.push({ i, j, r });
      }
    }
  }
  out.sort((a, b) => Math.abs(b.r) - Math.abs(a.r) || a.i - b.i || a.j - b.j);
  return out;
}

export function renderChords(
  container: HTMLElement,
  fc: FcPayload | null,
  range: FilterRange,
  handlers: ChordHandlers,
): void {
  clear(container);
  if (fc === null) {
    container.appendChild(
      htmlEl(
        "div",
        { class: "empty-state", "data-role": "empty-state" },
        "Connectivity appears here once a hierarchy exists.",
      ),
    );
    delete container.dataset.revision;
    return;
  }
  container.dataset.revision = String(fc.revision);

  const svg = svgEl("svg", {
    class: "chords",
    viewBox: `0 0 ${SIZE} ${SIZE}`,
    width: SIZE,
    height: SIZE,
  });
  const parcelSlots = slots(fc);
  const n = fc.parcels.length;

  const chordLayer = svgEl("g", { class: "chord-layer" });
  for (const { i, j, r } of filterChords(fc, range)) {
    const [x0, y0] = polar(R_CHORD, (parcelSlots[i].a0 + parcelSlots[i].a1) / 2);
    const [x1, y1] = polar(R_CHORD, (parcelSlots[j].a0 + parcelSlots[j].a1) / 2);
    const chord = svgEl("path", {
      class: "chord",
      d: `M ${x0} ${y0} Q ${CENTER} ${CENTER} ${x1} ${y1}`,
      fill: "none",
      stroke: networkColor(fc.parcels[i].network_id, fc.parcels[i].hemisphere),
      "stroke-width": 1 + 2.5 * Math.abs(r),
      "stroke-opacity": 0.6,
      "data-a": fc.parcel_order[i],
      "data-b": fc.parcel_order[j],
      "data-r": r,
    });
    const title = svgEl("title");
    title.textContent = `${fc.parcel_order[i]} to ${fc.parcel_order[j]}: r=${r.toFixed(3)}`;
    chord.appendChild(title);
    chordLayer.appendChild(chord);
  }
  svg.appendChild(chordLayer);

  const setHover = (leafId: number | null): void => {
    for (const chord of chordLayer.querySelectorAll<SVGPathElement>(".chord")) {
      const incident =
        leafId === null ||
        chord.getAttribute("data-a") === String(leafId) ||
        chord.getAttribute("data-b") === String(leafId);
      chord.setAttribute("visibility", incident ? "visible" : "hidden");
      chord.classList.toggle("dimmed", !incident);
    }
  };

  const arcLayer = svgEl("g", { class: "arc-layer" });
  for (let i = 0; i < n; i++) {
    const parcel = fc.parcels[i];
    const { a0, a1 } = parcelSlots[i];
    const color = networkColor(parcel.network_id, parcel.hemisphere);
    const g = svgEl("g", {
      class: "parcel-group",
      "data-leaf-id": parcel.leaf_id,
    });
    const arc = svgEl("path", {
      class: "parcel-arc",
      d: annularSector(R_ARC, R_ARC + ARC_HEIGHT, a0, a1),
      fill: color,
      "fill-opacity": 0.18,
      stroke: color,
      "stroke-width": 0.8,
      "data-leaf-id": parcel.leaf_id,
    });
    const title = svgEl("title");
    title.textContent =
      `parcel ${parcel.leaf_id} net ${parcel.network_id}${parcel.hemisphere} ` +
      `h=${parcel.homogeneity.toFixed(3)}`;
    arc.appendChild(title);
    g.appendChild(arc);

    // one bar per other parcel, in parcel order, |r| mapped onto arc height
    const others = fc.parcel_order.map((_, j) => j).filter((j) => j !== i);
    const slotWidth = (a1 - a0) / Math.max(others.length, 1);
    others.forEach((j, k) => {
      const h = barHeight(fc.bars[i][j]);
      const b0 = a0 + k * slotWidth;
      const bar = svgEl("path", {
        class: "bar",
        d: annularSector(R_ARC, R_ARC + h, b0, b0 + slotWidth),
        fill: networkColor(fc.parcels[j].network_id, fc.parcels[j].hemisphere),
        "data-parcel": fc.parcel_order[i],
        "data-other": fc.parcel_order[j],
        "data-h": h,
      });
      g.appendChild(bar);
    });

    g.addEventListener("pointerenter", () => setHover(parcel.leaf_id));
    g.addEventListener("pointerleave", () => setHover(null));
    g.addEventListener("click", () => handlers.onSelect(parcel.leaf_id));
    arcLayer.appendChild(g);
  }
  svg.appendChild(arcLayer);

  const netLayer = svgEl("g", { class: "network-layer" });
  let start = 0;
  for (let i = 1; i <= n; i++) {
    const prev = fc.parcels[i - 1];
    const boundary =
      i === n ||
      fc.parcels[i].network_id !== prev.network_id ||
      fc.parcels[i].hemisphere !== prev.hemisphere;
    if (!boundary) continue;
    const arc = svgEl("path", {
      class: "network-arc",
      d: annularSector(
        R_NET,
        R_NET + NET_THICKNESS,
        parcelSlots[start].a0,
        parcelSlots[i - 1].a1,
      ),
      fill: networkColor(prev.network_id, prev.hemisphere),
      "data-network-id": prev.network_id,
      "data-hemisphere": prev.hemisphere,
    });
    const title = svgEl("title");
    title.textContent = `network ${prev.network_id} (${prev.hemisphere})`;
    arc.appendChild(title);
    netLayer.appendChild(arc);
    start = i;
  }
  svg.appendChild(netLayer);
  container.appendChild(svg);
}
