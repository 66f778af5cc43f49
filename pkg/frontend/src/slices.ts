/**
 * Orthographic slice panel: sagittal, coronal and axial views side by side.
 *
 * Each view draws the mean-signal underlay as a pixel grid, then the parcel
 * contours on top in their network colors; the highlighted parcel's contour
 * is stroked black. Navigation works two ways: a slider per plane, and
 * clicking a pixel, which moves the other two planes to the clicked voxel.
 * Contour coordinates arrive as (x, y) pairs where x runs along the slice's
 * column axis, matching an SVG viewBox of "0 0 cols rows" directly.
 */
import { clear, htmlEl, svgEl } from "./dom.js";
import { networkColor } from "./palette.js";
import { nodeById } from "./state.js";
import type { HierarchyDoc, PlaneName, SlicePayload } from "./types.js";
import { PLANES, PLANE_AXIS } from "./types.js";

export interface SliceHandlers {
  onIndexChange(plane: PlaneName, index: number): void;
  onVoxelClick(plane: PlaneName, row: number, col: number): void;
}

/**
 * The two planes a click on `plane` at pixel (row, col) navigates, with the
 * slice index each should move to. Rows run along the first remaining
 * volume axis and columns along the second.
 */
export function clickTargets(
  plane: PlaneName,
  row: number,
  col: number,
): [PlaneName, number][] {
  switch (plane) {
    case "axial":
      return [
        ["sagittal", row],
        ["coronal", col],
      ];
    case "coronal":
      return [
        ["sagittal", row],
        ["axial", col],
      ];
    case "sagittal":
      return [
        ["coronal", row],
        ["axial", col],
      ];
  }
}

function grayLevel(value: number, min: number, max: number): string {
  const t = max > min ? (value - min) / (max - min) : 0.5;
  const v = Math.round(30 + t * 195);
  return `rgb(${v},${v},${v})`;
}

function renderOne(
  panel: HTMLElement,
  plane: PlaneName,
  payload: SlicePayload | null,
  doc: HierarchyDoc | null,
  axisLength: number,
  index: number,
  handlers: SliceHandlers,
): void {
  const header = htmlEl("div", { class: "slice-header" });
  header.appendChild(htmlEl("span", { class: "slice-title" }, plane));
  header.appendChild(
    htmlEl(
      "span",
      { class: "slice-index", "data-role": "slice-index" },
      `${index} / ${axisLength - 1}`,
    ),
  );
  panel.appendChild(header);

  const slider = htmlEl("input", {
    type: "range",
    min: 0,
    max: Math.max(axisLength - 1, 0),
    value: index,
    "data-plane": plane,
    class: "slice-slider",
  });
  slider.addEventListener("input", () => {
    handlers.onIndexChange(plane, Number(slider.value));
  });
  panel.appendChild(slider);

  if (payload === null) return;
  const [rows, cols] = payload.shape;
  const scale = 16;
  const svg = svgEl("svg", {
    class: "slice",
    viewBox: `0 0 ${cols} ${rows}`,
    width: cols * scale,
    height: rows * scale,
    "data-plane": plane,
  });

  let min = Infinity;
  let max = -Infinity;
  for (const rowValues of payload.underlay) {
    for (const v of rowValues) {
      min = Math.min(min, v);
      max = Math.max(max, v);
    }
  }
  const pixels = svgEl("g", { class: "underlay" });
  payload.underlay.forEach((rowValues, r) => {
    rowValues.forEach((v, c) => {
      pixels.appendChild(
        svgEl("rect", {
          x: c,
          y: r,
          width: 1,
          height: 1,
          fill: grayLevel(v, min, max),
          "data-row": r,
          "data-col": c,
          class: "voxel",
        }),
      );
    });
  });
  pixels.addEventListener("click", (event) => {
    const cell = (event.target as Element).closest("[data-row]");
    if (!cell) return;
    handlers.onVoxelClick(
      plane,
      Number(cell.getAttribute("data-row")),
      Number(cell.getAttribute("data-col")),
    );
  });
  svg.appendChild(pixels);

  const contours = svgEl("g", { class: "contours" });
  for (const contour of payload.contours) {
    const hemisphere = nodeById(doc, contour.leaf_id)?.hemisphere ?? null;
    const color = networkColor(contour.network_id, hemisphere);
    // the last vertex repeats the first; the polygon closes itself
    const points = contour.points
      .slice(0, -1)
      .map(([x, y]) => `${x},${y}`)
      .join(" ");
    contours.appendChild(
      svgEl("polygon", {
        class: "contour" + (contour.highlighted ? " highlighted" : ""),
        points,
        fill: color,
        "fill-opacity": 0.16,
        stroke: contour.highlighted ? "#000000" : color,
        "stroke-width": contour.highlighted ? 0.3 : 0.15,
        "pointer-events": "none",
        "data-leaf-id": contour.leaf_id,
        "data-network-id": contour.network_id,
      }),
    );
  }
  svg.appendChild(contours);
  panel.appendChild(svg);
}

export function renderSlices(
  container: HTMLElement,
  views: Record<PlaneName, SlicePayload | null>,
  doc: HierarchyDoc | null,
  dims: number[],
  sliceIndex: Record<PlaneName, number>,
  handlers: SliceHandlers,
): void {
  clear(container);
  if (doc === null) {
    container.appendChild(
      htmlEl(
        "div",
        { class: "empty-state", "data-role": "empty-state" },
        "Slices appear here once a hierarchy exists.",
      ),
    );
    delete container.dataset.revision;
    return;
  }
  container.dataset.revision = String(doc.revision);
  for (const plane of PLANES) {
    const panel = htmlEl("div", { class: "slice-panel", "data-plane": plane });
    renderOne(
      panel,
      plane,
      views[plane],
      doc,
      dims[PLANE_AXIS[plane]] ?? 1,
      sliceIndex[plane],
      handlers,
    );
    container.appendChild(panel);
  }
}
