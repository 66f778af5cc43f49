/**
 * Mean time-course plot with a standard-error band.
 *
 * Shows one series for the selected or locked parcel and overlays a second
 * when two parcels are locked. A drag on the plot brushes the time axis:
 * the x-domain becomes exactly the brushed sample range, and a plain click
 * clears the brush back to the full extent. A singleton parcel has zero
 * standard error everywhere, so its band collapses to the mean line.
 */
import { clear, htmlEl, svgEl } from "./dom.js";
import type { BandedSeries } from "./types.js";

export interface SeriesSpec {
  label: string;
  color: string;
  banded: BandedSeries;
}

export interface TimecourseHandlers {
  onBrush(range: [number, number] | null): void;
}

const WIDTH = 560;
const HEIGHT = 190;
const PAD = { left: 44, right: 12, top: 10, bottom: 26 };
const PLOT_W = WIDTH - PAD.left - PAD.right;
const PLOT_H = HEIGHT - PAD.top - PAD.bottom;

/** Pixel layout of the plot area, for callers that map samples to x positions. */
export const TC_LAYOUT = {
  width: WIDTH,
  height: HEIGHT,
  padLeft: PAD.left,
  plotWidth: PLOT_W,
} as const;

export function renderTimecourse(
  container: HTMLElement,
  series: SeriesSpec[],
  brush: [number, number] | null,
  handlers: TimecourseHandlers,
): void {
  clear(container);
  if (series.length === 0) {
    container.appendChild(
      htmlEl(
        "div",
        { class: "empty-state", "data-role": "empty-state" },
        "Select or lock a parcel to plot its mean time-course.",
      ),
    );
    delete container.dataset.xMin;
    delete container.dataset.xMax;
    return;
  }

  const nt = Math.max(...series.map((s) => s.banded.mean.length));
  const [xMin, xMax] = brush ?? [0, nt - 1];
  container.dataset.xMin = String(xMin);
  container.dataset.xMax = String(xMax);

  const lo = Math.max(0, Math.ceil(xMin));
  const hi = Math.min(nt - 1, Math.floor(xMax));
  let yMin = Infinity;
  let yMax = -Infinity;
  for (const s of series) {
    for (let t = lo; t <= hi && t < s.banded.mean.length; t++) {
      yMin = Math.min(yMin, s.banded.mean[t] - s.banded.se[t]);
      yMax = Math.max(yMax, s.banded.mean[t] + s.banded.se[t]);
    }
  }
  if (!Number.isFinite(yMin)) {
    yMin = -1;
    yMax = 1;
  }
  if (yMin === yMax) {
    yMin -= 1;
    yMax += 1;
  }

  const sx = (t: number): number =>
    PAD.left + ((t - xMin) / Math.max(xMax - xMin, 1e-12)) * PLOT_W;
  const sy = (v: number): number =>
    PAD.top + (1 - (v - yMin) / (yMax - yMin)) * PLOT_H;

  const svg = svgEl("svg", {
    class: "timecourse",
    viewBox: `0 0 ${WIDTH} ${HEIGHT}`,
    width: WIDTH,
    height: HEIGHT,
  });

  svg.appendChild(
    svgEl("rect", {
      class: "plot-bg",
      x: PAD.left,
      y: PAD.top,
      width: PLOT_W,
      height: PLOT_H,
      fill: "#fafafa",
      stroke: "#ddd",
    }),
  );

  series.forEach((s, idx) => {
    const ts: number[] = [];
    for (let t = lo; t <= hi && t < s.banded.mean.length; t++) ts.push(t);
    if (ts.length === 0) return;
    const upper = ts.map((t) => `${sx(t)},${sy(s.banded.mean[t] + s.banded.se[t])}`);
    const lower = ts
      .slice()
      .reverse()
      .map((t) => `${sx(t)},${sy(s.banded.mean[t] - s.banded.se[t])}`);
    const g = svgEl("g", { class: "series-group", "data-series-index": idx });
    g.appendChild(
      svgEl("polygon", {
        class: "band",
        points: [...upper, ...lower].join(" "),
        fill: s.color,
        "fill-opacity": 0.22,
        stroke: "none",
      }),
    );
    g.appendChild(
      svgEl("polyline", {
        class: "series",
        points: ts.map((t) => `${sx(t)},${sy(s.banded.mean[t])}`).join(" "),
        fill: "none",
        stroke: s.color,
        "stroke-width": 1.6,
      }),
    );
    const title = svgEl("title");
    title.textContent = `${s.label} (n=${s.banded.n_members})`;
    g.appendChild(title);
    svg.appendChild(g);
  });

  const axis = svgEl("g", { class: "axis" });
  axis.appendChild(
    svgEl("line", {
      x1: PAD.left,
      y1: PAD.top + PLOT_H,
      x2: PAD.left + PLOT_W,
      y2: PAD.top + PLOT_H,
      stroke: "#888",
    }),
  );
  const xLabel = (value: number, x: number): SVGTextElement => {
    const el = svgEl("text", {
      x,
      y: PAD.top + PLOT_H + 16,
      "text-anchor": "middle",
      class: "tick",
    });
    el.textContent = String(value);
    return el;
  };
  axis.appendChild(xLabel(xMin, PAD.left));
  axis.appendChild(xLabel(xMax, PAD.left + PLOT_W));
  const yLabel = (value: number, y: number): SVGTextElement => {
    const el = svgEl("text", {
      x: PAD.left - 6,
      y: y + 4,
      "text-anchor": "end",
      class: "tick",
    });
    el.textContent = value.toPrecision(3);
    return el;
  };
  axis.appendChild(yLabel(yMax, PAD.top));
  axis.appendChild(yLabel(yMin, PAD.top + PLOT_H));
  svg.appendChild(axis);

  // brush capture: drag selects a sample range, a bare click resets
  const capture = svgEl("rect", {
    class: "brush-capture",
    x: PAD.left,
    y: PAD.top,
    width: PLOT_W,
    height: PLOT_H,
    fill: "transparent",
  });
  let dragFrom: number | null = null;
  const marker = svgEl("rect", {
    class: "brush-marker",
    y: PAD.top,
    height: PLOT_H,
    fill: "#4e79a7",
    "fill-opacity": 0.15,
    visibility: "hidden",
  });
  const toSample = (event: MouseEvent): number => {
    const rect = svg.getBoundingClientRect();
    const scale = rect.width > 0 ? WIDTH / rect.width : 1;
    const px = (event.clientX - rect.left) * scale;
    const t = xMin + ((px - PAD.left) / PLOT_W) * (xMax - xMin);
    return Math.round(Math.min(xMax, Math.max(xMin, t)));
  };
  capture.addEventListener("pointerdown", (event) => {
    dragFrom = toSample(event as MouseEvent);
  });
  capture.addEventListener("pointermove", (event) => {
    if (dragFrom === null) return;
    const now = toSample(event as MouseEvent);
    marker.setAttribute("x", String(sx(Math.min(dragFrom, now))));
    marker.setAttribute("width", String(Math.abs(sx(now) - sx(dragFrom))));
    marker.setAttribute("visibility", "visible");
  });
  capture.addEventListener("pointerup", (event) => {
    if (dragFrom === null) return;
    const to = toSample(event as MouseEvent);
    const range: [number, number] = [Math.min(dragFrom, to), Math.max(dragFrom, to)];
    dragFrom = null;
    handlers.onBrush(range[0] === range[1] ? null : range);
  });
  svg.appendChild(marker);
  svg.appendChild(capture);
  container.appendChild(svg);
}
