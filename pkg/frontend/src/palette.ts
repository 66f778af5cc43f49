/**
 * Network color assignment shared by every view.
 *
 * Each network gets one base color from a categorical palette; the left
 * hemisphere renders a lighter variant and the right a darker one. All
 * views call networkColor, so a parcel's color in the tree, the chord
 * diagram and the slice contours is the same string by construction.
 */
import type { Hemisphere } from "./types.js";

const BASE_COLORS = [
  "#4e79a7",
  "#f28e2b",
  "#e15759",
  "#76b7b2",
  "#59a14f",
  "#edc948",
  "#b07aa1",
  "#ff9da7",
  "#9c755f",
  "#bab0ac",
];

/** Structural nodes (root, hemispheres) carry no network. */
export const NEUTRAL_COLOR = "#8a8f98";

const LIGHTEN = 0.35;
const DARKEN = 0.3;

function channel(hex: string, i: number): number {
  return parseInt(hex.slice(1 + 2 * i, 3 + 2 * i), 16);
}

/** Blend toward a target channel value; w=0 keeps the base color. */
function blend(hex: string, target: number, w: number): string {
  const parts = [0, 1, 2].map((i) => {
    const v = Math.round(channel(hex, i) * (1 - w) + target * w);
    return v.toString(16).padStart(2, "0");
  });
  return "#" + parts.join("");
}

export function networkColor(
  networkId: number | null,
  hemisphere: Hemisphere | null,
): string {
  if (networkId === null) return NEUTRAL_COLOR;
  const base = BASE_COLORS[(((networkId - 1) % BASE_COLORS.length) + BASE_COLORS.length) % BASE_COLORS.length];
  if (hemisphere === "L") return blend(base, 255, LIGHTEN);
  if (hemisphere === "R") return blend(base, 0, DARKEN);
  return base;
}
