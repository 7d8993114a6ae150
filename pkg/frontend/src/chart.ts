/**
 * Convergence chart geometry: maps the trial trace to SVG polyline
 * points.  Suggestion and correction are separate series so the two
 * curves visibly merge as the learner settles.
 */

import type { TrialPoint } from "./state.js";

export interface ChartGeometry {
  /** "x,y x,y ..." polyline for the server suggestions. */
  suggested: string;
  /** "x,y x,y ..." polyline for the user corrections. */
  target: string;
  pointCount: number;
}

export function chartGeometry(
  trace: readonly TrialPoint[],
  width: number,
  height: number,
): ChartGeometry {
  if (width <= 0 || height <= 0) throw new Error("chart needs a positive size");
  const n = trace.length;
  const x = (i: number) => (n === 1 ? width / 2 : (i / (n - 1)) * width);
  // intensity axis is fixed at [0, 100]; y grows downward in SVG
  const y = (v: number) => height - (v / 100) * height;
  const series = (pick: (p: TrialPoint) => number) =>
    trace.map((p, i) => `${x(i).toFixed(2)},${y(pick(p)).toFixed(2)}`).join(" ");
  return {
    suggested: series((p) => p.suggested),
    target: series((p) => p.target),
    pointCount: n,
  };
}
