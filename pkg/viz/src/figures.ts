/**
 * The five figure kinds, each reading one or more simulator CSVs and
 * producing a deterministic SVG string.
 *
 *   portrait    reduced-phase-space portrait from energy-surface CSVs
 *   lambda-map  trapping scan over (x2_0, xi2_0) colored by drift
 *   g-curve     periodic-seed band average G(xi1) with its root marked
 *   dispersion  three dispersion branches per quantum index
 *   mass-curve  ensemble mass in the observation box against time
 */

import { basename } from "node:path";
import { column, loadCsv, num, SchemaMismatchError, Table } from "./csv.js";
import { diverging, extent, linearScale, plotRange, Scene } from "./svg.js";

export { SchemaMismatchError };

export const HEADERS: Record<string, string[]> = {
  portrait: ["x2", "xi2_plus", "xi2_minus", "V"],
  "lambda-map": ["xi1", "x2_0", "xi2_0", "tau", "class", "margin", "drift", "trapped", "error"],
  "g-curve": ["xi1", "G"],
  dispersion: ["xi1", "n", "tau_minus", "tau_R", "tau_plus"],
  "mass-curve": ["t", "mass"],
};

const PALETTE = ["#1b6ca8", "#b2182b", "#2e8540", "#8a5cac", "#c77d2d", "#4d4d4d"];

export function renderFigure(kind: string, inputs: string[], axisHint?: string): string {
  switch (kind) {
    case "portrait":
      return portrait(inputs);
    case "lambda-map":
      return lambdaMap(inputs);
    case "g-curve":
      return gCurve(inputs);
    case "dispersion":
      return dispersion(inputs);
    case "mass-curve":
      return massCurve(inputs);
    default:
      throw new SchemaMismatchError(`unknown figure kind ${JSON.stringify(kind)}`);
  }
}

function single(inputs: string[], kind: string): string {
  if (inputs.length !== 1) {
    throw new SchemaMismatchError(`${kind} takes exactly one input CSV, got ${inputs.length}`);
  }
  return inputs[0];
}

function portrait(inputs: string[]): string {
  if (inputs.length === 0) throw new SchemaMismatchError("portrait needs at least one input CSV");
  const tables: Table[] = inputs.map((p) => loadCsv(p, HEADERS.portrait));
  const scene = new Scene();
  const r = plotRange();
  const allX: number[] = [];
  const allY: number[] = [];
  for (const t of tables) {
    allX.push(...column(t, 0));
    allY.push(...column(t, 1), ...column(t, 2));
  }
  const xs = linearScale(extent(allX, [-1, 1]), r.x);
  const ys = linearScale(extent(allY, [-1, 1]), r.y);
  tables.forEach((t, i) => {
    const color = PALETTE[i % PALETTE.length];
    const x2 = column(t, 0);
    const up = column(t, 1);
    const dn = column(t, 2);
    // upper branch left to right, then lower branch right to left: closed loop
    const loopX = [...x2, ...[...x2].reverse()];
    const loopY = [...up, ...[...dn].reverse()];
    if (x2.length > 0) {
      loopX.push(x2[0]);
      loopY.push(up[0]);
    }
    scene.polyline(loopX.map(xs), loopY.map(ys), color);
  });
  scene.axes(xs, ys, "x2", "xi2", `phase portrait (${tables.length} surface${tables.length > 1 ? "s" : ""})`);
  return scene.render();
}

function lambdaMap(inputs: string[]): string {
  const t = loadCsv(single(inputs, "lambda-map"), HEADERS["lambda-map"]);
  const scene = new Scene();
  const r = plotRange();
  const x2 = column(t, 1);
  const xi2 = column(t, 2);
  const drift = column(t, 6);
  const trapped = t.rows.map((row) => row[7] === "true");
  const xs = linearScale(extent(x2), r.x);
  const ys = linearScale(extent(xi2), r.y);
  const driftScale = Math.max(1e-30, ...drift.filter(Number.isFinite).map(Math.abs));
  for (let i = 0; i < t.rows.length; i++) {
    const color = diverging(drift[i] / driftScale);
    scene.circle(xs(x2[i]), ys(xi2[i]), 4, color);
    if (trapped[i]) {
      scene.circle(xs(x2[i]), ys(xi2[i]), 6.5, "none", "#000000");
    }
  }
  scene.axes(xs, ys, "x2_0", "xi2_0", `trapping map (drift color scale +-${driftScale.toPrecision(2)})`);
  return scene.render();
}

function gCurve(inputs: string[]): string {
  const t = loadCsv(single(inputs, "g-curve"), HEADERS["g-curve"]);
  const scene = new Scene();
  const r = plotRange();
  const xi1 = column(t, 0);
  const g = column(t, 1);
  const xs = linearScale(extent(xi1.map(Math.log10)), r.x);
  const ys = linearScale(extent(g), r.y);
  const px = xi1.map((v) => xs(Math.log10(v)));
  scene.polyline(px, g.map(ys), PALETTE[0]);
  if (ys.domain[0] < 0 && ys.domain[1] > 0) {
    scene.polyline([r.x[0], r.x[1]], [ys(0), ys(0)], "#888888", 1, "4 3");
  }
  // mark the first sign change with a dot at the interpolated root
  for (let i = 0; i + 1 < g.length; i++) {
    if (Number.isFinite(g[i]) && Number.isFinite(g[i + 1]) && g[i] * g[i + 1] < 0) {
      const u = g[i] / (g[i] - g[i + 1]);
      const lx = Math.log10(xi1[i]) + u * (Math.log10(xi1[i + 1]) - Math.log10(xi1[i]));
      scene.circle(xs(lx), ys(0), 5, PALETTE[1]);
      scene.text(xs(lx), ys(0) - 12, `root near xi1 = ${Math.pow(10, lx).toPrecision(5)}`);
      break;
    }
  }
  scene.axes(xs, ys, "log10 xi1", "G", "periodic-seed band average");
  return scene.render();
}

function dispersion(inputs: string[]): string {
  const t = loadCsv(single(inputs, "dispersion"), HEADERS.dispersion);
  const scene = new Scene();
  const r = plotRange();
  const xi1 = column(t, 0);
  const ns = t.rows.map((row) => row[1]);
  const branches = [column(t, 2), column(t, 3), column(t, 4)];
  const xs = linearScale(extent(xi1), r.x);
  const ys = linearScale(extent(branches.flat()), r.y);
  const unique = [...new Set(ns)];
  unique.forEach((n, j) => {
    const color = PALETTE[j % PALETTE.length];
    const idx = ns.map((v, i) => (v === n ? i : -1)).filter((i) => i >= 0);
    idx.sort((a, b) => xi1[a] - xi1[b]);
    for (const branch of branches) {
      scene.polyline(idx.map((i) => xs(xi1[i])), idx.map((i) => ys(branch[i])), color);
    }
    if (idx.length > 0) {
      const last = idx[idx.length - 1];
      scene.text(xs(xi1[last]) - 6, ys(branches[2][last]) - 6, `n=${n}`, "end", 11);
    }
  });
  scene.axes(xs, ys, "xi1", "tau", "dispersion branches (fast-, slow, fast+)");
  return scene.render();
}

function massCurve(inputs: string[]): string {
  const t = loadCsv(single(inputs, "mass-curve"), HEADERS["mass-curve"]);
  const scene = new Scene();
  const r = plotRange();
  const time = column(t, 0);
  const mass = column(t, 1);
  const xs = linearScale(extent(time, [0, 1]), r.x);
  const ys = linearScale([0, 1.05], r.y);
  scene.polyline(time.map(xs), mass.map(ys), PALETTE[0], 2);
  for (let i = 0; i < time.length; i++) {
    scene.circle(xs(time[i]), ys(mass[i]), 3, PALETTE[0]);
  }
  scene.axes(xs, ys, "t", "mass fraction", "ensemble mass in the observation box");
  return scene.render();
}

export function figureTitleFor(path: string): string {
  return basename(path);
}
