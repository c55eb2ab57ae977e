/** The five figure kinds, each consuming harness artifacts verbatim. */

import { DecayRow, InputError, RecordRow, readDecay, readJson, readRecords } from "./csv.js";
import { Scale, extent, linearScale, logScale } from "./scale.js";
import { Figure, HEIGHT, MARGIN, PALETTE, WIDTH } from "./svg.js";

export type FigureKind = "decay" | "rate" | "infimum" | "dichotomy" | "cmu-trend";

export interface FigureSpec {
  kind: FigureKind;
  input: string;
  output: string;
  logX?: boolean;
  logY?: boolean;
}

const X0 = MARGIN.left;
const X1 = WIDTH - MARGIN.right;
const Y0 = HEIGHT - MARGIN.bottom;
const Y1 = MARGIN.top;

function groupBy<T>(rows: T[], key: (row: T) => string): Map<string, T[]> {
  const out = new Map<string, T[]>();
  for (const row of rows) {
    const k = key(row);
    const list = out.get(k);
    if (list) list.push(row);
    else out.set(k, [row]);
  }
  return out;
}

function guideline(
  fig: Figure,
  x: Scale,
  y: Scale,
  xs: number[],
  anchorY: number,
  slope: number,
  color: string,
  label: string,
): void {
  // reference power law through the first point: y = anchorY * (x/x0)^slope
  const ys = xs.map((v) => anchorY * (v / xs[0]) ** slope);
  fig.polyline(xs, ys, x, y, color, true);
  const lx = Math.round(x.map(xs[xs.length - 1]) - 4);
  const ly = Math.round(fig.clampY(y.map(ys[ys.length - 1]) - 6));
  fig.add(
    `<text x="${lx}" y="${ly}" font-size="11" text-anchor="end" fill="${color}">${label}</text>`,
  );
}

/** decay: log-log sup-norm curves per ratio with -1/2 and -1 guides. */
export function renderDecay(path: string): string {
  const rows = readDecay(path);
  const byMu = [...groupBy(rows, (r) => r.mu.toString()).entries()].sort(
    (a, b) => Number(b[0]) - Number(a[0]),
  );
  const xs = rows.map((r) => 1 + r.Nt);
  const ys = rows.map((r) => r.supNorm);
  const x = logScale(...extent(xs), X0, X1);
  const y = logScale(...extent(ys), Y0, Y1);
  const fig = new Figure("Wave-propagator sup-norm decay");
  fig.axes(x, y, "1 + strat * t", "sup norm");
  const legend: { label: string; color: string; dashed?: boolean }[] = [];
  byMu.forEach(([mu, list], i) => {
    const sorted = [...list].sort((a, b) => a.Nt - b.Nt);
    const color = PALETTE[i % PALETTE.length];
    fig.polyline(sorted.map((r) => 1 + r.Nt), sorted.map((r) => r.supNorm), x, y, color);
    fig.markers(sorted.map((r) => 1 + r.Nt), sorted.map((r) => r.supNorm), x, y, color);
    legend.push({ label: `ratio ${mu}`, color });
  });
  const ref = [...byMu[0][1]].sort((a, b) => a.Nt - b.Nt);
  const gx = ref.map((r) => 1 + r.Nt);
  guideline(fig, x, y, gx, ref[0].supNorm, -0.5, "#888", "slope -1/2");
  guideline(fig, x, y, gx, ref[0].supNorm, -1.0, "#bbb", "slope -1");
  legend.push({ label: "slope -1/2", color: "#888", dashed: true });
  legend.push({ label: "slope -1", color: "#bbb", dashed: true });
  fig.legend(legend);
  return fig.render();
}

/** rate: convergence sups vs strat from a converge-prepared summary. */
export function renderRate(path: string): string {
  const summary = readJson(path);
  const fits = summary?.extra?.fits;
  if (!fits || typeof fits !== "object") {
    throw new InputError(`${path}: no extra.fits table (expected a converge-prepared summary)`);
  }
  const entries = Object.entries(fits) as [string, any][];
  const allX: number[] = [];
  const allY: number[] = [];
  for (const [, fit] of entries) {
    if (!fit.sups) throw new InputError(`${path}: fit entry without sups`);
    for (const [n, v] of Object.entries(fit.sups)) {
      allX.push(Number(n));
      allY.push(Number(v));
    }
  }
  const x = logScale(...extent(allX), X0, X1);
  const y = logScale(...extent(allY), Y0, Y1);
  const fig = new Figure("Distance to the balanced limit vs stratification");
  fig.axes(x, y, "strat", "sup_t difference");
  const legend: { label: string; color: string; dashed?: boolean }[] = [];
  entries.forEach(([mu, fit], i) => {
    const pts = Object.entries(fit.sups)
      .map(([n, v]) => [Number(n), Number(v)] as [number, number])
      .sort((a, b) => a[0] - b[0]);
    const color = PALETTE[i % PALETTE.length];
    fig.polyline(pts.map((p) => p[0]), pts.map((p) => p[1]), x, y, color);
    fig.markers(pts.map((p) => p[0]), pts.map((p) => p[1]), x, y, color);
    legend.push({ label: `ratio ${mu} (slope ${Number(fit.slope).toFixed(2)})`, color });
  });
  const first = Object.entries(entries[0][1].sups)
    .map(([n, v]) => [Number(n), Number(v)] as [number, number])
    .sort((a, b) => a[0] - b[0]);
  guideline(fig, x, y, first.map((p) => p[0]), first[0][1], -1.0, "#888", "slope -1");
  legend.push({ label: "slope -1", color: "#888", dashed: true });
  fig.legend(legend);
  return fig.render();
}

/** infimum: per-run window infima of the W1inf difference, as bars. */
export function renderInfimum(path: string, window = Infinity): string {
  const rows = readRecords(path).filter((r) => r.normName === "diff:W1inf:qg");
  if (rows.length === 0) {
    throw new InputError(`${path}: no diff:W1inf:qg rows`);
  }
  const byRun = [...groupBy(rows, (r) => r.runId).entries()].sort((a, b) =>
    a[0].localeCompare(b[0]),
  );
  const infima = byRun.map(([run, list]) => ({
    run,
    inf: Math.min(...list.filter((r) => r.time <= window).map((r) => r.value)),
  }));
  const xs = infima.map((_, i) => i + 1);
  const x = linearScale(0, infima.length + 1, X0, X1);
  const y = linearScale(0, Math.max(...infima.map((d) => d.inf)) * 1.25, Y0, Y1);
  const fig = new Figure("Non-convergence floor: window infima per run");
  fig.axes(x, y, "run", "inf over window of |u - limit|_W1inf");
  fig.bars(xs, infima.map((d) => d.inf), x, y, 0, PALETTE[0]);
  infima.forEach((d, i) => {
    fig.add(
      `<text x="${x.map(i + 1)}" y="${Y0 + 30}" font-size="10" text-anchor="middle">` +
        `${d.run}</text>`,
    );
  });
  return fig.render();
}

/** dichotomy: fast vs slow branch series from a dichotomy summary. */
export function renderDichotomy(path: string): string {
  const summary = readJson(path);
  const fast = summary?.extra?.fast;
  const slow = summary?.extra?.slow;
  if (!Array.isArray(fast) || !Array.isArray(slow)) {
    throw new InputError(`${path}: no extra.fast/extra.slow series (expected a dichotomy summary)`);
  }
  const ks = fast.map((_: number, i: number) => i + 1);
  const x = linearScale(0.5, fast.length + 0.5, X0, X1);
  const y = linearScale(0, Math.max(...fast, ...slow) * 1.25, Y0, Y1);
  const fig = new Figure("Fast vs slow sequences toward ratio 1");
  fig.axes(x, y, "k  (ratio = 1 + 2^-k)", "time-integrated W1inf discrepancy");
  fig.polyline(ks, slow, x, y, PALETTE[1]);
  fig.markers(ks, slow, x, y, PALETTE[1]);
  fig.polyline(ks, fast, x, y, PALETTE[0]);
  fig.markers(ks, fast, x, y, PALETTE[0]);
  fig.polyline([ks[0], ks[ks.length - 1]], [0.5 * fast[0], 0.5 * fast[0]], x, y, "#888", true);
  fig.polyline([ks[0], ks[ks.length - 1]], [0.5 * slow[0], 0.5 * slow[0]], x, y, "#c9a", true);
  fig.legend([
    { label: "fast branch", color: PALETTE[0] },
    { label: "slow branch", color: PALETTE[1] },
    { label: "half the fast initial value", color: "#888", dashed: true },
    { label: "half the slow initial value", color: "#c9a", dashed: true },
  ]);
  return fig.render();
}

/** cmu-trend: decay constants and their product with |1 - ratio|. */
export function renderCmuTrend(path: string): string {
  const fits = readJson(path);
  const table = fits?.cmu;
  if (!Array.isArray(table) || table.length === 0) {
    throw new InputError(`${path}: no cmu table (expected a dispersion fits.json)`);
  }
  const gaps = table.map((r: any) => Math.abs(1 - Number(r.mu)));
  const consts = table.map((r: any) => Number(r.constant_hat));
  const products = table.map((r: any) => Number(r.product));
  const order = gaps.map((_, i) => i).sort((a, b) => gaps[a] - gaps[b]);
  const gx = order.map((i) => gaps[i]);
  const x = logScale(...extent(gx), X0, X1);
  const y = logScale(
    Math.min(...consts, ...products),
    Math.max(...consts, ...products) * 1.3,
    Y0,
    Y1,
  );
  const fig = new Figure("Decay-constant blow-up toward ratio 1");
  fig.axes(x, y, "|1 - ratio|", "fitted constant");
  fig.polyline(gx, order.map((i) => consts[i]), x, y, PALETTE[0]);
  fig.markers(gx, order.map((i) => consts[i]), x, y, PALETTE[0]);
  fig.polyline(gx, order.map((i) => products[i]), x, y, PALETTE[2]);
  fig.markers(gx, order.map((i) => products[i]), x, y, PALETTE[2]);
  guideline(fig, x, y, gx, consts[order[0]], -1, "#888", "slope -1");
  fig.legend([
    { label: "constant", color: PALETTE[0] },
    { label: "constant * |1 - ratio|", color: PALETTE[2] },
    { label: "slope -1", color: "#888", dashed: true },
  ]);
  return fig.render();
}

export function render(spec: FigureSpec): string {
  switch (spec.kind) {
    case "decay":
      return renderDecay(spec.input);
    case "rate":
      return renderRate(spec.input);
    case "infimum":
      return renderInfimum(spec.input);
    case "dichotomy":
      return renderDichotomy(spec.input);
    case "cmu-trend":
      return renderCmuTrend(spec.input);
    default:
      throw new InputError(`unknown figure kind ${(spec as FigureSpec).kind}`);
  }
}
