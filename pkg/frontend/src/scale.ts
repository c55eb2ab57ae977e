/** Axis scales with deterministic tick generation and label formatting. */

export interface Scale {
  map(value: number): number;
  ticks(): number[];
  readonly log: boolean;
}

/** Stable short label: no locale, no exponent noise for mid-range values. */
export function formatTick(v: number): string {
  if (v === 0) return "0";
  const a = Math.abs(v);
  if (a >= 1e4 || a < 1e-3) {
    const e = Math.floor(Math.log10(a));
    const m = v / 10 ** e;
    const mm = Math.round(m * 100) / 100;
    return `${mm}e${e}`;
  }
  return String(Math.round(v * 1e6) / 1e6);
}

export function linearScale(lo: number, hi: number, rangeLo: number, rangeHi: number): Scale {
  if (!(hi > lo)) hi = lo + 1;
  const span = hi - lo;
  const step = niceStep(span / 5);
  const first = Math.ceil(lo / step) * step;
  const ticks: number[] = [];
  for (let v = first; v <= hi + 1e-12 * span; v += step) {
    ticks.push(Math.abs(v) < 1e-12 * span ? 0 : v);
  }
  return {
    log: false,
    map: (v) => rangeLo + ((v - lo) / span) * (rangeHi - rangeLo),
    ticks: () => ticks,
  };
}

function niceStep(raw: number): number {
  const mag = 10 ** Math.floor(Math.log10(raw));
  const r = raw / mag;
  if (r <= 1) return mag;
  if (r <= 2) return 2 * mag;
  if (r <= 5) return 5 * mag;
  return 10 * mag;
}

export function logScale(lo: number, hi: number, rangeLo: number, rangeHi: number): Scale {
  if (!(lo > 0) || !(hi > 0)) {
    throw new Error("log scale needs positive bounds");
  }
  if (!(hi > lo)) hi = lo * 10;
  const la = Math.log10(lo);
  const lb = Math.log10(hi);
  const ticks: number[] = [];
  const decades = Math.floor(lb) - Math.ceil(la);
  for (let e = Math.ceil(la); e <= Math.floor(lb); e++) {
    ticks.push(10 ** e);
    if (decades <= 1) {
      for (const m of [2, 5]) {
        const v = m * 10 ** e;
        if (v >= lo && v <= hi) ticks.push(v);
      }
    }
  }
  if (ticks.length === 0) ticks.push(lo, hi);
  ticks.sort((x, y) => x - y);
  return {
    log: true,
    map: (v) => rangeLo + ((Math.log10(v) - la) / (lb - la)) * (rangeHi - rangeLo),
    ticks: () => ticks,
  };
}

export function extent(values: number[]): [number, number] {
  let lo = Infinity;
  let hi = -Infinity;
  for (const v of values) {
    if (v < lo) lo = v;
    if (v > hi) hi = v;
  }
  return [lo, hi];
}
