/** Deterministic SVG assembly: fixed styles, fixed precision, no timestamps. */

import { Scale, formatTick } from "./scale.js";

export const WIDTH = 640;
export const HEIGHT = 420;
export const MARGIN = { left: 64, right: 16, top: 34, bottom: 46 };

export const PALETTE = [
  "#1f5fa8",
  "#c44e52",
  "#2f8f4e",
  "#8172b2",
  "#b8860b",
  "#4aa3a3",
  "#7f5a3c",
  "#626262",
];

const fmt = (x: number) => (Math.round(x * 100) / 100).toString();

export class Figure {
  private parts: string[] = [];

  constructor(readonly title: string) {}

  add(fragment: string): void {
    this.parts.push(fragment);
  }

  /** Add a fragment clipped to the plot area (for data elements). */
  addClipped(fragment: string): void {
    this.parts.push(`<g clip-path="url(#plot-area)">${fragment}</g>`);
  }

  /** Clamp a vertical position into the plot area (for annotations). */
  clampY(py: number): number {
    return Math.min(Math.max(py, MARGIN.top + 10), HEIGHT - MARGIN.bottom - 4);
  }

  axes(x: Scale, y: Scale, xLabel: string, yLabel: string): void {
    const { left, right, top, bottom } = MARGIN;
    const x0 = left;
    const x1 = WIDTH - right;
    const y0 = HEIGHT - bottom;
    const y1 = top;
    this.add(
      `<rect x="${x0}" y="${y1}" width="${x1 - x0}" height="${y0 - y1}" ` +
        `fill="none" stroke="#444" stroke-width="1"/>`,
    );
    for (const t of x.ticks()) {
      const px = fmt(x.map(t));
      this.add(
        `<line x1="${px}" y1="${y0}" x2="${px}" y2="${y0 + 4}" stroke="#444"/>` +
          `<text x="${px}" y="${y0 + 17}" font-size="11" text-anchor="middle">${formatTick(t)}</text>`,
      );
    }
    for (const t of y.ticks()) {
      const py = fmt(y.map(t));
      this.add(
        `<line x1="${x0 - 4}" y1="${py}" x2="${x0}" y2="${py}" stroke="#444"/>` +
          `<text x="${x0 - 7}" y="${py}" font-size="11" text-anchor="end" ` +
          `dominant-baseline="middle">${formatTick(t)}</text>`,
      );
    }
    this.add(
      `<text x="${(x0 + x1) / 2}" y="${HEIGHT - 10}" font-size="13" ` +
        `text-anchor="middle">${xLabel}</text>`,
    );
    this.add(
      `<text x="16" y="${(y0 + y1) / 2}" font-size="13" text-anchor="middle" ` +
        `transform="rotate(-90 16 ${(y0 + y1) / 2})">${yLabel}</text>`,
    );
  }

  polyline(xs: number[], ys: number[], x: Scale, y: Scale, color: string, dashed = false): void {
    const pts = xs.map((v, i) => `${fmt(x.map(v))},${fmt(y.map(ys[i]))}`).join(" ");
    const dash = dashed ? ` stroke-dasharray="6 4"` : "";
    this.addClipped(
      `<polyline points="${pts}" fill="none" stroke="${color}" stroke-width="1.6"${dash}/>`,
    );
  }

  markers(xs: number[], ys: number[], x: Scale, y: Scale, color: string): void {
    for (let i = 0; i < xs.length; i++) {
      this.addClipped(
        `<circle cx="${fmt(x.map(xs[i]))}" cy="${fmt(y.map(ys[i]))}" r="3" fill="${color}"/>`,
      );
    }
  }

  bars(xs: number[], ys: number[], x: Scale, y: Scale, baseline: number, color: string): void {
    const y0 = fmt(y.map(baseline));
    for (let i = 0; i < xs.length; i++) {
      const px = x.map(xs[i]);
      const py = y.map(ys[i]);
      const top = Math.min(py, Number(y0));
      const h = Math.abs(Number(y0) - py);
      this.add(
        `<rect x="${fmt(px - 9)}" y="${fmt(top)}" width="18" height="${fmt(h)}" ` +
          `fill="${color}" fill-opacity="0.75" stroke="${color}"/>`,
      );
    }
  }

  legend(entries: { label: string; color: string; dashed?: boolean }[]): void {
    const x0 = MARGIN.left + 12;
    entries.forEach((e, i) => {
      const y = MARGIN.top + 14 + 16 * i;
      const dash = e.dashed ? ` stroke-dasharray="6 4"` : "";
      this.add(
        `<line x1="${x0}" y1="${y}" x2="${x0 + 22}" y2="${y}" stroke="${e.color}" ` +
          `stroke-width="1.6"${dash}/>` +
          `<text x="${x0 + 28}" y="${y + 4}" font-size="11">${e.label}</text>`,
      );
    });
  }

  render(): string {
    return (
      `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" ` +
      `viewBox="0 0 ${WIDTH} ${HEIGHT}" font-family="Helvetica, Arial, sans-serif">\n` +
      `<rect width="${WIDTH}" height="${HEIGHT}" fill="white"/>\n` +
      `<defs><clipPath id="plot-area"><rect x="${MARGIN.left}" y="${MARGIN.top}" ` +
      `width="${WIDTH - MARGIN.left - MARGIN.right}" ` +
      `height="${HEIGHT - MARGIN.top - MARGIN.bottom}"/></clipPath></defs>\n` +
      `<text x="${WIDTH / 2}" y="20" font-size="14" text-anchor="middle" ` +
      `font-weight="bold">${this.title}</text>\n` +
      this.parts.join("\n") +
      `\n</svg>\n`
    );
  }
}
