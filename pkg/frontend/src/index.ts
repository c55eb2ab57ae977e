export { readRecords, readDecay, readJson, InputError } from "./csv.js";
export type { RecordRow, DecayRow } from "./csv.js";
export { linearScale, logScale, extent, formatTick } from "./scale.js";
export type { Scale } from "./scale.js";
export { Figure } from "./svg.js";
export { render, renderDecay, renderRate, renderInfimum, renderDichotomy, renderCmuTrend } from "./figures.js";
export type { FigureKind, FigureSpec } from "./figures.js";
export { main, parseArgs, UsageError } from "./cli.js";
