/** qglab-figures <kind> --in <artifact> --out <figure.svg>
 *
 * Renders one figure from harness artifacts.  Deterministic: identical
 * inputs produce byte-identical SVG.  Exit 1 on bad inputs (missing
 * columns, wrong artifact type), exit 2 on usage errors.
 */

import { writeFileSync } from "node:fs";

import { InputError } from "./csv.js";
import { FigureKind, FigureSpec, render } from "./figures.js";

const KINDS: FigureKind[] = ["decay", "rate", "infimum", "dichotomy", "cmu-trend"];

export function parseArgs(argv: string[]): FigureSpec {
  const [kind, ...rest] = argv;
  if (!kind || !KINDS.includes(kind as FigureKind)) {
    throw new UsageError(`usage: qglab-figures <${KINDS.join("|")}> --in <path> --out <path>`);
  }
  let input: string | undefined;
  let output: string | undefined;
  for (let i = 0; i < rest.length; i++) {
    switch (rest[i]) {
      case "--in":
        input = rest[++i];
        break;
      case "--out":
        output = rest[++i];
        break;
      default:
        throw new UsageError(`unknown argument ${rest[i]}`);
    }
  }
  if (!input || !output) {
    throw new UsageError("both --in and --out are required");
  }
  return { kind: kind as FigureKind, input, output };
}

export class UsageError extends Error {}

export function main(argv: string[]): number {
  let spec: FigureSpec;
  try {
    spec = parseArgs(argv);
  } catch (err) {
    if (err instanceof UsageError) {
      console.error(err.message);
      return 2;
    }
    throw err;
  }
  try {
    writeFileSync(spec.output, render(spec));
  } catch (err) {
    if (err instanceof InputError || (err as NodeJS.ErrnoException).code === "ENOENT") {
      console.error((err as Error).message);
      return 1;
    }
    throw err;
  }
  console.log(`wrote ${spec.output}`);
  return 0;
}

if (process.argv[1] && process.argv[1].endsWith("cli.js")) {
  process.exit(main(process.argv.slice(2)));
}
