/** Command line: render --kind <metrics|training|timing|shor-census> --input a.csv --output a.svg */

import { readFileSync, writeFileSync } from "node:fs";
import { FIGURE_KINDS, FigureKind, render } from "./figures.js";

function usage(): never {
  process.stderr.write(
    "usage: render --kind <" +
      FIGURE_KINDS.join("|") +
      "> --input <csv> --output <svg>\n",
  );
  process.exit(2);
}

export function main(argv: string[]): number {
  const args = new Map<string, string>();
  for (let i = 0; i < argv.length; i += 2) {
    const key = argv[i];
    const value = argv[i + 1];
    if (!key || !key.startsWith("--") || value === undefined) {
      usage();
    }
    args.set(key.slice(2), value);
  }
  const kind = args.get("kind");
  const input = args.get("input");
  const output = args.get("output");
  if (!kind || !input || !output || !FIGURE_KINDS.includes(kind as FigureKind)) {
    usage();
  }
  try {
    const svg = render(kind as FigureKind, readFileSync(input, "utf-8"));
    writeFileSync(output, svg);
  } catch (err) {
    process.stderr.write(`error: ${err instanceof Error ? err.message : String(err)}\n`);
    return 1;
  }
  return 0;
}

// run only when invoked as a script, not when imported by tests
const entry = process.argv[1];
if (entry && import.meta.url.endsWith(entry.split("/").pop()!)) {
  process.exit(main(process.argv.slice(2)));
}
