#!/usr/bin/env node
/**
 * apwalk-figures — render SVG figures and text tables from simulator output.
 *
 * Usage:
 *   node dist/cli.js render <figure-spec.json> [...more spec files]
 *
 * Each spec file holds one spec or an array of specs, e.g.
 *   { "inputs": ["../fixtures/sweeps/k<K>/trace_last.csv" with <K> globbed as *],
 *     "kind": "generations_compare",
 *     "output": "../out/generations_compare.svg" }
 *
 * Input globs and output paths are resolved relative to the spec file's
 * directory, so spec files can be run from anywhere.
 */

import { mkdirSync, writeFileSync } from "fs";
import path from "path";

import { readFigureSpecs } from "./parse.js";
import { renderSpec } from "./render.js";
import { ParseError } from "./types.js";

function main(argv: string[]): number {
  if (argv.length < 2 || argv[0] !== "render") {
    console.error("usage: render <figure-spec.json> [...more spec files]");
    return 2;
  }
  for (const specFile of argv.slice(1)) {
    const baseDir = path.dirname(path.resolve(specFile));
    for (const spec of readFigureSpecs(specFile)) {
      const { output, content } = renderSpec(spec, baseDir);
      mkdirSync(path.dirname(output), { recursive: true });
      writeFileSync(output, content);
      console.log(`wrote ${output} (${spec.kind})`);
    }
  }
  return 0;
}

try {
  process.exit(main(process.argv.slice(2)));
} catch (err) {
  if (err instanceof ParseError) {
    console.error(`parse error: ${err.message}`);
  } else {
    console.error(`error: ${err instanceof Error ? err.message : err}`);
  }
  process.exit(1);
}
