#!/usr/bin/env node
/**
 * viz <kind> --in CSV... --out IMG
 *
 * Renders one figure from simulator CSV output. Read-only on its inputs;
 * re-running with identical inputs produces an identical image. Exits 0 on
 * success, 1 on schema mismatch or missing input, 2 on usage errors.
 */

import { mkdirSync, renameSync, writeFileSync } from "node:fs";
import { dirname, join } from "node:path";
import process from "node:process";
import yargs from "yargs";
import { hideBin } from "yargs/helpers";
import { HEADERS, renderFigure, SchemaMismatchError } from "./figures.js";

async function main(): Promise<number> {
  const argv = await yargs(hideBin(process.argv))
    .command("$0 <kind>", "render a figure from simulator CSV output", (y) =>
      y.positional("kind", {
        describe: `figure kind (${Object.keys(HEADERS).join(" | ")})`,
        type: "string",
        demandOption: true,
      }),
    )
    .option("in", {
      type: "string",
      array: true,
      demandOption: true,
      describe: "input CSV path(s)",
    })
    .option("out", {
      type: "string",
      demandOption: true,
      describe: "output SVG path",
    })
    .strict()
    .fail((msg, err) => {
      throw err ?? new UsageError(msg);
    })
    .parse();

  const kind = argv.kind as string;
  if (!(kind in HEADERS)) {
    process.stderr.write(`usage error: unknown figure kind ${JSON.stringify(kind)}\n`);
    return 2;
  }
  const inputs = (argv.in as string[]).map(String);
  const out = String(argv.out);
  const svg = renderFigure(kind, inputs);
  mkdirSync(dirname(out) || ".", { recursive: true });
  const tmp = join(dirname(out) || ".", `.tmp-${process.pid}-${Math.abs(hash(out))}.part`);
  writeFileSync(tmp, svg, "utf-8");
  renameSync(tmp, out);
  process.stdout.write(out + "\n");
  return 0;
}

class UsageError extends Error {}

function hash(s: string): number {
  let h = 0;
  for (let i = 0; i < s.length; i++) {
    h = (h * 31 + s.charCodeAt(i)) | 0;
  }
  return h;
}

main()
  .then((code) => process.exit(code))
  .catch((err) => {
    if (err instanceof UsageError) {
      process.stderr.write(`usage error: ${err.message}\n`);
      process.exit(2);
    }
    if (err instanceof SchemaMismatchError) {
      process.stderr.write(`schema mismatch: ${err.message}\n`);
      process.exit(1);
    }
    process.stderr.write(`error: ${(err as Error).message}\n`);
    process.exit(1);
  });
