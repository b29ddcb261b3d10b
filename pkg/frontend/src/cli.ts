import { readFileSync, writeFileSync, mkdirSync } from "node:fs";
import path from "node:path";

import yargs from "yargs";

import { SchemaError, parseRunRecord, parseSummaryCsv } from "./csv.js";
import { renderAccVsBits, renderElbow, renderLossTrace } from "./figures.js";
import { FIGURE_KINDS, type FigureKind } from "./types.js";

export const EXIT_OK = 0;
export const EXIT_ERROR = 1;
export const EXIT_CONFIG = 2;

class UsageError extends Error {}

function normalizeKind(raw: string): FigureKind {
  const kind = raw.toUpperCase().replace(/-/g, "_");
  if ((FIGURE_KINDS as readonly string[]).includes(kind)) {
    return kind as FigureKind;
  }
  throw new UsageError(
    `unknown figure kind ${JSON.stringify(raw)}; expected one of ${FIGURE_KINDS.join(", ")}`,
  );
}

function readInput(file: string): string {
  try {
    return readFileSync(file, "utf-8");
  } catch (err) {
    throw new UsageError(`cannot read ${file}: ${(err as Error).message}`);
  }
}

export function render(kind: FigureKind, inputText: string, source: string): string {
  switch (kind) {
    case "ELBOW":
      return renderElbow(parseSummaryCsv(inputText, source), source);
    case "ACC_VS_BITS":
      return renderAccVsBits(parseSummaryCsv(inputText, source), source);
    case "LOSS_TRACE":
      return renderLossTrace(parseRunRecord(inputText, source), source);
  }
}

export async function main(argv: string[]): Promise<number> {
  const parser = yargs(argv)
    .scriptName("dacqnn-plot")
    .command("$0 <kind>", "render one SVG figure from harness output", (y) =>
      y
        .positional("kind", {
          type: "string",
          describe: `figure kind: ${FIGURE_KINDS.join(" | ")} (case-insensitive, - or _)`,
          demandOption: true,
        })
        .option("in", {
          type: "string",
          describe: "summary CSV (ELBOW, ACC_VS_BITS) or RunRecord JSON (LOSS_TRACE)",
          demandOption: true,
        })
        .option("out", { type: "string", describe: "output SVG path", demandOption: true }),
    )
    .strict()
    .exitProcess(false)
    .fail((msg, err) => {
      throw new UsageError(msg ?? err?.message ?? "invalid arguments");
    });

  try {
    const args = (await parser.parse()) as unknown as { kind: string; in: string; out: string };
    const kind = normalizeKind(args.kind);
    const svg = render(kind, readInput(args.in), args.in);
    mkdirSync(path.dirname(path.resolve(args.out)), { recursive: true });
    writeFileSync(args.out, svg);
    process.stderr.write(`wrote ${args.out}\n`);
    return EXIT_OK;
  } catch (err) {
    if (err instanceof UsageError || err instanceof SchemaError) {
      process.stderr.write(`error: ${(err as Error).message}\n`);
      return EXIT_CONFIG;
    }
    process.stderr.write(`error: ${(err as Error).stack ?? (err as Error).message}\n`);
    return EXIT_ERROR;
  }
}
