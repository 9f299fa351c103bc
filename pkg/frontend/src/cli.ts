#!/usr/bin/env node
/**
 * plotkit CLI.
 *
 * Usage:
 *   plotkit plot --trace <csv> [--trace <csv> ...] --out <png|svg>
 *                [--metric policy|mixture] [--columns N]
 *
 * Reads trace CSVs written by an experiment run and renders one panel per
 * trace. `.png` outputs are rasterized from the SVG; `.svg` outputs are
 * written as-is.
 */

import { readFileSync, writeFileSync } from "fs";
import { basename, extname } from "path";

import { Metric, renderChart } from "./chart";
import { parseTrace, TraceParseError } from "./trace";

export interface PlotArgs {
  traces: string[];
  out: string;
  metric: Metric;
  columns: number;
}

export class UsageError extends Error {}

const USAGE =
  "usage: plotkit plot --trace <csv>... --out <png|svg> [--metric policy|mixture] [--columns N]";

export function parseArgs(argv: string[]): PlotArgs {
  if (argv[0] !== "plot") {
    throw new UsageError(USAGE);
  }
  const args: PlotArgs = { traces: [], out: "", metric: "policy", columns: 0 };
  for (let i = 1; i < argv.length; i++) {
    const flag = argv[i];
    const value = argv[i + 1];
    switch (flag) {
      case "--trace":
        if (value === undefined) throw new UsageError("--trace needs a path");
        args.traces.push(value);
        i++;
        break;
      case "--out":
        if (value === undefined) throw new UsageError("--out needs a path");
        args.out = value;
        i++;
        break;
      case "--metric":
        if (value !== "policy" && value !== "mixture") {
          throw new UsageError(`--metric must be policy or mixture, got ${value}`);
        }
        args.metric = value;
        i++;
        break;
      case "--columns": {
        const n = Number(value);
        if (!Number.isInteger(n) || n < 0) {
          throw new UsageError(`--columns must be a nonnegative integer, got ${value}`);
        }
        args.columns = n;
        i++;
        break;
      }
      default:
        throw new UsageError(`unknown flag ${flag}\n${USAGE}`);
    }
  }
  if (args.traces.length === 0) throw new UsageError("at least one --trace is required");
  if (!args.out) throw new UsageError("--out is required");
  return args;
}

function stem(path: string): string {
  const base = basename(path);
  return base.endsWith(".csv") ? base.slice(0, -4) : base;
}

export function runPlot(args: PlotArgs): void {
  const tables = args.traces.map((path) => {
    const table = parseTrace(readFileSync(path, "utf-8"), path);
    return { ...table, name: stem(path) };
  });
  const svg = renderChart(tables, { metric: args.metric, columns: args.columns });
  if (extname(args.out).toLowerCase() === ".svg") {
    writeFileSync(args.out, svg);
  } else {
    // eslint-disable-next-line @typescript-eslint/no-var-requires
    const { Resvg } = require("@resvg/resvg-js");
    const png = new Resvg(svg).render().asPng();
    writeFileSync(args.out, png);
  }
}

export function main(argv: string[]): number {
  try {
    runPlot(parseArgs(argv));
    return 0;
  } catch (error) {
    if (error instanceof UsageError || error instanceof TraceParseError) {
      console.error(`plotkit: ${error.message}`);
      return 2;
    }
    if (error instanceof Error && "code" in error) {
      console.error(`plotkit: ${error.message}`);
      return 1;
    }
    throw error;
  }
}

if (require.main === module) {
  process.exit(main(process.argv.slice(2)));
}
