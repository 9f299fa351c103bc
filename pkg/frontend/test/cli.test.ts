import { mkdtempSync, readFileSync, writeFileSync } from "fs";
import { tmpdir } from "os";
import { join } from "path";

import { beforeAll, describe, expect, it, vi } from "vitest";

import { main, parseArgs, UsageError } from "../src/cli";

const HEADER = "iteration,alternative,policy_prob,mixture_prob";

function syntheticTrace(alternatives: string[], iterations: number): string {
  const lines = [HEADER];
  for (let t = 1; t <= iterations; t++) {
    const lead = 0.4 + 0.5 * (t / iterations);
    const rest = (1 - lead) / (alternatives.length - 1);
    alternatives.forEach((label, i) => {
      const p = i === 0 ? lead : rest;
      lines.push(`${t},${label},${p.toFixed(6)},${p.toFixed(6)}`);
    });
  }
  return lines.join("\n") + "\n";
}

let dir: string;
let traces: string[];

beforeAll(() => {
  dir = mkdtempSync(join(tmpdir(), "plotkit-"));
  traces = [
    ["majority", ["R", "G", "B"]],
    ["two_options", ["R", "B"]],
    ["cyclic", ["R", "G", "B"]],
  ].map(([name, alternatives]) => {
    const path = join(dir, `trace_spo_${name}.csv`);
    writeFileSync(path, syntheticTrace(alternatives as string[], 40));
    return path;
  });
});

describe("parseArgs", () => {
  it("collects repeated --trace flags", () => {
    const args = parseArgs([
      "plot",
      "--trace",
      "a.csv",
      "--trace",
      "b.csv",
      "--out",
      "fig.png",
      "--metric",
      "mixture",
    ]);
    expect(args.traces).toEqual(["a.csv", "b.csv"]);
    expect(args.metric).toBe("mixture");
  });

  it("rejects missing arguments", () => {
    expect(() => parseArgs(["plot", "--out", "x.png"])).toThrowError(UsageError);
    expect(() => parseArgs(["plot", "--trace", "a.csv"])).toThrowError(UsageError);
    expect(() => parseArgs(["nope"])).toThrowError(UsageError);
    expect(() => parseArgs(["plot", "--trace", "a.csv", "--out", "x.png", "--metric", "zen"])).toThrowError(
      /--metric/,
    );
  });
});

describe("main", () => {
  it("renders a three-panel png from the three experiment traces", () => {
    const out = join(dir, "panels.png");
    const code = main(["plot", ...traces.flatMap((t) => ["--trace", t]), "--out", out]);
    expect(code).toBe(0);
    const bytes = readFileSync(out);
    expect(bytes.length).toBeGreaterThan(1000);
    // PNG signature
    expect([...bytes.subarray(0, 4)]).toEqual([0x89, 0x50, 0x4e, 0x47]);
  });

  it("writes svg directly when asked", () => {
    const out = join(dir, "panels.svg");
    expect(main(["plot", "--trace", traces[0], "--out", out, "--metric", "mixture"])).toBe(0);
    const svg = readFileSync(out, "utf-8");
    expect(svg).toContain("<svg");
    expect(svg).toContain("trace_spo_majority");
  });

  it("rejects a corrupted trace with a row-numbered error", () => {
    const corrupted = join(dir, "corrupted.csv");
    writeFileSync(
      corrupted,
      [HEADER, "1,R,0.5,0.5", "1,B,0.5,0.5", "2,R,0.7,0.7", "2,B,0.5,0.5", ""].join("\n"),
    );
    const stderr = vi.spyOn(console, "error").mockImplementation(() => {});
    const code = main(["plot", "--trace", corrupted, "--out", join(dir, "x.png")]);
    expect(code).toBe(2);
    expect(stderr.mock.calls.flat().join("\n")).toMatch(/corrupted\.csv:5: .*sums to 1\.2000/);
    stderr.mockRestore();
  });

  it("fails cleanly on a missing file", () => {
    const stderr = vi.spyOn(console, "error").mockImplementation(() => {});
    const code = main(["plot", "--trace", join(dir, "absent.csv"), "--out", join(dir, "y.png")]);
    expect(code).toBe(1);
    stderr.mockRestore();
  });
});
