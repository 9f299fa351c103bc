/**
 * Trace CSV parsing.
 *
 * A trace file holds one row per alternative per logged iteration:
 *   iteration,alternative,policy_prob,mixture_prob
 * Within one iteration the probabilities of both columns must sum to 1
 * (within 0.01); violations are reported with the offending row number.
 */

export interface TracePoint {
  iteration: number;
  /** probability per alternative, in `alternatives` order */
  policy: number[];
  mixture: number[];
}

export interface TraceTable {
  /** panel title, normally the file stem */
  name: string;
  alternatives: string[];
  points: TracePoint[];
}

export class TraceParseError extends Error {
  constructor(
    public readonly file: string,
    public readonly row: number,
    message: string,
  ) {
    super(`${file}:${row}: ${message}`);
    this.name = "TraceParseError";
  }
}

const HEADER = "iteration,alternative,policy_prob,mixture_prob";
const SUM_TOLERANCE = 0.01;

function parseProb(file: string, row: number, field: string, raw: string): number {
  const value = Number(raw);
  if (!Number.isFinite(value)) {
    throw new TraceParseError(file, row, `${field} is not a number: ${JSON.stringify(raw)}`);
  }
  if (value < -1e-9 || value > 1 + 1e-9) {
    throw new TraceParseError(file, row, `${field} out of [0, 1]: ${raw}`);
  }
  return value;
}

export function parseTrace(text: string, file = "<trace>"): TraceTable {
  const lines = text.split(/\r?\n/);
  if ((lines[0] ?? "").trim() !== HEADER) {
    throw new TraceParseError(file, 1, `expected header ${JSON.stringify(HEADER)}`);
  }

  interface Group {
    rows: Map<string, { policy: number; mixture: number }>;
    lastRow: number;
  }
  const groups = new Map<number, Group>();
  const alternatives: string[] = [];

  for (let i = 1; i < lines.length; i++) {
    const line = lines[i].trim();
    if (line === "") continue;
    const row = i + 1;
    const fields = line.split(",");
    if (fields.length !== 4) {
      throw new TraceParseError(file, row, `expected 4 fields, got ${fields.length}`);
    }
    const iteration = Number(fields[0]);
    if (!Number.isInteger(iteration) || iteration < 0) {
      throw new TraceParseError(file, row, `bad iteration: ${JSON.stringify(fields[0])}`);
    }
    const alternative = fields[1];
    if (alternative === "") {
      throw new TraceParseError(file, row, "empty alternative label");
    }
    const policy = parseProb(file, row, "policy_prob", fields[2]);
    const mixture = parseProb(file, row, "mixture_prob", fields[3]);

    if (!alternatives.includes(alternative)) alternatives.push(alternative);
    let group = groups.get(iteration);
    if (!group) {
      group = { rows: new Map(), lastRow: row };
      groups.set(iteration, group);
    }
    if (group.rows.has(alternative)) {
      throw new TraceParseError(
        file,
        row,
        `duplicate alternative ${JSON.stringify(alternative)} at iteration ${iteration}`,
      );
    }
    group.rows.set(alternative, { policy, mixture });
    group.lastRow = row;
  }

  if (groups.size === 0) {
    throw new TraceParseError(file, 1, "trace has no data rows");
  }

  const points: TracePoint[] = [];
  const iterations = [...groups.keys()].sort((a, b) => a - b);
  for (const iteration of iterations) {
    const group = groups.get(iteration)!;
    if (group.rows.size !== alternatives.length) {
      throw new TraceParseError(
        file,
        group.lastRow,
        `iteration ${iteration} has ${group.rows.size} alternatives, expected ${alternatives.length}`,
      );
    }
    const policy = alternatives.map((a) => group.rows.get(a)!.policy);
    const mixture = alternatives.map((a) => group.rows.get(a)!.mixture);
    for (const [metric, values] of [
      ["policy_prob", policy],
      ["mixture_prob", mixture],
    ] as const) {
      const total = values.reduce((s, v) => s + v, 0);
      if (Math.abs(total - 1) > SUM_TOLERANCE) {
        throw new TraceParseError(
          file,
          group.lastRow,
          `${metric} sums to ${total.toFixed(4)} at iteration ${iteration}`,
        );
      }
    }
    points.push({ iteration, policy, mixture });
  }

  return { name: file, alternatives, points };
}
