/** Parsing and validation of the benchmark CSV schema.
 *
 * The schema is fixed: header `method,alpha,h,t,x_num,x_exact,err,H_num`,
 * one row per (method, alpha, t) sample, all numeric fields finite decimal
 * floats.  The renderer never recomputes errors; the CSV is the single
 * source of truth.
 */

export const CSV_HEADER = "method,alpha,h,t,x_num,x_exact,err,H_num";

export interface BenchmarkRow {
  method: string;
  alpha: number;
  h: number;
  t: number;
  xNum: number;
  xExact: number;
  err: number;
  hNum: number;
}

/** The CSV has a valid header but no data rows. */
export class EmptyInput extends Error {
  constructor(message: string) {
    super(message);
    this.name = "EmptyInput";
  }
}

/** The CSV does not match the benchmark schema. */
export class SchemaError extends Error {
  constructor(message: string) {
    super(message);
    this.name = "SchemaError";
  }
}

function parseNumber(field: string, cell: string, line: number): number {
  const value = Number(cell);
  if (cell.trim() === "" || !Number.isFinite(value)) {
    throw new SchemaError(`line ${line}: ${field} is not a finite number: ${JSON.stringify(cell)}`);
  }
  return value;
}

/** Parse CSV text into rows, enforcing the schema strictly. */
export function parseBenchmarkCsv(text: string): BenchmarkRow[] {
  const lines = text.split(/\r?\n/);
  // a trailing newline produces one empty final entry; drop trailing blanks
  while (lines.length > 0 && lines[lines.length - 1]!.trim() === "") {
    lines.pop();
  }
  if (lines.length === 0) {
    throw new SchemaError("input is empty (missing header)");
  }
  if (lines[0] !== CSV_HEADER) {
    throw new SchemaError(
      `unexpected header: got ${JSON.stringify(lines[0])}, want ${JSON.stringify(CSV_HEADER)}`,
    );
  }
  if (lines.length === 1) {
    throw new EmptyInput("CSV contains a header but no data rows");
  }
  const rows: BenchmarkRow[] = [];
  for (let i = 1; i < lines.length; i++) {
    const cells = lines[i]!.split(",");
    if (cells.length !== 8) {
      throw new SchemaError(`line ${i + 1}: expected 8 columns, got ${cells.length}`);
    }
    const method = cells[0]!;
    if (method === "") {
      throw new SchemaError(`line ${i + 1}: empty method name`);
    }
    rows.push({
      method,
      alpha: parseNumber("alpha", cells[1]!, i + 1),
      h: parseNumber("h", cells[2]!, i + 1),
      t: parseNumber("t", cells[3]!, i + 1),
      xNum: parseNumber("x_num", cells[4]!, i + 1),
      xExact: parseNumber("x_exact", cells[5]!, i + 1),
      err: parseNumber("err", cells[6]!, i + 1),
      hNum: parseNumber("H_num", cells[7]!, i + 1),
    });
  }
  return rows;
}

/** Distinct alpha values in ascending order. */
export function listAlphas(rows: BenchmarkRow[]): number[] {
  return [...new Set(rows.map((r) => r.alpha))].sort((a, b) => a - b);
}

/** Distinct method names present, in canonical plotting order. */
export function listMethods(rows: BenchmarkRow[]): string[] {
  const present = new Set(rows.map((r) => r.method));
  const ordered = METHOD_ORDER.filter((m) => present.has(m));
  const rest = [...present].filter((m) => !METHOD_ORDER.includes(m)).sort();
  return [...ordered, ...rest];
}

/** Canonical display order for the known methods. */
export const METHOD_ORDER = [
  "contact1",
  "contact2",
  "contact2_forced",
  "leapfrog",
  "vnc",
  "ruth3",
  "rk4",
];

export const METHOD_LABELS: Record<string, string> = {
  contact1: "Contact1",
  contact2: "Contact2",
  contact2_forced: "Contact2 (forced)",
  leapfrog: "Leapfrog",
  vnc: "VNC",
  ruth3: "Ruth3",
  rk4: "RK4",
};

export function methodLabel(method: string): string {
  return METHOD_LABELS[method] ?? method;
}
