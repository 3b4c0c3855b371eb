#!/usr/bin/env node
/** CLI: render benchmark CSV files into per-alpha error figures.
 *
 *   render --csv <path> --out-dir <path> [--alpha 0.1,2.0]
 *          [--methods contact1,contact2] [--scale symlog|linear]
 *
 * Writes err_alpha_<alpha>.svg per alpha (plus .png when the optional
 * `sharp` module is installed).  Exit code 0 on success, 1 on any error.
 */

import * as fs from "node:fs";
import * as path from "node:path";

import { EmptyInput, SchemaError, listAlphas, parseBenchmarkCsv } from "./csv.js";
import { renderErrorFigure } from "./render.js";
import { ScaleKind } from "./scale.js";

interface CliArgs {
  csv: string;
  outDir: string;
  alphas?: number[];
  methods?: string[];
  scale: ScaleKind;
}

export function parseArgs(argv: string[]): CliArgs {
  if (argv[0] !== "render") {
    throw new Error(`unknown command ${JSON.stringify(argv[0])}; expected "render"`);
  }
  let csv: string | undefined;
  let outDir: string | undefined;
  let alphas: number[] | undefined;
  let methods: string[] | undefined;
  let scale: ScaleKind = "symlog";
  for (let i = 1; i < argv.length; i += 2) {
    const flag = argv[i]!;
    const value = argv[i + 1];
    if (value === undefined) {
      throw new Error(`missing value for ${flag}`);
    }
    switch (flag) {
      case "--csv":
        csv = value;
        break;
      case "--out-dir":
        outDir = value;
        break;
      case "--alpha":
        alphas = value.split(",").map((s) => {
          const a = Number(s);
          if (!Number.isFinite(a)) throw new Error(`invalid alpha ${JSON.stringify(s)}`);
          return a;
        });
        break;
      case "--methods":
        methods = value.split(",").filter((s) => s !== "");
        break;
      case "--scale":
        if (value !== "symlog" && value !== "linear") {
          throw new Error(`invalid scale ${JSON.stringify(value)}; use symlog or linear`);
        }
        scale = value;
        break;
      default:
        throw new Error(`unknown flag ${flag}`);
    }
  }
  if (!csv) throw new Error("--csv is required");
  if (!outDir) throw new Error("--out-dir is required");
  return { csv, outDir, alphas, methods, scale };
}

/** File-name-safe alpha tag: 0.1 -> "0.1", 2 -> "2". */
export function alphaTag(alpha: number): string {
  return String(alpha);
}

async function tryPngExport(svg: string, pngPath: string): Promise<boolean> {
  try {
    const sharp = (await import("sharp")).default;
    await sharp(Buffer.from(svg)).png().toFile(pngPath);
    return true;
  } catch {
    return false;
  }
}

export async function runCli(argv: string[]): Promise<number> {
  let args: CliArgs;
  try {
    args = parseArgs(argv);
  } catch (exc) {
    process.stderr.write(`usage error: ${(exc as Error).message}\n`);
    return 1;
  }
  try {
    const text = fs.readFileSync(args.csv, "utf8");
    const rows = parseBenchmarkCsv(text);
    const alphas = args.alphas ?? listAlphas(rows);
    fs.mkdirSync(args.outDir, { recursive: true });
    let pngOk = true;
    for (const alpha of alphas) {
      const svg = renderErrorFigure(rows, alpha, {
        scale: args.scale,
        methods: args.methods,
      });
      const base = path.join(args.outDir, `err_alpha_${alphaTag(alpha)}`);
      fs.writeFileSync(`${base}.svg`, svg, "utf8");
      if (pngOk) {
        pngOk = await tryPngExport(svg, `${base}.png`);
      }
      process.stdout.write(`wrote ${base}.svg${pngOk ? ` and ${base}.png` : ""}\n`);
    }
    if (!pngOk) {
      process.stderr.write("note: PNG export unavailable (sharp not installed); SVG only\n");
    }
    return 0;
  } catch (exc) {
    if (exc instanceof EmptyInput) {
      process.stderr.write(`empty input: ${exc.message}\n`);
    } else if (exc instanceof SchemaError) {
      process.stderr.write(`schema error: ${exc.message}\n`);
    } else {
      process.stderr.write(`error: ${(exc as Error).message}\n`);
    }
    return 1;
  }
}

const isMain =
  process.argv[1] !== undefined &&
  import.meta.url === new URL(`file://${path.resolve(process.argv[1])}`).href;
if (isMain) {
  runCli(process.argv.slice(2)).then((code) => {
    process.exitCode = code;
  });
}
