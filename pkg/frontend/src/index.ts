export {
  CSV_HEADER,
  EmptyInput,
  SchemaError,
  METHOD_ORDER,
  METHOD_LABELS,
  methodLabel,
  listAlphas,
  listMethods,
  parseBenchmarkCsv,
} from "./csv.js";
export type { BenchmarkRow } from "./csv.js";
export { renderErrorFigure } from "./render.js";
export type { FigureOptions } from "./render.js";
export { linearScale, symlogScale, makeScale, formatTick } from "./scale.js";
export type { Scale, ScaleKind } from "./scale.js";
export { runCli, parseArgs, alphaTag } from "./cli.js";
