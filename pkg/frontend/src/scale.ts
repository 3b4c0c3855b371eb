/** Axis scales.  The error axis defaults to symlog because the regularized
 * relative error is signed and spans several orders of magnitude. */

export type ScaleKind = "linear" | "symlog";

export interface Scale {
  /** data value -> normalized [0, 1] position */
  pos(value: number): number;
  /** tick values in data space, ascending */
  ticks(): number[];
  /** deterministic tick label */
  label(value: number): string;
}

const LINTHRESH = 1e-8;

function symlogTransform(v: number): number {
  return Math.sign(v) * Math.log10(1.0 + Math.abs(v) / LINTHRESH);
}

function niceLinearStep(span: number): number {
  const raw = span / 5;
  const mag = Math.pow(10, Math.floor(Math.log10(raw)));
  const norm = raw / mag;
  const step = norm < 1.5 ? 1 : norm < 3.5 ? 2 : norm < 7.5 ? 5 : 10;
  return step * mag;
}

export function linearScale(lo: number, hi: number): Scale {
  if (!(hi > lo)) {
    hi = lo + 1;
  }
  const step = niceLinearStep(hi - lo);
  const first = Math.ceil(lo / step) * step;
  const tickValues: number[] = [];
  for (let v = first; v <= hi + 1e-12 * step; v += step) {
    tickValues.push(Math.abs(v) < 1e-12 * step ? 0 : v);
  }
  return {
    pos: (v) => (v - lo) / (hi - lo),
    ticks: () => tickValues,
    label: (v) => formatTick(v),
  };
}

export function symlogScale(lo: number, hi: number): Scale {
  const tlo = symlogTransform(lo);
  const thi0 = symlogTransform(hi);
  const thi = thi0 > tlo ? thi0 : tlo + 1;
  // decade ticks: 0 and +/- 10^k that fall inside the data range
  const tickValues: number[] = [];
  const maxAbs = Math.max(Math.abs(lo), Math.abs(hi), LINTHRESH);
  const kMax = Math.ceil(Math.log10(maxAbs));
  const kMin = Math.ceil(Math.log10(LINTHRESH));
  for (let k = kMax; k >= kMin; k--) {
    const v = -Math.pow(10, k);
    if (v >= lo && v <= hi) tickValues.push(v);
  }
  if (lo <= 0 && hi >= 0) tickValues.push(0);
  for (let k = kMin; k <= kMax; k++) {
    const v = Math.pow(10, k);
    if (v >= lo && v <= hi) tickValues.push(v);
  }
  // thin to at most 9 ticks, keeping the extremes and zero
  const thinned = thinTicks(tickValues, 9);
  return {
    pos: (v) => (symlogTransform(v) - tlo) / (thi - tlo),
    ticks: () => thinned,
    label: (v) => formatTick(v),
  };
}

function thinTicks(values: number[], maxCount: number): number[] {
  if (values.length <= maxCount) return values;
  const keep = new Set<number>([0]);
  const stride = Math.ceil(values.length / maxCount);
  const out: number[] = [];
  for (let i = 0; i < values.length; i++) {
    const v = values[i]!;
    if (keep.has(v) || i % stride === 0 || i === values.length - 1) {
      out.push(v);
    }
  }
  return out;
}

/** Deterministic tick label: integers plain, decades as 1e-k, rest short. */
export function formatTick(v: number): string {
  if (v === 0) return "0";
  const abs = Math.abs(v);
  if (abs >= 1e-3 && abs < 1e4 && Number.isInteger(v)) return String(v);
  const exp = Math.log10(abs);
  if (Number.isInteger(exp)) {
    return `${v < 0 ? "-" : ""}1e${exp}`;
  }
  return v.toPrecision(3);
}

export function makeScale(kind: ScaleKind, lo: number, hi: number): Scale {
  return kind === "linear" ? linearScale(lo, hi) : symlogScale(lo, hi);
}
