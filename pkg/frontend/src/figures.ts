import { SchemaError } from "./csv.js";
import type { RunRecord, SummaryRow } from "./types.js";
import {
  HEIGHT,
  PLOT,
  type Scale,
  bandPath,
  line,
  linearScale,
  polylinePath,
  svgDocument,
  text,
  ticks,
  xAxis,
  yAxis,
} from "./svg.js";

const PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"];
const TITLE_STYLE = 'font-family="monospace" font-size="14" fill="#111111"';
const NOTE_STYLE = 'font-family="monospace" font-size="10" fill="#666666"';
const LEGEND_STYLE = 'font-family="monospace" font-size="11" fill="#333333"';
const DOTTED = 'stroke-dasharray="2,4"';

interface Series {
  label: string;
  color: string;
  /** points sorted by x; band, when present, is [lower, upper] in data units */
  points: Array<{ x: number; y: number; band?: [number, number] }>;
}

interface Baseline {
  label: string;
  color: string;
  y: number;
}

function yDomain(values: number[]): [number, number] {
  const min = Math.min(...values);
  const max = Math.max(...values);
  const pad = max > min ? 0.06 * (max - min) : 0.5;
  return [min - pad, max + pad];
}

function legend(series: Series[], baselines: Baseline[]): string[] {
  const x = PLOT.right + 14;
  const parts: string[] = [];
  let row = 0;
  for (const s of series) {
    const y = PLOT.top + 12 + row * 18;
    parts.push(line(x, y - 4, x + 18, y - 4, `stroke="${s.color}" stroke-width="2"`));
    parts.push(text(x + 24, y, s.label, LEGEND_STYLE));
    row += 1;
  }
  for (const b of baselines) {
    const y = PLOT.top + 12 + row * 18;
    parts.push(line(x, y - 4, x + 18, y - 4, `stroke="${b.color}" stroke-width="2" ${DOTTED}`));
    parts.push(text(x + 24, y, b.label, LEGEND_STYLE));
    row += 1;
  }
  return parts;
}

function chart(
  title: string,
  xLabel: string,
  yLabel: string,
  xDomain: [number, number],
  xTicks: number[],
  series: Series[],
  baselines: Baseline[],
  footnote: string,
): string {
  const xs = linearScale(xDomain[0], xDomain[1], PLOT.left, PLOT.right);
  const allY = [
    ...series.flatMap((s) => s.points.flatMap((p) => (p.band ? [p.y, ...p.band] : [p.y]))),
    ...baselines.map((b) => b.y),
  ];
  const [y0, y1] = yDomain(allY);
  const ys: Scale = linearScale(y0, y1, PLOT.bottom, PLOT.top);

  const body: string[] = [];
  body.push(text(PLOT.left, 26, title, TITLE_STYLE));
  body.push(...yAxis(ys, ticks(y0, y1, 6), yLabel));
  body.push(...xAxis(xs, xTicks, xLabel));
  for (const s of series) {
    const banded = s.points.filter((p) => p.band !== undefined);
    if (banded.length > 0) {
      const upper = banded.map((p): [number, number] => [xs(p.x), ys(p.band![1])]);
      const lower = banded.map((p): [number, number] => [xs(p.x), ys(p.band![0])]);
      body.push(
        `<path d="${bandPath(upper, lower)}" fill="${s.color}" fill-opacity="0.18" stroke="none"/>`,
      );
    }
  }
  for (const s of series) {
    const pts = s.points.map((p): [number, number] => [xs(p.x), ys(p.y)]);
    body.push(
      `<path d="${polylinePath(pts)}" fill="none" stroke="${s.color}" stroke-width="2"/>`,
    );
    for (const [x, y] of pts) {
      body.push(`<circle cx="${x.toFixed(2)}" cy="${y.toFixed(2)}" r="2.5" fill="${s.color}"/>`);
    }
  }
  for (const b of baselines) {
    body.push(line(PLOT.left, ys(b.y), PLOT.right, ys(b.y), `stroke="${b.color}" stroke-width="1.5" ${DOTTED}`));
  }
  body.push(...legend(series, baselines));
  body.push(text(PLOT.left, HEIGHT - 30, footnote, NOTE_STYLE));
  return svgDocument(body);
}

function groupKey(row: SummaryRow): string {
  return `${row.architecture}/${row.dataset}`;
}

/** Distinct sorted values -> x domain; degenerate single value gets padding. */
function spanDomain(sortedValues: number[]): [number, number] {
  const lo = sortedValues[0];
  const hi = sortedValues[sortedValues.length - 1];
  return lo === hi ? [lo - 0.5, hi + 0.5] : [lo, hi];
}

function color(index: number): string {
  return PALETTE[index % PALETTE.length];
}

/** Accuracy vs bit width for post-training quantization, one curve per
 * architecture/dataset, with the FP32 reference as a dotted line. */
export function renderElbow(rows: SummaryRow[], source: string): string {
  const quant = rows.filter((r) => r.paradigm === "ptq_inference" && r.mode === "ptq" && r.bits !== null);
  if (quant.length === 0) {
    throw new SchemaError(`${source}: no ptq_inference rows with mode "ptq"`);
  }
  const keys = [...new Set(quant.map(groupKey))].sort();
  const series: Series[] = keys.map((key, i) => ({
    label: key,
    color: color(i),
    points: quant
      .filter((r) => groupKey(r) === key)
      .sort((a, b) => a.bits! - b.bits!)
      .map((r) => ({ x: r.bits!, y: r.mean_test_acc })),
  }));
  const baselines: Baseline[] = rows
    .filter((r) => r.paradigm === "ptq_inference" && r.mode === "fp32")
    .sort((a, b) => groupKey(a).localeCompare(groupKey(b)))
    .map((r) => ({
      label: `${groupKey(r)} fp32`,
      color: color(keys.indexOf(groupKey(r))),
      y: r.mean_test_acc,
    }));
  const bits = [...new Set(quant.map((r) => r.bits!))].sort((a, b) => a - b);
  return chart(
    "Post-training quantization: test accuracy vs DAC resolution",
    "DAC resolution (bits)",
    "mean test accuracy",
    spanDomain(bits),
    bits,
    series,
    baselines,
    "dotted line: fp32 reference (infinite resolution)",
  );
}

function modeLabel(row: SummaryRow): string {
  const temp = row.temperature === null ? "" : ` T=${row.temperature}`;
  return `${groupKey(row)} ${row.mode}${temp}`;
}

/** Training under quantization: mean test accuracy vs bit width with a
 * mean +/- variance band per mode, dotted FP32 baseline. */
export function renderAccVsBits(rows: SummaryRow[], source: string): string {
  const quant = rows.filter(
    (r) => r.paradigm === "quant_training" && r.bits !== null && r.mode !== "fp32",
  );
  if (quant.length === 0) {
    throw new SchemaError(`${source}: no quant_training rows with a bit width`);
  }
  const keys = [...new Set(quant.map(modeLabel))].sort();
  const series: Series[] = keys.map((key, i) => ({
    label: key,
    color: color(i),
    points: quant
      .filter((r) => modeLabel(r) === key)
      .sort((a, b) => a.bits! - b.bits!)
      .map((r) => ({
        x: r.bits!,
        y: r.mean_test_acc,
        band: [r.mean_test_acc - r.var_test_acc, r.mean_test_acc + r.var_test_acc] as [number, number],
      })),
  }));
  const baselines: Baseline[] = rows
    .filter((r) => r.paradigm === "quant_training" && r.mode === "fp32")
    .sort((a, b) => groupKey(a).localeCompare(groupKey(b)))
    .map((r, i) => ({
      label: `${groupKey(r)} fp32`,
      color: color(keys.length + i),
      y: r.mean_test_acc,
    }));
  const bits = [...new Set(quant.map((r) => r.bits!))].sort((a, b) => a - b);
  return chart(
    "Training under quantization: test accuracy vs DAC resolution",
    "DAC resolution (bits)",
    "mean test accuracy",
    spanDomain(bits),
    bits,
    series,
    baselines,
    "shaded band: mean +/- variance across seeds; dotted line: fp32 reference",
  );
}

/** Loss per epoch for one stored trial. */
export function renderLossTrace(record: RunRecord, _source: string): string {
  const c = record.config;
  const bits = c.bits === null || c.bits === undefined ? "" : ` ${c.bits}-bit`;
  const temp = c.temperature === null || c.temperature === undefined ? "" : ` T=${c.temperature}`;
  const title = `Training loss: ${c.architecture}/${c.dataset} ${c.mode}${bits}${temp} seed ${c.seed}`;
  const series: Series[] = [
    {
      label: `${c.mode}${bits}`,
      color: PALETTE[0],
      points: record.traces
        .slice()
        .sort((a, b) => a.epoch - b.epoch)
        .map((t) => ({ x: t.epoch, y: t.mean_loss })),
    },
  ];
  const epochs = series[0].points.map((p) => p.x);
  const lo = Math.min(...epochs);
  const hi = Math.max(...epochs);
  const xTicks = ticks(lo, hi, 8).filter(Number.isInteger);
  return chart(
    title,
    "epoch",
    "mean training loss",
    spanDomain([lo, hi]),
    xTicks.length > 1 ? xTicks : epochs,
    series,
    [],
    "",
  );
}
