/** Minimal deterministic SVG builders: fixed canvas, fixed styles, no
 * timestamps or random ids, coordinates rounded to 1/100 px. Identical
 * inputs therefore produce byte-identical documents. */

export const WIDTH = 720;
export const HEIGHT = 440;
export const MARGIN = { top: 46, right: 210, bottom: 54, left: 66 } as const;

export const PLOT = {
  left: MARGIN.left,
  right: WIDTH - MARGIN.right,
  top: MARGIN.top,
  bottom: HEIGHT - MARGIN.bottom,
} as const;

export type Scale = (value: number) => number;

export function linearScale(d0: number, d1: number, r0: number, r1: number): Scale {
  const span = d1 - d0;
  return (value) => r0 + ((value - d0) / span) * (r1 - r0);
}

/** Pixel coordinate: fixed two decimals so output never varies in width. */
export function px(value: number): string {
  return value.toFixed(2);
}

/** Tick label: shortest unambiguous decimal form. */
export function tickLabel(value: number): string {
  return String(Number(value.toPrecision(10)));
}

/** Round tick step to 1/2/5 x 10^k covering (max-min)/count. */
export function ticks(min: number, max: number, count: number): number[] {
  if (!(max > min)) return [min];
  const raw = (max - min) / Math.max(1, count - 1);
  const pow = Math.pow(10, Math.floor(Math.log10(raw)));
  const step = [1, 2, 5, 10].map((m) => m * pow).find((s) => s >= raw) ?? 10 * pow;
  const start = Math.ceil(min / step) * step;
  const values: number[] = [];
  for (let v = start; v <= max + step / 1e6; v += step) {
    values.push(Number(v.toPrecision(12)));
  }
  return values;
}

export function escapeText(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

export function line(
  x1: number, y1: number, x2: number, y2: number, style: string,
): string {
  return `<line x1="${px(x1)}" y1="${px(y1)}" x2="${px(x2)}" y2="${px(y2)}" ${style}/>`;
}

export function polylinePath(points: Array<[number, number]>): string {
  return points
    .map(([x, y], i) => `${i === 0 ? "M" : "L"}${px(x)},${px(y)}`)
    .join(" ");
}

/** Closed band: upper edge left-to-right, then lower edge right-to-left. */
export function bandPath(
  upper: Array<[number, number]>, lower: Array<[number, number]>,
): string {
  return `${polylinePath(upper)} ${polylinePath([...lower].reverse()).replace(/^M/, "L")} Z`;
}

export function text(
  x: number, y: number, content: string, style = "",
): string {
  return `<text x="${px(x)}" y="${px(y)}" ${style}>${escapeText(content)}</text>`;
}

const AXIS_STYLE = 'stroke="#333333" stroke-width="1"';
const GRID_STYLE = 'stroke="#dddddd" stroke-width="1"';
const LABEL_STYLE = 'font-family="monospace" font-size="11" fill="#333333"';

export function xAxis(scale: Scale, values: number[], label: string): string[] {
  const parts = [line(PLOT.left, PLOT.bottom, PLOT.right, PLOT.bottom, AXIS_STYLE)];
  for (const v of values) {
    const x = scale(v);
    parts.push(line(x, PLOT.bottom, x, PLOT.bottom + 5, AXIS_STYLE));
    parts.push(text(x, PLOT.bottom + 18, tickLabel(v), `${LABEL_STYLE} text-anchor="middle"`));
  }
  parts.push(
    text((PLOT.left + PLOT.right) / 2, HEIGHT - 14, label, `${LABEL_STYLE} text-anchor="middle"`),
  );
  return parts;
}

export function yAxis(scale: Scale, values: number[], label: string): string[] {
  const parts = [line(PLOT.left, PLOT.top, PLOT.left, PLOT.bottom, AXIS_STYLE)];
  for (const v of values) {
    const y = scale(v);
    parts.push(line(PLOT.left, y, PLOT.right, y, GRID_STYLE));
    parts.push(line(PLOT.left - 5, y, PLOT.left, y, AXIS_STYLE));
    parts.push(text(PLOT.left - 8, y + 4, tickLabel(v), `${LABEL_STYLE} text-anchor="end"`));
  }
  parts.push(
    `<text x="18" y="${px((PLOT.top + PLOT.bottom) / 2)}" ${LABEL_STYLE} ` +
      `text-anchor="middle" transform="rotate(-90 18 ${px((PLOT.top + PLOT.bottom) / 2)})">` +
      `${escapeText(label)}</text>`,
  );
  return parts;
}

export function svgDocument(body: string[]): string {
  return [
    `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" ` +
      `viewBox="0 0 ${WIDTH} ${HEIGHT}">`,
    `<rect width="${WIDTH}" height="${HEIGHT}" fill="#ffffff"/>`,
    ...body,
    "</svg>",
    "",
  ].join("\n");
}
