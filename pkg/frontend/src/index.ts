export { SchemaError, SUMMARY_COLUMNS, parseRunRecord, parseSummaryCsv } from "./csv.js";
export { renderAccVsBits, renderElbow, renderLossTrace } from "./figures.js";
export { EXIT_CONFIG, EXIT_ERROR, EXIT_OK, main, render } from "./cli.js";
export type { EpochTrace, FigureKind, RunRecord, SummaryRow } from "./types.js";
export { FIGURE_KINDS } from "./types.js";
