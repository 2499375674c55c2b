export { render, FIGURE_KINDS } from "./figures.js";
export type { FigureKind } from "./figures.js";
export { parseCsv, column, stringColumn, SchemaError } from "./csv.js";
export { SvgDoc } from "./svg.js";
