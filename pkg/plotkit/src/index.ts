export { InputError, Table, column, parseCsv, readCsv, requireColumns } from "./csv";
export {
  COLOR_GATE,
  COLOR_HIGH,
  COLOR_LOW,
  Figure,
  buildGkpFigure,
  buildHomFigure,
  buildHomFigureFromRun,
  buildPulseFigure,
} from "./figures";
export { renderSvg, renderToFiles } from "./render";
