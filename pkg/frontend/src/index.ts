export { parseTrace, TraceParseError, TraceTable, TracePoint } from "./trace";
export { renderChart, ChartOptions, Metric } from "./chart";
export { main, parseArgs, runPlot, PlotArgs, UsageError } from "./cli";
