/**
 * Figure builders: each returns an echarts option object assembled from a
 * completed run directory's CSV streams.
 *
 * Colour convention follows the harmonic-well frequencies: the high memory
 * frequency is orange, the gate frequency green, the low memory frequency
 * blue, so panels can be compared against the source plots at a glance.
 */

import { readFileSync, existsSync } from "fs";
import { join } from "path";

import { InputError, Table, column, readCsv, requireColumns } from "./csv";

export const COLOR_HIGH = "#ff7f0e"; // omega_h
export const COLOR_GATE = "#2ca02c"; // omega_m
export const COLOR_LOW = "#1f77b4"; // omega_l
const STATE_COLORS = ["#444444", "#d62728", "#9467bd"]; // (1,1), (2,0), (0,2)

export interface Figure {
  option: object;
  width: number;
  height: number;
  warnings: string[];
}

const TWO_PI = 2.0 * Math.PI;

function axis(name: string, gridIndex = 0, extra: object = {}) {
  return {
    type: "value",
    name,
    nameLocation: "middle",
    nameGap: 28,
    gridIndex,
    axisLine: { show: true },
    ...extra,
  };
}

/** Dual-axis ramp figure: drive frequency (solid) and scaling b(t) (dashed). */
export function buildPulseFigure(csvPaths: string[]): Figure {
  if (csvPaths.length === 0) {
    throw new InputError("no pulse CSVs given");
  }
  const series: object[] = [];
  const legends: string[] = [];
  for (const path of csvPaths) {
    const table = readCsv(path);
    requireColumns(table, ["t[s]", "b", "omega[rad/s]"], path);
    const t = column(table, "t[s]", path).map((v) => v * 1e6);
    const b = column(table, "b", path);
    const omega = column(table, "omega[rad/s]", path).map((v) => v / TWO_PI / 1e6);
    const down = omega[0] > omega[omega.length - 1];
    const color = down ? COLOR_HIGH : COLOR_LOW;
    const label = down ? "down conversion" : "up conversion";
    legends.push(`${label} omega`, `${label} b`);
    series.push(
      {
        name: `${label} omega`,
        type: "line",
        showSymbol: false,
        lineStyle: { color, width: 2 },
        itemStyle: { color },
        data: t.map((x, i) => [x, omega[i]]),
      },
      {
        name: `${label} b`,
        type: "line",
        yAxisIndex: 1,
        showSymbol: false,
        lineStyle: { color, width: 2, type: "dashed" },
        itemStyle: { color },
        data: t.map((x, i) => [x, b[i]]),
      }
    );
  }
  return {
    width: 680,
    height: 440,
    warnings: [],
    option: {
      animation: false,
      backgroundColor: "#ffffff",
      legend: { data: legends, top: 4 },
      grid: { left: 64, right: 64, top: 56, bottom: 48 },
      xAxis: axis("t (us)"),
      yAxis: [
        axis("omega / 2 pi (MHz)", 0, { nameGap: 38 }),
        axis("b(t)", 0, { nameGap: 38, position: "right", splitLine: { show: false } }),
      ],
      series,
    },
  };
}

interface HomWindows {
  tFc: number;
  t3: number;
}

function readRunWindows(runDir: string): HomWindows {
  const reportPath = join(runDir, "report.json");
  if (!existsSync(reportPath)) {
    throw new InputError(`${reportPath}: missing report.json (needed for the ramp windows)`);
  }
  const report = JSON.parse(readFileSync(reportPath, "utf8"));
  return { tFc: report.derived.t_fc_s, t3: report.derived.t3_s };
}

const POP_COLUMNS = [
  "pop_mem_1_1",
  "pop_mem_2_0",
  "pop_mem_0_2",
  "pop_gate_1_1",
  "pop_gate_2_0",
  "pop_gate_0_2",
];

/** Population traces: full gate plus zooms over the two conversion windows. */
export function buildHomFigure(populationsCsv: string, windows: HomWindows): Figure {
  const table = readCsv(populationsCsv);
  requireColumns(table, ["t[s]", ...POP_COLUMNS], populationsCsv);
  const warnings: string[] = [];
  const t = column(table, "t[s]", populationsCsv).map((v) => v * 1e6);
  const tFc = windows.tFc * 1e6;
  const t3 = windows.t3 * 1e6;
  const tMax = t[t.length - 1];
  if (tMax < t3 - 1e-9) {
    warnings.push(
      `time range ends at ${tMax.toFixed(2)} us, before the inverse conversion at ${t3.toFixed(2)} us; zoom panels clipped`
    );
  }

  const seriesFor = (gridIndex: number) =>
    POP_COLUMNS.map((name, k) => {
      const vals = column(table, name, populationsCsv);
      const mem = name.includes("mem");
      return {
        name: name.replace("pop_", "").replace(/_/g, " "),
        type: "line",
        xAxisIndex: gridIndex,
        yAxisIndex: gridIndex,
        showSymbol: false,
        lineStyle: {
          color: STATE_COLORS[k % 3],
          width: mem ? 2 : 1.4,
          type: mem ? "solid" : "dashed",
        },
        itemStyle: { color: STATE_COLORS[k % 3] },
        data: t.map((x, i) => [x, vals[i]]),
      };
    });

  const shade = (gridIndex: number) => ({
    type: "line",
    xAxisIndex: gridIndex,
    yAxisIndex: gridIndex,
    data: [],
    markArea: {
      silent: true,
      itemStyle: { color: "rgba(128,128,128,0.18)" },
      data: [
        [{ xAxis: 0 }, { xAxis: Math.min(tFc, tMax) }],
        [{ xAxis: Math.min(t3 - tFc, tMax) }, { xAxis: Math.min(t3, tMax) }],
      ],
    },
  });

  const zoomEnd = Math.min(tFc * 1.25, tMax);
  const zoomStart = Math.min(Math.max(t3 - tFc * 1.25, 0), tMax);
  return {
    width: 860,
    height: 640,
    warnings,
    option: {
      animation: false,
      backgroundColor: "#ffffff",
      legend: { top: 2, data: POP_COLUMNS.map((n) => n.replace("pop_", "").replace(/_/g, " ")) },
      grid: [
        { left: 64, right: 24, top: 56, height: 260 },
        { left: 64, width: 330, top: 400, height: 190 },
        { left: 480, width: 330, top: 400, height: 190 },
      ],
      xAxis: [
        axis("t (us)", 0),
        axis("t (us), conversion", 1, { min: 0, max: zoomEnd }),
        axis("t (us), inverse conversion", 2, { min: zoomStart, max: tMax }),
      ],
      yAxis: [axis("population", 0), axis("population", 1), axis("population", 2)],
      series: [
        ...seriesFor(0),
        shade(0),
        ...seriesFor(1),
        shade(1),
        ...seriesFor(2),
        shade(2),
      ],
    },
  };
}

export function buildHomFigureFromRun(runDir: string): Figure {
  return buildHomFigure(join(runDir, "populations.csv"), readRunWindows(runDir));
}

const GKP_STAGES: Array<{
  solid: string;
  dashed: string | null;
  title: string;
  solidAtGate: boolean;
  dashedAtGate: boolean;
}> = [
  { solid: "fc_in", dashed: "fc_out", title: "conversion", solidAtGate: false, dashedAtGate: true },
  { solid: "ifc_in", dashed: "ifc_out", title: "inverse conversion", solidAtGate: true, dashedAtGate: false },
  { solid: "compensated", dashed: "target", title: "after phase gate", solidAtGate: false, dashedAtGate: false },
];

/** 2 x 3 marginal grid: conversion, inverse conversion, compensated output. */
export function buildGkpFigure(runDir: string): Figure {
  const required: string[] = [];
  for (const mode of [0, 1]) {
    for (const stage of GKP_STAGES) {
      required.push(`marginals_${stage.solid}_mode${mode}.csv`);
      if (stage.dashed) {
        required.push(`marginals_${stage.dashed}_mode${mode}.csv`);
      }
    }
  }
  const missing = required.filter((f) => !existsSync(join(runDir, f)));
  if (missing.length > 0) {
    throw new InputError(`run directory ${runDir} is missing marginal CSVs: ${missing.join(", ")}`);
  }

  const grids: object[] = [];
  const xAxes: object[] = [];
  const yAxes: object[] = [];
  const series: object[] = [];
  const titles: object[] = [];
  for (const mode of [0, 1]) {
    const memColor = mode === 0 ? COLOR_HIGH : COLOR_LOW;
    for (let col = 0; col < 3; col++) {
      const gi = mode * 3 + col;
      const stage = GKP_STAGES[col];
      grids.push({
        left: 70 + col * 300,
        top: 48 + mode * 280,
        width: 250,
        height: 210,
      });
      xAxes.push(axis(mode === 1 ? "x" : "", gi));
      yAxes.push(axis(col === 0 ? `mode ${mode} density` : "", gi, { nameGap: 38 }));
      titles.push({
        text: `${stage.title} (mode ${mode})`,
        left: 70 + col * 300 + 60,
        top: 20 + mode * 280,
        textStyle: { fontSize: 12, fontWeight: "normal" },
      });
      const addSeries = (label: string, atGate: boolean, dashed: boolean, thin = false) => {
        const path = join(runDir, `marginals_${label}_mode${mode}.csv`);
        const table = readCsv(path);
        requireColumns(table, ["x", "density"], path);
        const xs = column(table, "x", path);
        const dens = column(table, "density", path);
        const color = label === "target" ? "#999999" : atGate ? COLOR_GATE : memColor;
        series.push({
          name: `${label} mode ${mode}`,
          type: "line",
          xAxisIndex: gi,
          yAxisIndex: gi,
          showSymbol: false,
          lineStyle: { color, width: thin ? 1 : 1.8, type: dashed ? "dashed" : "solid" },
          itemStyle: { color },
          data: xs.map((x, i) => [x, dens[i]]),
        });
      };
      addSeries(stage.solid, stage.solidAtGate, false);
      if (stage.dashed) {
        addSeries(stage.dashed, stage.dashedAtGate, true, stage.dashed === "target");
      }
    }
  }
  return {
    width: 980,
    height: 620,
    warnings: [],
    option: {
      animation: false,
      backgroundColor: "#ffffff",
      title: titles,
      grid: grids,
      xAxis: xAxes,
      yAxis: yAxes,
      series,
    },
  };
}
