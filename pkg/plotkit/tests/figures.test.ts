import { mkdtempSync, writeFileSync, existsSync } from "fs";
import { tmpdir } from "os";
import { join } from "path";

import { describe, expect, it } from "vitest";

import { InputError } from "../src/csv";
import {
  COLOR_GATE,
  COLOR_HIGH,
  COLOR_LOW,
  buildGkpFigure,
  buildHomFigure,
  buildPulseFigure,
} from "../src/figures";
import { renderSvg } from "../src/render";
import { parseArgs } from "../src/cli";

const TWO_PI = 2 * Math.PI;

function tmp(): string {
  return mkdtempSync(join(tmpdir(), "plotkit-"));
}

function writePulseCsv(dir: string, name: string, w0: number, w1: number): string {
  const rows = ["t[s],b,bdot,bddot,omega[rad/s]"];
  for (let i = 0; i <= 20; i++) {
    const t = (i / 20) * 4e-6;
    const w = w0 + ((w1 - w0) * i) / 20;
    const b = Math.sqrt(w0 / w);
    rows.push(`${t},${b},0,0,${w}`);
  }
  const path = join(dir, name);
  writeFileSync(path, rows.join("\n") + "\n");
  return path;
}

describe("pulse figure", () => {
  it("colour-codes ramps by direction and uses both axes", () => {
    const dir = tmp();
    const down = writePulseCsv(dir, "pulse_fc0_down.csv", TWO_PI * 2.64e6, TWO_PI * 2.42e6);
    const up = writePulseCsv(dir, "pulse_fc1_up.csv", TWO_PI * 2.2e6, TWO_PI * 2.42e6);
    const fig = buildPulseFigure([down, up]);
    const series = (fig.option as any).series;
    expect(series).toHaveLength(4);
    expect(series[0].lineStyle.color).toBe(COLOR_HIGH);
    expect(series[2].lineStyle.color).toBe(COLOR_LOW);
    expect(series[1].yAxisIndex).toBe(1); // b on the right axis
    // frequency endpoints in cyclic MHz
    const omega = series[0].data.map((d: number[]) => d[1]);
    expect(omega[0]).toBeCloseTo(2.64, 6);
    expect(omega[omega.length - 1]).toBeCloseTo(2.42, 6);
  });

  it("rejects missing columns and empty files", () => {
    const dir = tmp();
    const bad = join(dir, "bad.csv");
    writeFileSync(bad, "t[s],b\n0,1\n");
    expect(() => buildPulseFigure([bad])).toThrow(InputError);
    const empty = join(dir, "empty.csv");
    writeFileSync(empty, "");
    expect(() => buildPulseFigure([empty])).toThrow(InputError);
    expect(() => buildPulseFigure([])).toThrow(InputError);
  });
});

function writePopulationsCsv(dir: string, tEnd: number): string {
  const cols = [
    "t[s]",
    "norm",
    "pop_mem_1_1",
    "pop_mem_2_0",
    "pop_mem_0_2",
    "pop_gate_1_1",
    "pop_gate_2_0",
    "pop_gate_0_2",
  ];
  const rows = [cols.join(",")];
  for (let i = 0; i <= 50; i++) {
    const t = (i / 50) * tEnd;
    const f = t / tEnd;
    rows.push([t, 1, 1 - f, f / 2, f / 2, 0.99 * (1 - f), f / 2, f / 2].join(","));
  }
  const path = join(dir, "populations.csv");
  writeFileSync(path, rows.join("\n") + "\n");
  return path;
}

describe("population figure", () => {
  const windows = { tFc: 4e-6, t3: 587e-6 };

  it("assembles a main panel plus two zooms", () => {
    const dir = tmp();
    const csv = writePopulationsCsv(dir, 587e-6);
    const fig = buildHomFigure(csv, windows);
    const opt = fig.option as any;
    expect(opt.grid).toHaveLength(3);
    expect(opt.series.filter((s: any) => s.markArea)).toHaveLength(3);
    // six traces per panel: memory solid, gate dashed
    const mains = opt.series.filter((s: any) => (s.xAxisIndex ?? 0) === 0 && !s.markArea);
    expect(mains).toHaveLength(6);
    expect(mains[0].lineStyle.type).toBe("solid");
    expect(mains[3].lineStyle.type).toBe("dashed");
    expect(fig.warnings).toHaveLength(0);
  });

  it("warns and clips when the time range is truncated", () => {
    const dir = tmp();
    const csv = writePopulationsCsv(dir, 100e-6);
    const fig = buildHomFigure(csv, windows);
    expect(fig.warnings.some((w) => w.includes("clipped"))).toBe(true);
  });

  it("rejects missing population columns", () => {
    const dir = tmp();
    const path = join(dir, "populations.csv");
    writeFileSync(path, "t[s],norm,pop_mem_1_1\n0,1,1\n");
    expect(() => buildHomFigure(path, windows)).toThrow(InputError);
  });
});

function writeMarginals(dir: string, labels: string[]): void {
  for (const label of labels) {
    for (const mode of [0, 1]) {
      const rows = ["x,density"];
      for (let i = 0; i < 32; i++) {
        const x = -8 + 0.5 * i;
        rows.push(`${x},${Math.exp(-x * x / 2)}`);
      }
      writeFileSync(join(dir, `marginals_${label}_mode${mode}.csv`), rows.join("\n") + "\n");
    }
  }
}

const GKP_LABELS = ["fc_in", "fc_out", "ifc_in", "ifc_out", "compensated", "target"];

describe("marginal grid figure", () => {
  it("builds a 2 x 3 grid with frequency colours", () => {
    const dir = tmp();
    writeMarginals(dir, GKP_LABELS);
    const fig = buildGkpFigure(dir);
    const opt = fig.option as any;
    expect(opt.grid).toHaveLength(6);
    // conversion output drawn at the gate-frequency colour
    const fcOut0 = opt.series.find((s: any) => s.name === "fc_out mode 0");
    expect(fcOut0.lineStyle.color).toBe(COLOR_GATE);
    const fcIn0 = opt.series.find((s: any) => s.name === "fc_in mode 0");
    expect(fcIn0.lineStyle.color).toBe(COLOR_HIGH);
    const fcIn1 = opt.series.find((s: any) => s.name === "fc_in mode 1");
    expect(fcIn1.lineStyle.color).toBe(COLOR_LOW);
  });

  it("rejects a run directory with missing marginals", () => {
    const dir = tmp();
    writeMarginals(dir, GKP_LABELS.slice(0, 4));
    expect(() => buildGkpFigure(dir)).toThrow(/missing marginal CSVs/);
  });
});

describe("svg rendering", () => {
  it("produces an svg document with the configured size", () => {
    const dir = tmp();
    const down = writePulseCsv(dir, "d.csv", TWO_PI * 2.64e6, TWO_PI * 2.42e6);
    const fig = buildPulseFigure([down]);
    const svg = renderSvg(fig);
    expect(svg.startsWith("<svg")).toBe(true);
    expect(svg).toContain('width="680"');
    expect(svg).toContain("omega / 2 pi (MHz)");
  });
});

describe("cli argument parsing", () => {
  it("parses command and directories", () => {
    const args = parseArgs(["render-pulse", "--run-dir", "runs/hom"]);
    expect(args.command).toBe("render-pulse");
    expect(args.outDir).toBe(join("runs/hom", "figures"));
  });

  it("rejects unknown commands and flags", () => {
    expect(() => parseArgs(["paint"])).toThrow(InputError);
    expect(() => parseArgs(["render-hom", "--bogus", "x"])).toThrow(InputError);
    expect(() => parseArgs(["render-hom"])).toThrow(/--run-dir/);
  });
});

describe("integration with a real run directory", () => {
  const runDir = join(__dirname, "..", "..", "runs", "hom");
  it.skipIf(!existsSync(join(runDir, "populations.csv")))(
    "renders the real population traces",
    async () => {
      const { buildHomFigureFromRun } = await import("../src/figures");
      const fig = buildHomFigureFromRun(runDir);
      const svg = renderSvg(fig);
      expect(svg.startsWith("<svg")).toBe(true);
      expect(fig.warnings).toHaveLength(0);
    }
  );
});
