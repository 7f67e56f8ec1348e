/**
 * Figure rendering from a completed run directory.
 *
 *   plotkit render-pulse --run-dir runs/hom [--out-dir DIR]
 *   plotkit render-hom   --run-dir runs/hom
 *   plotkit render-gkp   --run-dir runs/swap-gkp
 *   plotkit render-all   --run-dir DIR
 */

import { existsSync, mkdirSync, readdirSync } from "fs";
import { join } from "path";

import { InputError } from "./csv";
import { Figure, buildGkpFigure, buildHomFigureFromRun, buildPulseFigure } from "./figures";
import { renderToFiles } from "./render";

interface Args {
  command: string;
  runDir: string;
  outDir: string;
}

export function parseArgs(argv: string[]): Args {
  const [command, ...rest] = argv;
  const known = ["render-pulse", "render-hom", "render-gkp", "render-all"];
  if (!command || !known.includes(command)) {
    throw new InputError(`usage: plotkit <${known.join("|")}> --run-dir DIR [--out-dir DIR]`);
  }
  let runDir = "";
  let outDir = "";
  for (let i = 0; i < rest.length; i += 2) {
    const key = rest[i];
    const val = rest[i + 1];
    if (val === undefined) throw new InputError(`missing value for ${key}`);
    if (key === "--run-dir") runDir = val;
    else if (key === "--out-dir") outDir = val;
    else throw new InputError(`unknown flag ${key}`);
  }
  if (!runDir) throw new InputError("--run-dir is required");
  return { command, runDir, outDir: outDir || join(runDir, "figures") };
}

function pulseCsvPaths(runDir: string): string[] {
  const files = readdirSync(runDir)
    .filter((f) => f.startsWith("pulse_") && f.endsWith(".csv"))
    .sort();
  if (files.length === 0) {
    throw new InputError(`${runDir}: no pulse_*.csv files`);
  }
  return files.map((f) => join(runDir, f));
}

async function emit(figure: Figure, outDir: string, name: string): Promise<void> {
  mkdirSync(outDir, { recursive: true });
  const result = await renderToFiles(figure, join(outDir, name));
  for (const warning of result.warnings) {
    console.warn(`warning: ${warning}`);
  }
  console.log(result.pngPath ? `${result.svgPath} + ${result.pngPath}` : result.svgPath);
}

export async function main(argv: string[]): Promise<number> {
  let args: Args;
  try {
    args = parseArgs(argv);
  } catch (err) {
    console.error((err as Error).message);
    return 2;
  }
  try {
    const tasks: Array<[string, () => Figure]> = [];
    if (args.command === "render-pulse" || args.command === "render-all") {
      tasks.push(["pulse", () => buildPulseFigure(pulseCsvPaths(args.runDir))]);
    }
    if (args.command === "render-hom" || args.command === "render-all") {
      tasks.push(["hom_populations", () => buildHomFigureFromRun(args.runDir)]);
    }
    if (args.command === "render-gkp" || args.command === "render-all") {
      tasks.push(["gkp_marginals", () => buildGkpFigure(args.runDir)]);
    }
    for (const [name, build] of tasks) {
      if (args.command === "render-all") {
        // render-all skips figures whose inputs are absent from this run
        try {
          await emit(build(), args.outDir, name);
        } catch (err) {
          if (err instanceof InputError) {
            console.warn(`skipping ${name}: ${(err as Error).message}`);
            continue;
          }
          throw err;
        }
      } else {
        await emit(build(), args.outDir, name);
      }
    }
    return 0;
  } catch (err) {
    if (err instanceof InputError) {
      console.error(`input error: ${(err as Error).message}`);
      return 1;
    }
    throw err;
  }
}

if (require.main === module) {
  main(process.argv.slice(2)).then((code) => {
    process.exitCode = code;
  });
}
