/** SVG rendering through the chart engine's server-side mode, plus optional
 * PNG rasterisation when a native image library is installed. */

import { writeFileSync } from "fs";

import * as echarts from "echarts";

import { Figure } from "./figures";

export function renderSvg(figure: Figure): string {
  const chart = echarts.init(null, null, {
    renderer: "svg",
    ssr: true,
    width: figure.width,
    height: figure.height,
  });
  chart.setOption(figure.option as echarts.EChartsOption);
  const svg = chart.renderToSVGString();
  chart.dispose();
  return svg;
}

export interface RenderResult {
  svgPath: string;
  pngPath: string | null;
  warnings: string[];
}

export async function renderToFiles(figure: Figure, basePath: string): Promise<RenderResult> {
  const svg = renderSvg(figure);
  const svgPath = `${basePath}.svg`;
  writeFileSync(svgPath, svg);
  let pngPath: string | null = null;
  try {
    const sharp = (await import("sharp")).default;
    pngPath = `${basePath}.png`;
    await sharp(Buffer.from(svg), { density: 144 }).png().toFile(pngPath);
  } catch {
    figure.warnings.push("PNG rasteriser unavailable; emitted SVG only");
  }
  return { svgPath, pngPath, warnings: figure.warnings };
}
