/**
 * Multi-panel line-figure construction on top of echarts' SVG SSR
 * renderer. Everything is static: fixed palette, no animation, no
 * interactivity, so identical inputs yield identical SVG bytes.
 */

import * as echarts from "echarts";

export interface Line {
  name: string;
  x: number[];
  y: number[];
  dashed?: boolean;
  colorIndex?: number;
}

export interface Panel {
  title: string;
  xLabel: string;
  yLabel: string;
  lines: Line[];
  xLog?: boolean;
}

export const PALETTE = [
  "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
  "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
];

const LEGEND_SPACE_PX = 58;
const PANEL_HEIGHT_PX = 330;
const PANEL_GAP_PX = 72;

export function figureHeight(nPanels: number, columns: number): number {
  const rows = Math.ceil(nPanels / columns);
  return LEGEND_SPACE_PX + rows * PANEL_HEIGHT_PX + (rows - 1) * PANEL_GAP_PX + 46;
}

export function buildOption(panels: Panel[], columns: number, width: number,
                            height: number): echarts.EChartsOption {
  const rows = Math.ceil(panels.length / columns);
  const gapX = 7; // percent
  const cellW = (94 - (columns - 1) * gapX) / columns;
  const legendPct = (LEGEND_SPACE_PX / height) * 100;
  const cellH = (PANEL_HEIGHT_PX / height) * 100;
  const gapY = (PANEL_GAP_PX / height) * 100;

  const grids: object[] = [];
  const titles: object[] = [];
  const xAxes: object[] = [];
  const yAxes: object[] = [];
  const series: object[] = [];
  const legendNames: string[] = [];

  panels.forEach((panel, idx) => {
    const row = Math.floor(idx / columns);
    const col = idx % columns;
    const left = 4.5 + col * (cellW + gapX);
    const top = legendPct + row * (cellH + gapY);
    grids.push({ left: `${left}%`, top: `${top}%`, width: `${cellW}%`, height: `${cellH}%` });
    titles.push({
      text: panel.title,
      left: `${left + cellW / 2}%`,
      top: `${top - 4.2 * (330 / PANEL_HEIGHT_PX)}%`,
      textAlign: "center",
      textStyle: { fontSize: 14, fontWeight: "normal" },
    });
    xAxes.push({
      gridIndex: idx,
      type: panel.xLog ? "log" : "value",
      name: panel.xLabel,
      nameLocation: "middle",
      nameGap: 26,
      axisLine: { show: true },
      splitLine: { show: false },
    });
    yAxes.push({
      gridIndex: idx,
      type: "value",
      name: panel.yLabel,
      nameLocation: "middle",
      nameGap: 44,
      axisLine: { show: true },
      splitLine: { show: true, lineStyle: { opacity: 0.3 } },
    });
    panel.lines.forEach((line, li) => {
      if (!legendNames.includes(line.name)) {
        legendNames.push(line.name);
      }
      const color = PALETTE[(line.colorIndex ?? li) % PALETTE.length];
      series.push({
        type: "line",
        name: line.name,
        xAxisIndex: idx,
        yAxisIndex: idx,
        data: line.x.map((xv, k) => [xv, line.y[k]]),
        showSymbol: false,
        color,
        lineStyle: { width: 1.4, type: line.dashed ? "dashed" : "solid" },
        emphasis: { disabled: true },
        animation: false,
      });
    });
  });

  return {
    animation: false,
    backgroundColor: "#ffffff",
    legend: { top: 6, data: legendNames, icon: "rect", itemWidth: 18, itemHeight: 3 },
    title: titles,
    grid: grids,
    xAxis: xAxes as echarts.EChartsOption["xAxis"],
    yAxis: yAxes as echarts.EChartsOption["yAxis"],
    series: series as echarts.EChartsOption["series"],
  };
}

/**
 * zrender numbers element-id prefixes per chart instance and CSS classes
 * per process; renumber both by first appearance so identical inputs
 * give identical bytes regardless of how many charts ran before.
 */
export function canonicalizeSvg(svg: string): string {
  const prefixed = svg.replace(/zr\d+-/g, "zr-");
  const seen = new Map<string, string>();
  return prefixed.replace(/zr-cls-\d+/g, (match) => {
    let mapped = seen.get(match);
    if (mapped === undefined) {
      mapped = `zr-cls-${seen.size}`;
      seen.set(match, mapped);
    }
    return mapped;
  });
}

export function renderSvg(panels: Panel[], columns: number, width = 1280): string {
  const height = figureHeight(panels.length, columns);
  const chart = echarts.init(null, null, {
    renderer: "svg",
    ssr: true,
    width,
    height,
  });
  try {
    chart.setOption(buildOption(panels, columns, width, height));
    return canonicalizeSvg(chart.renderToSVGString());
  } finally {
    chart.dispose();
  }
}
