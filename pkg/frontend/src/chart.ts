import type { MovingAveragePoint } from "./types.js";

export interface ChartLayout {
  width: number;
  height: number;
  padding: number;
}

export const DEFAULT_LAYOUT: ChartLayout = { width: 560, height: 220, padding: 28 };

/** x/y pixel position of one point; the y axis is fixed to [0, 1]. */
export function pointPosition(
  point: MovingAveragePoint,
  lastEpisode: number,
  layout: ChartLayout = DEFAULT_LAYOUT,
): { x: number; y: number } {
  const plotWidth = layout.width - 2 * layout.padding;
  const plotHeight = layout.height - 2 * layout.padding;
  const span = Math.max(1, lastEpisode - 1);
  const x = layout.padding + ((point.episode - 1) / span) * plotWidth;
  const y = layout.padding + (1 - point.value) * plotHeight;
  return { x, y };
}

/** Standalone SVG line chart of a moving-average series. Pure string builder. */
export function movingAverageSvg(
  points: MovingAveragePoint[],
  layout: ChartLayout = DEFAULT_LAYOUT,
): string {
  const { width, height, padding } = layout;
  const lastEpisode = points.length ? points[points.length - 1].episode : 1;
  const gridLines = [0, 0.5, 1]
    .map((value) => {
      const y = padding + (1 - value) * (height - 2 * padding);
      return (
        `<line class="grid" x1="${padding}" y1="${y}" x2="${width - padding}" y2="${y}"/>` +
        `<text class="axis" x="4" y="${y + 4}">${value.toFixed(1)}</text>`
      );
    })
    .join("");
  const coords = points.map((p) => pointPosition(p, lastEpisode, layout));
  const polyline = coords.length
    ? `<polyline class="series" fill="none" points="${coords
        .map((c) => `${c.x.toFixed(1)},${c.y.toFixed(1)}`)
        .join(" ")}"/>`
    : "";
  const markers = coords
    .map((c, i) => `<circle class="marker" cx="${c.x.toFixed(1)}" cy="${c.y.toFixed(1)}" r="2.5"><title>episode ${points[i].episode}: ${points[i].value}</title></circle>`)
    .join("");
  return (
    `<svg class="ma-chart" viewBox="0 0 ${width} ${height}" width="${width}" height="${height}" role="img">` +
    gridLines +
    polyline +
    markers +
    `</svg>`
  );
}
