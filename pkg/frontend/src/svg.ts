/**
 * Minimal deterministic SVG line plotting.
 *
 * No timestamps, no randomness: the same series always serialize to the
 * same bytes.  Numbers are written with a fixed precision.
 */

export interface Series {
  label: string;
  x: number[];
  y: number[];
  color?: string;
  dashed?: boolean;
}

export interface PlotSpec {
  title: string;
  xLabel: string;
  yLabel: string;
  series: Series[];
  width?: number;
  height?: number;
  legend?: boolean;
  /** Optional inset drawn in the upper-right corner. */
  inset?: { series: Series[]; xLabel: string; yLabel: string };
}

const PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
  "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"];

const fmt = (v: number): string => {
  if (!Number.isFinite(v)) throw new Error(`non-finite coordinate ${v}`);
  return Number(v.toPrecision(8)).toString();
};

interface Scale {
  lo: number;
  hi: number;
  map(v: number): number;
}

function linearScale(values: number[], outLo: number, outHi: number): Scale {
  let lo = Math.min(...values);
  let hi = Math.max(...values);
  if (lo === hi) {
    lo -= 0.5;
    hi += 0.5;
  }
  const pad = 0.03 * (hi - lo);
  lo -= pad;
  hi += pad;
  return {
    lo,
    hi,
    map: (v: number) => outLo + ((v - lo) / (hi - lo)) * (outHi - outLo),
  };
}

function ticks(lo: number, hi: number, n = 5): number[] {
  const span = hi - lo;
  const step = Math.pow(10, Math.floor(Math.log10(span / n)));
  const err = span / n / step;
  const mult = err >= 7.5 ? 10 : err >= 3.5 ? 5 : err >= 1.5 ? 2 : 1;
  const s = mult * step;
  const out: number[] = [];
  for (let v = Math.ceil(lo / s) * s; v <= hi + 1e-12 * span; v += s) {
    out.push(Math.abs(v) < 1e-12 * span ? 0 : v);
  }
  return out;
}

function polyline(s: Series, xs: Scale, ys: Scale, color: string): string {
  const pts = s.x
    .map((xv, i) => `${fmt(xs.map(xv))},${fmt(ys.map(s.y[i]))}`)
    .join(" ");
  const dash = s.dashed ? ' stroke-dasharray="6,4"' : "";
  return `<polyline class="series" fill="none" stroke="${color}" stroke-width="1.5"${dash} points="${pts}"/>`;
}

function axes(
  xs: Scale, ys: Scale, box: { x0: number; y0: number; x1: number; y1: number },
  xLabel: string, yLabel: string, fontSize: number,
): string[] {
  const parts: string[] = [];
  parts.push(
    `<rect x="${fmt(box.x0)}" y="${fmt(box.y1)}" width="${fmt(box.x1 - box.x0)}" height="${fmt(box.y0 - box.y1)}" fill="none" stroke="#000" stroke-width="1"/>`,
  );
  for (const t of ticks(xs.lo, xs.hi)) {
    const px = xs.map(t);
    parts.push(`<line x1="${fmt(px)}" y1="${fmt(box.y0)}" x2="${fmt(px)}" y2="${fmt(box.y0 - 4)}" stroke="#000"/>`);
    parts.push(
      `<text x="${fmt(px)}" y="${fmt(box.y0 + fontSize + 4)}" font-size="${fontSize}" text-anchor="middle">${Number(t.toPrecision(4))}</text>`,
    );
  }
  for (const t of ticks(ys.lo, ys.hi)) {
    const py = ys.map(t);
    parts.push(`<line x1="${fmt(box.x0)}" y1="${fmt(py)}" x2="${fmt(box.x0 + 4)}" y2="${fmt(py)}" stroke="#000"/>`);
    parts.push(
      `<text x="${fmt(box.x0 - 6)}" y="${fmt(py + fontSize / 3)}" font-size="${fontSize}" text-anchor="end">${Number(t.toPrecision(4))}</text>`,
    );
  }
  const xc = (box.x0 + box.x1) / 2;
  const yc = (box.y0 + box.y1) / 2;
  parts.push(
    `<text x="${fmt(xc)}" y="${fmt(box.y0 + 2.6 * fontSize)}" font-size="${fontSize + 1}" text-anchor="middle">${xLabel}</text>`,
  );
  parts.push(
    `<text x="${fmt(box.x0 - 3.2 * fontSize)}" y="${fmt(yc)}" font-size="${fontSize + 1}" text-anchor="middle" transform="rotate(-90 ${fmt(box.x0 - 3.2 * fontSize)} ${fmt(yc)})">${yLabel}</text>`,
  );
  return parts;
}

function panel(
  series: Series[], box: { x0: number; y0: number; x1: number; y1: number },
  xLabel: string, yLabel: string, fontSize: number,
): string[] {
  const allX = series.flatMap((s) => s.x);
  const allY = series.flatMap((s) => s.y);
  const xs = linearScale(allX, box.x0, box.x1);
  const ys = linearScale(allY, box.y0, box.y1); // y axis grows upward
  const parts = axes(xs, ys, box, xLabel, yLabel, fontSize);
  series.forEach((s, i) => {
    parts.push(polyline(s, xs, ys, s.color ?? PALETTE[i % PALETTE.length]));
  });
  return parts;
}

export function renderSvg(spec: PlotSpec): string {
  const width = spec.width ?? 640;
  const height = spec.height ?? 440;
  const box = { x0: 62, y0: height - 50, x1: width - 18, y1: 46 };
  const parts: string[] = [
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" viewBox="0 0 ${width} ${height}">`,
    `<rect width="${width}" height="${height}" fill="#ffffff"/>`,
    `<text x="${fmt(width / 2)}" y="24" font-size="14" text-anchor="middle">${spec.title}</text>`,
  ];
  parts.push(...panel(spec.series, box, spec.xLabel, spec.yLabel, 10));
  if (spec.legend ?? spec.series.length > 1) {
    spec.series.forEach((s, i) => {
      const y = box.y1 + 14 + 14 * i;
      const color = s.color ?? PALETTE[i % PALETTE.length];
      const dash = s.dashed ? ' stroke-dasharray="6,4"' : "";
      parts.push(
        `<line x1="${box.x0 + 8}" y1="${y}" x2="${box.x0 + 34}" y2="${y}" stroke="${color}" stroke-width="1.5"${dash}/>`,
      );
      parts.push(
        `<text x="${box.x0 + 40}" y="${y + 3.5}" font-size="10">${s.label}</text>`,
      );
    });
  }
  if (spec.inset) {
    const ibox = {
      x0: width - 250,
      y0: 190,
      x1: width - 40,
      y1: 60,
    };
    parts.push(
      `<rect x="${ibox.x0 - 36}" y="${ibox.y1 - 12}" width="${ibox.x1 - ibox.x0 + 52}" height="${ibox.y0 - ibox.y1 + 44}" fill="#ffffff" stroke="none"/>`,
    );
    parts.push(...panel(spec.inset.series, ibox, spec.inset.xLabel, spec.inset.yLabel, 8));
  }
  parts.push("</svg>");
  return parts.join("\n") + "\n";
}
