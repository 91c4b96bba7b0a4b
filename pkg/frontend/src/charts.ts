// Minimal canvas line charts: no dependencies, redraw-from-scratch per frame.

import { Point } from "./view-state.js";

export interface Series {
  label: string;
  color: string;
  points: Point[];
  dashed?: boolean;
}

export interface ChartOptions {
  yLabel: string;
  yScale?: (v: number) => number; // applied before ranging (e.g. /1e6)
  hLines?: { value: number; color: string; label?: string }[];
}

export function drawChart(canvas: HTMLCanvasElement, series: Series[], opts: ChartOptions): void {
  const ctx = canvas.getContext("2d");
  if (!ctx) return;
  const { width, height } = canvas;
  const pad = { left: 46, right: 8, top: 8, bottom: 18 };
  ctx.clearRect(0, 0, width, height);

  const scale = opts.yScale ?? ((v) => v);
  const all = series.flatMap((s) => s.points);
  if (all.length === 0) {
    ctx.fillStyle = "#667";
    ctx.font = "12px sans-serif";
    ctx.fillText("waiting for data…", pad.left, height / 2);
    return;
  }
  const tMin = Math.min(...all.map((p) => p.t));
  const tMax = Math.max(...all.map((p) => p.t));
  const values = all.map((p) => scale(p.v)).concat((opts.hLines ?? []).map((h) => h.value));
  let vMin = Math.min(...values);
  let vMax = Math.max(...values);
  if (vMax - vMin < 1e-9) {
    vMax += 1;
    vMin -= 1;
  }
  const vPad = (vMax - vMin) * 0.08;
  vMin -= vPad;
  vMax += vPad;

  const x = (t: number) =>
    pad.left + ((t - tMin) / Math.max(tMax - tMin, 1e-9)) * (width - pad.left - pad.right);
  const y = (v: number) =>
    height - pad.bottom - ((v - vMin) / (vMax - vMin)) * (height - pad.top - pad.bottom);

  ctx.strokeStyle = "#333a44";
  ctx.lineWidth = 1;
  ctx.beginPath();
  ctx.moveTo(pad.left, pad.top);
  ctx.lineTo(pad.left, height - pad.bottom);
  ctx.lineTo(width - pad.right, height - pad.bottom);
  ctx.stroke();

  ctx.fillStyle = "#99a";
  ctx.font = "10px sans-serif";
  for (let i = 0; i <= 4; i++) {
    const v = vMin + ((vMax - vMin) * i) / 4;
    ctx.fillText(v.toFixed(1), 4, y(v) + 3);
  }
  ctx.fillText(`${opts.yLabel}  (t: ${tMin.toFixed(0)}–${tMax.toFixed(0)} s)`, pad.left + 4, height - 6);

  for (const h of opts.hLines ?? []) {
    ctx.strokeStyle = h.color;
    ctx.setLineDash([2, 4]);
    ctx.beginPath();
    ctx.moveTo(pad.left, y(h.value));
    ctx.lineTo(width - pad.right, y(h.value));
    ctx.stroke();
    ctx.setLineDash([]);
  }

  for (const s of series) {
    if (s.points.length === 0) continue;
    ctx.strokeStyle = s.color;
    ctx.lineWidth = 1.4;
    ctx.setLineDash(s.dashed ? [5, 3] : []);
    ctx.beginPath();
    s.points.forEach((p, i) => {
      const px = x(p.t);
      const py = y(scale(p.v));
      if (i === 0) ctx.moveTo(px, py);
      else ctx.lineTo(px, py);
    });
    ctx.stroke();
    ctx.setLineDash([]);
  }

  let lx = pad.left + 8;
  ctx.font = "11px sans-serif";
  for (const s of series) {
    ctx.fillStyle = s.color;
    ctx.fillText(s.label, lx, pad.top + 10);
    lx += ctx.measureText(s.label).width + 14;
  }
}
