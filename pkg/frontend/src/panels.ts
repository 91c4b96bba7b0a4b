// DOM rendering for the four panels. Thin by design: all decisions about
// what to show live in the view-state reducer.

import { drawChart, Series } from "./charts.js";
import { GuardrailInfo } from "./types.js";
import { openViolations, TimelineEntry, ViewState } from "./view-state.js";

const SLICE_COLORS = ["#4fc3f7", "#ffb74d", "#aed581", "#ba68c8"];
const UE_COLORS = ["#81d4fa", "#ffcc80", "#c5e1a5", "#f48fb1", "#b39ddb"];

function color(palette: string[], key: number): string {
  return palette[key % palette.length];
}

export function renderStatus(el: HTMLElement, state: ViewState): void {
  el.dataset.status = state.connection;
  el.textContent =
    state.connection === "connected"
      ? `connected · seq ${state.lastSeq}` +
        (state.dropped ? ` · ${state.dropped} malformed skipped` : "")
      : state.connection;
}

function timelineHtml(entry: TimelineEntry): HTMLElement {
  const item = document.createElement("div");
  item.className = `entry ${entry.kind}`;
  const head = document.createElement("div");
  head.className = "head";
  const route =
    entry.kind === "message"
      ? `${entry.source} → ${entry.target} · ${entry.messageKind}`
      : `${entry.source} · decision`;
  head.textContent = `[${entry.timestamp.toFixed(0)}s] ${route}`;
  item.appendChild(head);
  const body = document.createElement("div");
  body.className = "body";
  body.textContent = entry.text; // textContent: NL bodies rendered verbatim
  item.appendChild(body);
  if (entry.actions && entry.actions.length > 0) {
    const actions = document.createElement("div");
    actions.className = "actions";
    actions.textContent = entry.actions.join(" | ");
    item.appendChild(actions);
  }
  return item;
}

export function renderTimeline(el: HTMLElement, state: ViewState): void {
  const stickToBottom =
    el.scrollHeight - el.scrollTop - el.clientHeight < 40 || el.childElementCount === 0;
  el.replaceChildren(...state.timeline.slice(-200).map(timelineHtml));
  if (stickToBottom) el.scrollTop = el.scrollHeight;
}

export function renderViolations(el: HTMLElement, state: ViewState): void {
  const open = openViolations(state);
  el.classList.toggle("active", open.length > 0);
  if (open.length === 0) {
    el.textContent = "no open violations";
    return;
  }
  el.replaceChildren(
    ...open.map((v) => {
      const line = document.createElement("div");
      line.textContent =
        `VIOLATION slice ${v.sliceId}: ${(v.observedBps / 1e6).toFixed(1)} ` +
        `< required ${(v.requiredBps / 1e6).toFixed(1)} Mbit/s (since ${v.startS.toFixed(0)}s)`;
      return line;
    }),
  );
}

export function renderThroughputChart(canvas: HTMLCanvasElement, state: ViewState): void {
  const series: Series[] = [];
  for (const [sid, points] of [...state.sliceThroughput.entries()].sort((a, b) => a[0] - b[0])) {
    series.push({ label: `slice ${sid}`, color: color(SLICE_COLORS, sid), points });
  }
  for (const [sid, points] of [...state.sliceThrottle.entries()].sort((a, b) => a[0] - b[0])) {
    series.push({
      label: `throttle ${sid}`,
      color: color(SLICE_COLORS, sid),
      points,
      dashed: true,
    });
  }
  drawChart(canvas, series, { yLabel: "Mbit/s", yScale: (v) => v / 1e6 });
}

export function renderPowerChart(
  canvas: HTMLCanvasElement,
  state: ViewState,
  guardrails: GuardrailInfo | null,
): void {
  const series: Series[] = [];
  for (const [uid, points] of [...state.ueTxPower.entries()].sort((a, b) => a[0] - b[0])) {
    series.push({ label: `ue ${uid} tx dBm`, color: color(UE_COLORS, uid), points });
  }
  for (const [uid, points] of [...state.ueSnrTarget.entries()].sort((a, b) => a[0] - b[0])) {
    series.push({
      label: `ue ${uid} target dB`,
      color: color(UE_COLORS, uid),
      points,
      dashed: true,
    });
  }
  const hLines = guardrails
    ? [
        { value: guardrails.snr_target_bounds_db[0], color: "#e57373" },
        { value: guardrails.snr_target_bounds_db[1], color: "#e57373" },
      ]
    : [];
  drawChart(canvas, series, { yLabel: "dBm / dB", hLines });
}

export function renderDrawChart(canvas: HTMLCanvasElement, state: ViewState): void {
  const series: Series[] = [];
  for (const [uid, points] of [...state.uePowerDraw.entries()].sort((a, b) => a[0] - b[0])) {
    series.push({ label: `ue ${uid} draw mW`, color: color(UE_COLORS, uid), points });
  }
  drawChart(canvas, series, { yLabel: "mW" });
}
