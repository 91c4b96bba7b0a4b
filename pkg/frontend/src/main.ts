// Console wiring: one session feeding one view state, batched re-renders.

import { GatewaySession, SubmissionError } from "./session.js";
import { AgentInfo, GuardrailInfo } from "./types.js";
import {
  renderDrawChart,
  renderPowerChart,
  renderStatus,
  renderThroughputChart,
  renderTimeline,
  renderViolations,
} from "./panels.js";
import { applyEvent, initialState } from "./view-state.js";

const state = initialState();
let guardrails: GuardrailInfo | null = null;
let dirty = false;

const el = (id: string) => document.getElementById(id) as HTMLElement;
const canvas = (id: string) => document.getElementById(id) as HTMLCanvasElement;

const session = new GatewaySession({
  baseUrl: window.location.origin,
  onEvent: (event) => {
    applyEvent(state, event);
    dirty = true;
  },
  onStatus: (status) => {
    state.connection = status;
    dirty = true;
    if (status === "connected") void loadAgents();
  },
});

async function loadAgents(): Promise<void> {
  const agents = (await session.fetchAgents()) as AgentInfo[];
  const pc = agents.find((a) => a.role === "pc");
  guardrails = pc?.guardrails ?? null;
  dirty = true;
}

function renderAll(): void {
  renderStatus(el("status"), state);
  renderTimeline(el("timeline"), state);
  renderViolations(el("violations"), state);
  renderThroughputChart(canvas("chart-throughput"), state);
  renderPowerChart(canvas("chart-power"), state, guardrails);
  renderDrawChart(canvas("chart-draw"), state);
}

function tick(): void {
  if (dirty) {
    dirty = false;
    renderAll();
  }
  requestAnimationFrame(tick);
}

function wireIntentForm(): void {
  const form = el("intent-form") as HTMLFormElement;
  const input = el("intent-text") as HTMLTextAreaElement;
  const feedback = el("intent-feedback");
  const submit = el("intent-submit") as HTMLButtonElement;

  input.addEventListener("input", () => {
    submit.disabled = input.value.trim().length === 0;
  });
  submit.disabled = true;

  form.addEventListener("submit", (ev) => {
    ev.preventDefault();
    feedback.textContent = "";
    session
      .submitIntent({ body_text: input.value })
      .then((intentId) => {
        feedback.textContent = `accepted as ${intentId}`;
        feedback.className = "ok";
        input.value = "";
        submit.disabled = true;
      })
      .catch((err: unknown) => {
        feedback.textContent =
          err instanceof SubmissionError ? err.message : `submission failed: ${err}`;
        feedback.className = "err";
      });
  });

  document.querySelectorAll<HTMLButtonElement>("[data-intent]").forEach((btn) => {
    btn.addEventListener("click", () => {
      input.value = btn.dataset.intent ?? "";
      submit.disabled = input.value.trim().length === 0;
    });
  });
}

wireIntentForm();
session.connect();
requestAnimationFrame(tick);
