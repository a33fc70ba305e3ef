// Dashboard bootstrap: two panels (digital map left, agent chat right),
// a control strip with Run + nameserver configuration, and corner toasts.

import { GatewayClient, GatewayError } from "./api.js";
import { ChatViewModel } from "./chatview.js";
import { MapViewModel, renderMapSvg } from "./mapview.js";
import { ResumingStream, type FrameSocket } from "./stream.js";
import { ToastQueue } from "./toasts.js";
import type { EventFrame } from "./types.js";

const gateway = new GatewayClient("");
const chat = new ChatViewModel();
const toasts = new ToastQueue();

let map: MapViewModel | null = null;
let stream: ResumingStream | null = null;
let currentRunId: string | null = null;
let plansLoaded = false;

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

function browserSocket(runId: string) {
  return (since: number): FrameSocket => {
    const ws = new WebSocket(gateway.streamUrl(runId, since));
    return {
      onFrame(handler) {
        ws.onmessage = (event) => handler(JSON.parse(event.data) as EventFrame);
      },
      onClose(handler) {
        ws.onclose = () => handler();
      },
      close() {
        ws.close();
      },
    };
  };
}

function renderToasts(): void {
  toasts.trim(6);
  el("toasts").innerHTML = toasts.toasts
    .map(
      (t) =>
        `<div class="toast ${t.kind}" data-id="${t.id}">${t.text}` +
        `<button class="dismiss" data-id="${t.id}">x</button></div>`,
    )
    .join("");
}

function renderMap(): void {
  if (map) el("map-panel").innerHTML = renderMapSvg(map);
}

function renderChat(): void {
  const agents = chat.agents();
  const select = el<HTMLSelectElement>("chat-filter");
  const current = select.value;
  select.innerHTML =
    '<option value="">all agents</option>' +
    agents.map((a) => `<option value="${a}">${a}</option>`).join("");
  select.value = agents.includes(current) ? current : "";
  chat.filterAgent = select.value || null;
  el("chat-log").innerHTML = chat
    .visible()
    .map(
      (entry) =>
        `<div class="chat-entry ${entry.performative}">` +
        `<span class="tick">t${entry.tick}</span> ` +
        `<span class="who">${entry.sender} &rarr; ${entry.recipient}</span> ` +
        `<span class="type">${entry.msgType}</span> ` +
        `<span class="summary">${entry.summary}</span></div>`,
    )
    .join("");
  const log = el("chat-log");
  log.scrollTop = log.scrollHeight;
}

async function refreshPlans(): Promise<void> {
  if (!currentRunId || plansLoaded || !map) return;
  const summary = await gateway.runSummary(currentRunId);
  if (summary.plan_pre && summary.plan_post) {
    map.setPlans(summary.plan_pre, summary.plan_post);
    plansLoaded = true;
    renderMap();
  }
}

function onFrame(frame: EventFrame): void {
  map?.apply(frame);
  chat.apply(frame);
  for (const text of chat.takeMilestones()) {
    toasts.push(text, "info");
  }
  if (frame.kind === "run_completed") {
    const reduction = frame.payload.reduction;
    toasts.push(
      reduction
        ? `run ${frame.payload.status}: ${reduction.pre_total} -> ${reduction.post_total} blocks`
        : `run ${frame.payload.status}`,
      frame.payload.status === "completed" ? "info" : "error",
    );
  }
  if (!plansLoaded) void refreshPlans();
  renderMap();
  renderChat();
  renderToasts();
}

async function startRun(): Promise<void> {
  try {
    const { run_id } = await gateway.startRun({ builtin: "showcase", tick_delay_s: 0.2 });
    currentRunId = run_id;
    plansLoaded = false;
    stream?.stop();
    stream = new ResumingStream(browserSocket(run_id), onFrame);
    stream.start();
    toasts.push(`run ${run_id} started`);
  } catch (err) {
    toasts.push(err instanceof GatewayError ? err.message : String(err), "error");
  }
  renderToasts();
}

async function submitNdsConfig(): Promise<void> {
  const input = el<HTMLInputElement>("nds-address");
  try {
    await gateway.setNdsConfig(input.value);
    const entries = await gateway.getNdsConfig();
    el("nds-current").textContent = `ns-main @ ${entries["ns-main"] ?? "?"}`;
    toasts.push("nameserver address stored");
    el("config-popup").classList.add("hidden");
  } catch (err) {
    toasts.push(err instanceof GatewayError ? err.message : String(err), "error");
  }
  renderToasts();
}

async function boot(): Promise<void> {
  const scenario = await gateway.scenario("showcase");
  map = new MapViewModel(scenario);
  renderMap();
  renderChat();

  el("run-button").addEventListener("click", () => void startRun());
  el("config-button").addEventListener("click", () =>
    el("config-popup").classList.toggle("hidden"),
  );
  el("nds-submit").addEventListener("click", () => void submitNdsConfig());
  el<HTMLSelectElement>("chat-filter").addEventListener("change", renderChat);
  el("toasts").addEventListener("click", (event) => {
    const target = event.target as HTMLElement;
    if (target.classList.contains("dismiss")) {
      toasts.dismiss(Number(target.dataset.id));
      renderToasts();
    }
  });
  for (const layer of ["preRoutes", "postRoutes", "trails"] as const) {
    el(`legend-${layer}`).addEventListener("click", () => {
      map?.toggle(layer);
      el(`legend-${layer}`).classList.toggle("off");
      renderMap();
    });
  }

  // if a run already exists (dashboard reattached), resume watching it
  const runs = await gateway.listRuns();
  const last = runs.at(-1);
  if (last) {
    currentRunId = last.run_id;
    stream = new ResumingStream(browserSocket(last.run_id), onFrame);
    stream.start();
  }
}

void boot();
