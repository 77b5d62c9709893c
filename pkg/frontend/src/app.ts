// Browser entry: wires the session client to a canvas graph view, a node
// count chart and the steering controls.  All state lives in the pure
// store; this file only renders it and forwards UI events.

import { SessionClient } from "./client.js";
import { layout } from "./layout.js";
import type { Snapshot } from "./protocol.js";
import { applyEvent, edgesOf, emptyView, setConnected, SessionView } from "./store.js";

const KIND_COLORS: Record<string, string> = {
  L: "#2a9d8f", A: "#e76f51", FI: "#e9c46a", FO: "#264653", FOE: "#7b2cbf",
  T: "#6c757d", FRIN: "#90be6d", FROUT: "#577590", Arrow: "#aaaaaa",
  GAMMA: "#2a9d8f", GAMMAI: "#e76f51", DELTA: "#7b2cbf", DELTAI: "#e9c46a",
};

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node as T;
}

export function startApp(): void {
  const url = `ws://${location.hostname}:${Number(location.port) || 8765}`;
  const client = new SessionClient(url, (u) => new WebSocket(u) as never);
  let view: SessionView = emptyView();

  const graphCanvas = el<HTMLCanvasElement>("graph");
  const chartCanvas = el<HTMLCanvasElement>("chart");
  const status = el<HTMLDivElement>("status");
  const histogram = el<HTMLDivElement>("histogram");
  const weightsBox = el<HTMLDivElement>("weights");

  client.onStatus((connected) => {
    view = setConnected(view, connected);
    render();
  });
  client.onEvent((event) => {
    view = applyEvent(view, event);
    render();
  });

  el<HTMLButtonElement>("load").onclick = () => {
    const term = el<HTMLInputElement>("term").value.trim();
    const seed = Number(el<HTMLInputElement>("seed").value) || 0;
    const strategy = el<HTMLSelectElement>("policy").value;
    client.load({ lambda: term, seed, strategy }).catch(showError);
  };
  el<HTMLButtonElement>("run").onclick = () => client.run().catch(showError);
  el<HTMLButtonElement>("pause").onclick = () => client.pause().catch(showError);
  el<HTMLButtonElement>("step").onclick = () => client.step(1).catch(showError);
  el<HTMLButtonElement>("reseed").onclick = () => {
    client.reseed(Number(el<HTMLInputElement>("seed").value) || 0).catch(showError);
  };
  el<HTMLSelectElement>("policy").onchange = () => {
    client.setPolicy(el<HTMLSelectElement>("policy").value).catch(showError);
  };

  function showError(err: unknown): void {
    status.textContent = `error: ${String(err)}`;
  }

  function render(): void {
    const snap = view.snapshot;
    status.className = view.connected ? "ok" : "down";
    status.textContent = view.connected
      ? snap
        ? `cycle ${snap.cycle} · ${snap.state}${snap.normalForm ? " · normal form" : ""}`
        : "connected"
      : "disconnected — retrying";
    if (view.error) status.textContent += ` · ${view.error}`;
    if (!snap) return;
    renderGraph(snap);
    renderChart();
    renderHistogram();
    renderWeights(snap);
  }

  function renderGraph(snap: Snapshot): void {
    const ctx = graphCanvas.getContext("2d")!;
    const { width, height } = graphCanvas;
    ctx.clearRect(0, 0, width, height);
    const points = layout(snap, { width, height, iterations: 120 });
    const at = new Map(points.map((p) => [p.id, p]));
    ctx.strokeStyle = "#bbb";
    for (const edge of edgesOf(snap)) {
      if (edge.from === null || edge.to === null) continue;
      const a = at.get(edge.from)!;
      const b = at.get(edge.to)!;
      ctx.beginPath();
      ctx.moveTo(a.x, a.y);
      ctx.lineTo(b.x, b.y);
      ctx.stroke();
    }
    for (const node of snap.nodes) {
      const p = at.get(node.id)!;
      ctx.fillStyle = KIND_COLORS[node.kind] ?? "#333";
      ctx.beginPath();
      ctx.arc(p.x, p.y, 9, 0, Math.PI * 2);
      ctx.fill();
      ctx.fillStyle = "#fff";
      ctx.font = "8px sans-serif";
      ctx.textAlign = "center";
      ctx.fillText(node.kind, p.x, p.y + 3);
    }
  }

  function renderChart(): void {
    const ctx = chartCanvas.getContext("2d")!;
    const { width, height } = chartCanvas;
    ctx.clearRect(0, 0, width, height);
    const history = view.countHistory;
    if (history.length < 2) return;
    const kinds = new Set<string>();
    for (const h of history) Object.keys(h.counts).forEach((k) => kinds.add(k));
    const maxCount = Math.max(
      1, ...history.map((h) => Math.max(0, ...Object.values(h.counts))),
    );
    const xOf = (i: number) => (i / (history.length - 1)) * (width - 20) + 10;
    const yOf = (v: number) => height - 12 - (v / maxCount) * (height - 24);
    for (const kind of kinds) {
      ctx.strokeStyle = KIND_COLORS[kind] ?? "#333";
      ctx.beginPath();
      history.forEach((h, i) => {
        const y = yOf(h.counts[kind] ?? 0);
        if (i === 0) ctx.moveTo(xOf(i), y);
        else ctx.lineTo(xOf(i), y);
      });
      ctx.stroke();
    }
  }

  function renderHistogram(): void {
    const rows = Object.entries(view.ruleTotals).sort();
    histogram.innerHTML = rows
      .map(([rule, n]) => `<div><span>${rule}</span><b>${n}</b></div>`)
      .join("");
  }

  function renderWeights(snap: Snapshot): void {
    if (weightsBox.dataset.rendered === snap.chemistry) return;
    weightsBox.dataset.rendered = snap.chemistry;
    const rules = ["BETA", "FAN-IN", "L-FO", "L-FOE", "A-FO", "A-FOE", "FI-FO", "FO-FOE"];
    weightsBox.innerHTML = "";
    for (const rule of rules) {
      const label = document.createElement("label");
      label.textContent = rule;
      const slider = document.createElement("input");
      slider.type = "range";
      slider.min = "0";
      slider.max = "4";
      slider.step = "0.1";
      slider.value = String(snap.weights[rule] ?? 1);
      slider.oninput = () => {
        client.setWeights({ [rule]: Number(slider.value) }).catch(showError);
      };
      label.appendChild(slider);
      weightsBox.appendChild(label);
    }
  }

  client.connect().catch(showError);
}

if (typeof document !== "undefined" && document.getElementById("graph")) {
  startApp();
}
