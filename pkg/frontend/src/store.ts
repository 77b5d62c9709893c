// Session view state as a pure function of received events.

import type { CycleReport, ServerEvent, Snapshot } from "./protocol.js";

export interface EdgeView {
  name: string;
  from: number | null; // node id holding the out slot, null when dangling
  to: number | null;
  fromSlot: number;
  toSlot: number;
}

export interface SessionView {
  connected: boolean;
  snapshot: Snapshot | null;
  lastReport: CycleReport | null;
  // per-kind node count after each observed cycle, for the counts chart
  countHistory: Array<{ cycle: number; counts: Record<string, number> }>;
  ruleTotals: Record<string, number>;
  error: string | null;
}

export function emptyView(): SessionView {
  return {
    connected: false,
    snapshot: null,
    lastReport: null,
    countHistory: [],
    ruleTotals: {},
    error: null,
  };
}

export function applyEvent(view: SessionView, event: ServerEvent): SessionView {
  switch (event.type) {
    case "snapshot": {
      const snap = event.payload;
      const lastCycle = view.countHistory.length
        ? view.countHistory[view.countHistory.length - 1].cycle
        : -1;
      const fresh =
        view.snapshot === null ||
        view.snapshot.session !== snap.session ||
        snap.cycle < lastCycle;
      return {
        ...view,
        snapshot: snap,
        ruleTotals: { ...snap.histogram },
        countHistory: fresh
          ? [{ cycle: snap.cycle, counts: kindCounts(snap) }]
          : view.countHistory,
        error: null,
      };
    }
    case "cycle-report": {
      const report = event.payload;
      const totals = { ...view.ruleTotals };
      for (const [rule, n] of Object.entries(report.histogram)) {
        totals[rule] = (totals[rule] ?? 0) + n;
      }
      return {
        ...view,
        lastReport: report,
        ruleTotals: totals,
        countHistory: [
          ...view.countHistory,
          { cycle: report.cycle + 1, counts: report.kindCounts },
        ].slice(-500),
      };
    }
    case "error":
      return { ...view, error: event.payload.message };
    case "ack":
      return view;
  }
}

export function setConnected(view: SessionView, connected: boolean): SessionView {
  return { ...view, connected };
}

export function kindCounts(snap: Snapshot): Record<string, number> {
  const counts: Record<string, number> = {};
  for (const node of snap.nodes) {
    counts[node.kind] = (counts[node.kind] ?? 0) + 1;
  }
  return counts;
}

// Edges reconstructed from the snapshot's mol rows: a name appearing twice
// joins those two slots, a name appearing once dangles.
export function edgesOf(snap: Snapshot): EdgeView[] {
  const ends = new Map<string, Array<{ id: number; slot: number }>>();
  for (const node of snap.nodes) {
    node.edges.forEach((name, slot) => {
      const list = ends.get(name) ?? [];
      list.push({ id: node.id, slot });
      ends.set(name, list);
    });
  }
  const out: EdgeView[] = [];
  for (const [name, list] of ends) {
    if (list.length === 2) {
      out.push({
        name,
        from: list[0].id,
        to: list[1].id,
        fromSlot: list[0].slot,
        toSlot: list[1].slot,
      });
    } else {
      out.push({ name, from: list[0].id, to: null, fromSlot: list[0].slot, toSlot: -1 });
    }
  }
  return out.sort((a, b) => (a.name < b.name ? -1 : 1));
}
