// Message schema for the molrew session protocol (see docs/protocol.md).

export interface MolNode {
  id: number;
  kind: string;
  edges: string[];
}

export interface Snapshot {
  session: string;
  cycle: number;
  state: "running" | "paused";
  chemistry: string;
  strategy: string;
  seed: number;
  weights: Record<string, number>;
  histogram: Record<string, number>;
  nodes: MolNode[];
  normalForm: boolean;
}

export interface AppliedMatch {
  rule: string;
  nodes: [number, number];
  edge: string;
}

export interface CycleReport {
  session: string;
  cycle: number;
  found: number;
  applied: AppliedMatch[];
  histogram: Record<string, number>;
  kindCounts: Record<string, number>;
}

export type ServerEvent =
  | { type: "ack"; id?: string; payload: { session: string; cycle: number } }
  | { type: "snapshot"; id?: string; payload: Snapshot }
  | { type: "cycle-report"; payload: CycleReport }
  | { type: "error"; id?: string; payload: { message: string } };

export type CommandType =
  | "load"
  | "run"
  | "pause"
  | "step"
  | "set-weights"
  | "set-policy"
  | "reseed"
  | "snapshot"
  | "close-session";

export interface Command {
  type: CommandType;
  payload?: Record<string, unknown>;
  id?: string;
}

export function parseServerEvent(raw: string): ServerEvent | null {
  try {
    const msg = JSON.parse(raw);
    if (msg && typeof msg.type === "string") return msg as ServerEvent;
  } catch {
    // fall through
  }
  return null;
}
