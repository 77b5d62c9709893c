// Websocket session client: command sending with acks, event dispatch,
// and reconnect with snapshot recovery.

import type { Command, ServerEvent } from "./protocol.js";
import { parseServerEvent } from "./protocol.js";

// Minimal surface shared by the browser WebSocket and the `ws` package.
export interface SocketLike {
  send(data: string): void;
  close(): void;
  addEventListener(
    type: "open" | "close" | "message" | "error",
    fn: (ev: any) => void,
  ): void;
}

export type SocketFactory = (url: string) => SocketLike;

export interface ClientOptions {
  session?: string;
  reconnectDelayMs?: number;
  maxReconnects?: number;
}

interface Pending {
  resolve: (event: ServerEvent) => void;
  reject: (err: Error) => void;
}

export class SessionClient {
  private socket: SocketLike | null = null;
  private nextId = 1;
  private pending = new Map<string, Pending>();
  private listeners = new Set<(event: ServerEvent) => void>();
  private statusListeners = new Set<(connected: boolean) => void>();
  private closed = false;
  private reconnects = 0;
  readonly session: string;

  constructor(
    private url: string,
    private factory: SocketFactory,
    private options: ClientOptions = {},
  ) {
    this.session = options.session ?? "default";
  }

  onEvent(fn: (event: ServerEvent) => void): () => void {
    this.listeners.add(fn);
    return () => this.listeners.delete(fn);
  }

  onStatus(fn: (connected: boolean) => void): () => void {
    this.statusListeners.add(fn);
    return () => this.statusListeners.delete(fn);
  }

  connect(): Promise<void> {
    return new Promise((resolve, reject) => {
      const socket = this.factory(this.url);
      this.socket = socket;
      let opened = false;
      socket.addEventListener("error", () => {
        // swallow; the close handler owns failure and reconnect
      });
      socket.addEventListener("open", () => {
        opened = true;
        this.reconnects = 0;
        for (const fn of this.statusListeners) fn(true);
        // resume from the latest boundary state
        this.fire({ type: "snapshot" });
        resolve();
      });
      socket.addEventListener("message", (ev: any) => {
        const event = parseServerEvent(String(ev.data));
        if (!event) return;
        const id = "id" in event ? event.id : undefined;
        if (id && this.pending.has(id)) {
          const waiter = this.pending.get(id)!;
          this.pending.delete(id);
          waiter.resolve(event);
        }
        for (const fn of this.listeners) fn(event);
      });
      socket.addEventListener("close", () => {
        for (const fn of this.statusListeners) fn(false);
        for (const waiter of this.pending.values()) {
          waiter.reject(new Error("connection closed"));
        }
        this.pending.clear();
        if (!opened) reject(new Error("connect failed"));
        this.maybeReconnect();
      });
    });
  }

  private maybeReconnect(): void {
    if (this.closed) return;
    const max = this.options.maxReconnects ?? 20;
    if (this.reconnects >= max) return;
    this.reconnects += 1;
    const delay = this.options.reconnectDelayMs ?? 500;
    setTimeout(() => {
      if (!this.closed) this.connect().catch(() => undefined);
    }, delay);
  }

  close(): void {
    this.closed = true;
    this.socket?.close();
  }

  private fire(command: Command): void {
    const payload = { session: this.session, ...(command.payload ?? {}) };
    this.socket?.send(JSON.stringify({ ...command, payload }));
  }

  /** Send a command and resolve with its ack (or direct reply). */
  request(type: Command["type"], payload?: Record<string, unknown>): Promise<ServerEvent> {
    const id = `r${this.nextId++}`;
    return new Promise((resolve, reject) => {
      this.pending.set(id, { resolve, reject });
      this.fire({ type, payload, id });
    });
  }

  load(spec: Record<string, unknown>): Promise<ServerEvent> {
    return this.request("load", spec);
  }

  run(): Promise<ServerEvent> {
    return this.request("run");
  }

  pause(): Promise<ServerEvent> {
    return this.request("pause");
  }

  step(count = 1): Promise<ServerEvent> {
    return this.request("step", { count });
  }

  setWeights(weights: Record<string, number>): Promise<ServerEvent> {
    return this.request("set-weights", { weights });
  }

  setPolicy(strategy: string): Promise<ServerEvent> {
    return this.request("set-policy", { strategy });
  }

  reseed(seed: number): Promise<ServerEvent> {
    return this.request("reseed", { seed });
  }

  snapshot(): Promise<ServerEvent> {
    return this.request("snapshot");
  }
}
