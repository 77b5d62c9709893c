// Force-directed layout as a pure, deterministic function: spring forces
// along edges, pairwise repulsion, mild centering.  Seeded initial
// positions so re-layout of the same snapshot is stable.

import type { Snapshot } from "./protocol.js";
import { edgesOf } from "./store.js";

export interface Point {
  id: number;
  x: number;
  y: number;
}

function mulberry(seed: number): () => number {
  let state = seed >>> 0;
  return () => {
    state = (state + 0x6d2b79f5) >>> 0;
    let t = state;
    t = Math.imul(t ^ (t >>> 15), t | 1);
    t ^= t + Math.imul(t ^ (t >>> 7), t | 61);
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

export interface LayoutOptions {
  width?: number;
  height?: number;
  iterations?: number;
  springLength?: number;
}

export function layout(snap: Snapshot, options: LayoutOptions = {}): Point[] {
  const width = options.width ?? 800;
  const height = options.height ?? 600;
  const iterations = options.iterations ?? 150;
  const springLength = options.springLength ?? 60;

  const rand = mulberry(snap.nodes.length * 7919 + 1);
  const points: Point[] = snap.nodes.map((n) => ({
    id: n.id,
    x: (rand() - 0.5) * width * 0.8 + width / 2,
    y: (rand() - 0.5) * height * 0.8 + height / 2,
  }));
  const index = new Map(points.map((p, i) => [p.id, i]));
  const springs: Array<[number, number]> = [];
  for (const edge of edgesOf(snap)) {
    if (edge.from !== null && edge.to !== null && edge.from !== edge.to) {
      springs.push([index.get(edge.from)!, index.get(edge.to)!]);
    }
  }

  const repulsion = springLength * springLength;
  for (let step = 0; step < iterations; step++) {
    const cooling = 1 - step / iterations;
    const fx = new Array(points.length).fill(0);
    const fy = new Array(points.length).fill(0);
    for (let i = 0; i < points.length; i++) {
      for (let j = i + 1; j < points.length; j++) {
        let dx = points[i].x - points[j].x;
        let dy = points[i].y - points[j].y;
        let d2 = dx * dx + dy * dy;
        if (d2 < 1e-4) {
          dx = 0.01 * (i - j);
          dy = 0.01;
          d2 = dx * dx + dy * dy;
        }
        const f = repulsion / d2;
        fx[i] += dx * f;
        fy[i] += dy * f;
        fx[j] -= dx * f;
        fy[j] -= dy * f;
      }
    }
    for (const [i, j] of springs) {
      const dx = points[j].x - points[i].x;
      const dy = points[j].y - points[i].y;
      const d = Math.sqrt(dx * dx + dy * dy) || 0.01;
      const f = (d - springLength) / d * 0.2;
      fx[i] += dx * f;
      fy[i] += dy * f;
      fx[j] -= dx * f;
      fy[j] -= dy * f;
    }
    for (let i = 0; i < points.length; i++) {
      fx[i] += (width / 2 - points[i].x) * 0.01;
      fy[i] += (height / 2 - points[i].y) * 0.01;
      const cap = 30 * cooling + 1;
      points[i].x += Math.max(-cap, Math.min(cap, fx[i] * 0.05));
      points[i].y += Math.max(-cap, Math.min(cap, fy[i] * 0.05));
    }
  }
  for (const p of points) {
    p.x = Math.max(10, Math.min(width - 10, p.x));
    p.y = Math.max(10, Math.min(height - 10, p.y));
  }
  return points;
}
