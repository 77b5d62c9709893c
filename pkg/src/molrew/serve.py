"""Interactive session server for live reductions.

One websocket connection drives one or more named sessions.  Messages are
JSON objects; the client sends commands {type, payload, id} and receives
events {type, payload, id?}.  Steering commands take effect at cycle
boundaries only, and every steering command is recorded in the session
trace annotations so the trace stays replayable alongside the log of what
was changed when.

Commands: load, run, pause, step, set-weights, set-policy, reseed,
snapshot, close-session.  Events: ack, snapshot, cycle-report, error.
See docs/protocol.md for the full schema.
"""

from __future__ import annotations

import asyncio
import json

from .chemistry import BUILTIN_CHEMISTRIES, builtin_chemistry
from .cli import _resolve_library
from .engine import CycleReport, FreshNames, ReductionConfig, Trace, cycle, find_matches
from .graph import Molecule, close_boundary, parse_mol
from .lam import parse_lambda, to_molecule
from .rng import SplitMix64


class Session:
    def __init__(self, sid: str):
        self.sid = sid
        self.chem = builtin_chemistry("chemlambda-v2")
        self.config = ReductionConfig(max_cycles=1)
        self.initial_config = self.config
        self.state: Molecule | None = None
        self.initial: Molecule | None = None
        self.cycle_index = 0
        self.running = False
        self.rng = SplitMix64(0)
        self.fresh: FreshNames | None = None
        self.histogram: dict[str, int] = {}
        self.reports: list[CycleReport] = []
        self.annotations: list[tuple[int, str]] = []

    def load(self, payload: dict) -> None:
        chem_name = payload.get("chemistry", "chemlambda-v2")
        if chem_name not in BUILTIN_CHEMISTRIES:
            raise ValueError(f"unknown chemistry {chem_name!r}")
        self.chem = builtin_chemistry(chem_name)
        if "lambda" in payload:
            term = _resolve_library(parse_lambda(payload["lambda"]))
            mol = to_molecule(term, self.chem)
        elif "mol" in payload:
            mol = parse_mol(payload["mol"], self.chem.kinds)
        else:
            raise ValueError("load needs a 'lambda' or 'mol' payload")
        self.state = close_boundary(mol)
        self.initial = self.state
        self.config = ReductionConfig(
            strategy=payload.get("strategy", "deterministic-greedy"),
            seed=int(payload.get("seed", 0)),
            max_cycles=1,
            weights={k: float(v) for k, v in payload.get("weights", {}).items()},
        )
        self.initial_config = self.config
        self.cycle_index = 0
        self.running = False
        self.rng = SplitMix64(self.config.seed)
        self.fresh = FreshNames(self.state.edge_names())
        self.histogram = {}
        self.reports = []
        self.annotations = []

    def reseed(self, seed: int) -> None:
        self.config = ReductionConfig(
            strategy=self.config.strategy,
            seed=seed,
            max_cycles=1,
            weights=self.config.weights,
        )
        self.rng = SplitMix64(seed)
        self.annotations.append((self.cycle_index, f"reseed {seed}"))

    def set_weights(self, weights: dict) -> None:
        merged = dict(self.config.weights)
        for k, v in weights.items():
            merged[k] = float(v)  # ReductionConfig rejects negatives
        self.config = ReductionConfig(
            strategy=self.config.strategy,
            seed=self.config.seed,
            max_cycles=1,
            weights=merged,
        )
        spec = ",".join(f"{k}={v:g}" for k, v in sorted(weights.items()))
        self.annotations.append((self.cycle_index, f"set-weights {spec}"))

    def set_policy(self, strategy: str) -> None:
        self.config = ReductionConfig(
            strategy=strategy,
            seed=self.config.seed,
            max_cycles=1,
            weights=self.config.weights,
        )
        self.annotations.append((self.cycle_index, f"set-policy {strategy}"))

    def at_normal_form(self) -> bool:
        return self.state is not None and not find_matches(self.state, self.chem)

    def step(self) -> CycleReport:
        if self.state is None:
            raise ValueError("no molecule loaded")
        self.state, report = cycle(
            self.state, self.chem, self.config, self.rng, self.cycle_index, self.fresh
        )
        self.cycle_index += 1
        self.reports.append(report)
        for name, count in report.histogram.items():
            self.histogram[name] = self.histogram.get(name, 0) + count
        return report

    def trace_text(self) -> str:
        """The session history as a trace file, steering annotations
        included.  For an unsteered deterministic session this equals the
        engine's own trace of the same config over the same cycle span."""
        if self.initial is None:
            raise ValueError("no molecule loaded")
        from dataclasses import replace

        config = replace(self.initial_config, max_cycles=max(self.cycle_index, 1))
        terminal = "normal-form" if self.at_normal_form() else "max-cycles"
        trace = Trace(
            self.chem.name,
            config,
            self.initial,
            tuple(self.reports),
            self.state,
            terminal,
            tuple(self.annotations),
        )
        return trace.render()

    def snapshot(self) -> dict:
        mol = self.state
        return {
            "session": self.sid,
            "cycle": self.cycle_index,
            "state": "running" if self.running else "paused",
            "chemistry": self.chem.name,
            "strategy": self.config.strategy,
            "seed": self.config.seed,
            "weights": dict(sorted(self.config.weights.items())),
            "histogram": dict(sorted(self.histogram.items())),
            "nodes": [
                {"id": n.nid, "kind": n.kind, "edges": list(n.edges)}
                for n in (mol.nodes if mol else ())
            ],
            "normalForm": self.at_normal_form() if mol else False,
        }


def _report_payload(sid: str, report: CycleReport) -> dict:
    return {
        "session": sid,
        "cycle": report.index,
        "found": report.found,
        "applied": [
            {"rule": m.rule, "nodes": [m.out_node, m.in_node], "edge": m.edge}
            for m in report.applied
        ],
        "histogram": dict(sorted(report.histogram.items())),
        "kindCounts": dict(sorted(report.kind_counts.items())),
    }


class SessionHub:
    """Sessions plus the run loop that advances running sessions and
    broadcasts events; commands are applied between cycles only."""

    RUN_DELAY = 0.02

    def __init__(self):
        self.sessions: dict[str, Session] = {}
        self.watchers: dict[str, set] = {}

    def session(self, sid: str) -> Session:
        if sid not in self.sessions:
            self.sessions[sid] = Session(sid)
            self.watchers.setdefault(sid, set())
        return self.sessions[sid]

    async def broadcast(self, sid: str, message: dict) -> None:
        dead = []
        for ws in self.watchers.get(sid, ()):
            try:
                await ws.send(json.dumps(message))
            except Exception:
                dead.append(ws)
        for ws in dead:
            self.watchers[sid].discard(ws)

    async def run_loop(self) -> None:
        while True:
            advanced = False
            for sid, sess in list(self.sessions.items()):
                if not sess.running or sess.state is None:
                    continue
                if sess.at_normal_form():
                    sess.running = False
                    await self.broadcast(sid, {"type": "snapshot", "payload": sess.snapshot()})
                    continue
                report = sess.step()
                advanced = True
                await self.broadcast(
                    sid, {"type": "cycle-report", "payload": _report_payload(sid, report)}
                )
                if sess.at_normal_form():
                    sess.running = False
                    await self.broadcast(sid, {"type": "snapshot", "payload": sess.snapshot()})
            await asyncio.sleep(self.RUN_DELAY if advanced else 0.05)


async def handle_connection(ws, hub: SessionHub) -> None:
    joined: set[str] = set()
    try:
        async for raw in ws:
            try:
                msg = json.loads(raw)
            except json.JSONDecodeError:
                await ws.send(json.dumps({"type": "error", "payload": {"message": "bad json"}}))
                continue
            mid = msg.get("id")
            mtype = msg.get("type")
            payload = msg.get("payload") or {}
            sid = payload.get("session", "default")
            sess = hub.session(sid)
            hub.watchers[sid].add(ws)
            joined.add(sid)
            try:
                reply: dict = {"type": "ack", "id": mid,
                               "payload": {"session": sid, "cycle": sess.cycle_index}}
                if mtype == "load":
                    sess.load(payload)
                    reply["payload"]["cycle"] = sess.cycle_index
                    await ws.send(json.dumps(reply))
                    await hub.broadcast(sid, {"type": "snapshot", "payload": sess.snapshot()})
                elif mtype == "run":
                    sess.running = True
                    await ws.send(json.dumps(reply))
                elif mtype == "pause":
                    sess.running = False
                    await ws.send(json.dumps(reply))
                    await hub.broadcast(sid, {"type": "snapshot", "payload": sess.snapshot()})
                elif mtype == "step":
                    count = int(payload.get("count", 1))
                    reports = []
                    for _ in range(count):
                        if sess.at_normal_form():
                            break
                        reports.append(sess.step())
                    reply["payload"]["cycle"] = sess.cycle_index
                    await ws.send(json.dumps(reply))
                    for rep in reports:
                        await hub.broadcast(
                            sid, {"type": "cycle-report", "payload": _report_payload(sid, rep)}
                        )
                    await hub.broadcast(sid, {"type": "snapshot", "payload": sess.snapshot()})
                elif mtype == "set-weights":
                    sess.set_weights(payload.get("weights", {}))
                    await ws.send(json.dumps(reply))
                elif mtype == "set-policy":
                    sess.set_policy(payload.get("strategy", "deterministic-greedy"))
                    await ws.send(json.dumps(reply))
                elif mtype == "reseed":
                    sess.reseed(int(payload.get("seed", 0)))
                    await ws.send(json.dumps(reply))
                elif mtype == "snapshot":
                    await ws.send(json.dumps(
                        {"type": "snapshot", "id": mid, "payload": sess.snapshot()}
                    ))
                elif mtype == "trace":
                    reply["type"] = "trace"
                    reply["payload"] = {"session": sid, "text": sess.trace_text()}
                    await ws.send(json.dumps(reply))
                elif mtype == "close-session":
                    sess.running = False
                    hub.sessions.pop(sid, None)
                    await ws.send(json.dumps(reply))
                else:
                    await ws.send(json.dumps(
                        {"type": "error", "id": mid,
                         "payload": {"message": f"unknown command {mtype!r}"}}
                    ))
            except Exception as exc:
                await ws.send(json.dumps(
                    {"type": "error", "id": mid, "payload": {"message": str(exc)}}
                ))
    finally:
        for sid in joined:
            hub.watchers.get(sid, set()).discard(ws)


async def serve_async(host: str, port: int, ready: asyncio.Event | None = None):
    import websockets

    hub = SessionHub()
    loop_task = asyncio.create_task(hub.run_loop())
    async with websockets.serve(lambda ws: handle_connection(ws, hub), host, port):
        # announce only once the socket is bound and accepting
        print(f"molrew session server on ws://{host}:{port}", flush=True)
        if ready is not None:
            ready.set()
        try:
            await asyncio.Future()
        finally:
            loop_task.cancel()


def run_server(host: str = "127.0.0.1", port: int = 8765) -> None:
    asyncio.run(serve_async(host, port))
