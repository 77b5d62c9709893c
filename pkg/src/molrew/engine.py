"""The rewrite engine: one cycle = match all, resolve conflicts, apply the
survivors, then eliminate Arrow nodes (the COMB pass).

Everything is deterministic given (molecule, chemistry, config): matches are
enumerated in canonical order (sorted by the shared edge name), the random
strategy draws from a seeded splitmix64 stream, and fresh edge names come
from a per-trace counter.  Replaying a config on the initial molecule
reproduces the trace byte for byte.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .chemistry import Chemistry, RewriteRule
from .graph import (
    OUT,
    Boundary,
    Molecule,
    MolError,
    Node,
    iso_check,
    serialize_mol,
)
from .rng import SplitMix64

STRATEGIES = ("deterministic-greedy", "weighted-random")


class EngineError(MolError):
    """Internal engine invariant broken (stale match, lost boundary...)."""


@dataclass(frozen=True)
class Match:
    rule: str
    out_node: int  # node id holding the shared edge's out slot
    in_node: int   # node id holding its in slot
    edge: str

    def nodes(self) -> tuple[int, int]:
        return (self.out_node, self.in_node)

    def show(self) -> str:
        return f"{self.rule}@{self.out_node}+{self.in_node}"


@dataclass(frozen=True)
class ReductionConfig:
    strategy: str = "deterministic-greedy"
    seed: int = 0
    max_cycles: int = 100
    weights: dict[str, float] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.strategy not in STRATEGIES:
            raise ValueError(f"unknown strategy {self.strategy!r}")
        if self.max_cycles < 1:
            raise ValueError("max_cycles must be >= 1")
        for name, w in self.weights.items():
            if w < 0:
                raise ValueError(f"weight for {name} must be >= 0")

    def weight_of(self, rule: RewriteRule) -> float:
        return self.weights.get(rule.name, rule.weight)


@dataclass(frozen=True)
class CycleReport:
    index: int
    found: int
    applied: tuple[Match, ...]
    histogram: dict[str, int]
    kind_counts: dict[str, int]

    def line(self) -> str:
        applied = ",".join(m.show() for m in self.applied) or "-"
        kinds = ",".join(f"{k}={v}" for k, v in sorted(self.kind_counts.items()))
        return (
            f"cycle {self.index} found {self.found} applied {len(self.applied)} "
            f"{applied} kinds {kinds or '-'}"
        )


@dataclass(frozen=True)
class Trace:
    chemistry: str
    config: ReductionConfig
    initial: Molecule
    cycles: tuple[CycleReport, ...]
    final: Molecule
    terminal: str  # normal-form | max-cycles | quine-detected
    annotations: tuple[tuple[int, str], ...] = ()

    def render(self) -> str:
        lines = [
            "molrew-trace v1",
            f"chemistry: {self.chemistry}",
            f"strategy: {self.config.strategy}",
            f"seed: {self.config.seed}",
            f"max-cycles: {self.config.max_cycles}",
            "weights: "
            + (
                ",".join(f"{k}={v:g}" for k, v in sorted(self.config.weights.items()))
                or "-"
            ),
        ]
        lines.append("initial:")
        lines.extend("| " + row for row in serialize_mol(self.initial).splitlines())
        notes = dict()
        for cyc, text in self.annotations:
            notes.setdefault(cyc, []).append(text)
        lines.append("cycles:")
        for rep in self.cycles:
            for text in notes.get(rep.index, ()):
                lines.append(f"note {rep.index} {text}")
            lines.append(rep.line())
        lines.append(f"terminal: {self.terminal}")
        return "\n".join(lines) + "\n"


# --- matching ---------------------------------------------------------------

def find_matches(m: Molecule, chem: Chemistry) -> list[Match]:
    """Every internal edge whose endpoint (kind, slot) pairs form a rule lhs,
    sorted by edge name."""
    matches = []
    for name in m.internal_edges():
        ends = m.edge_ends(name)
        (i0, s0, d0), (i1, s1, d1) = ends
        if d0 == OUT:
            out_i, out_s, in_i, in_s = i0, s0, i1, s1
        else:
            out_i, out_s, in_i, in_s = i1, s1, i0, s0
        key = (m.nodes[out_i].kind, out_s, m.nodes[in_i].kind, in_s)
        rule = chem.rules_by_lhs.get(key)
        if rule is not None:
            matches.append(Match(rule.name, m.nodes[out_i].nid, m.nodes[in_i].nid, name))
    return matches


def conflicting_pairs(matches: list[Match]) -> list[tuple[Match, Match]]:
    """Pairs of matches sharing at least one node."""
    pairs = []
    for i, a in enumerate(matches):
        for b in matches[i + 1:]:
            if set(a.nodes()) & set(b.nodes()):
                pairs.append((a, b))
    return pairs


def resolve_conflicts(
    matches: list[Match], cfg: ReductionConfig, rng: SplitMix64, chem: Chemistry
) -> list[Match]:
    """Maximal node-disjoint subset of the matches.

    deterministic-greedy scans in canonical order; weighted-random first
    orders the matches by seeded weighted sampling without replacement
    (weight = the match's rule weight) and drops zero-weight matches.
    """
    if cfg.strategy == "weighted-random":
        weights = [cfg.weight_of(chem.rule(m.rule)) for m in matches]
        order = rng.weighted_order(weights)
        candidates = [matches[i] for i in order if weights[i] > 0.0]
    else:
        candidates = matches
    used: set[int] = set()
    chosen = []
    for m in candidates:
        a, b = m.nodes()
        if a in used or b in used:
            continue
        used.add(a)
        used.add(b)
        chosen.append(m)
    return chosen


# --- application ------------------------------------------------------------

class FreshNames:
    """Per-trace fresh edge-name source; skips names already in use."""

    def __init__(self, taken: set[str] | None = None):
        self.counter = 0
        self.taken = set(taken or ())

    def reserve(self, names) -> None:
        self.taken.update(names)

    def next(self) -> str:
        # zero-padded so lexicographic edge-name order equals generation order
        while True:
            name = f"x{self.counter:06d}"
            self.counter += 1
            if name not in self.taken:
                self.taken.add(name)
                return name


def apply_matches(
    m: Molecule,
    chosen: list[Match],
    chem: Chemistry,
    fresh: FreshNames | None = None,
) -> Molecule:
    """Replace each matched pair by its rule's rhs template.  The chosen
    matches must be pairwise node-disjoint and still present in m."""
    if fresh is None:
        fresh = FreshNames(m.edge_names())
    else:
        fresh.reserve(m.edge_names())
    by_id: dict[int, Node] = {n.nid: n for n in m.nodes}
    removed: set[int] = set()
    new_rows: list[tuple[str, tuple[str, ...]]] = []
    for match in chosen:
        rule = chem.rule(match.rule)
        try:
            node_a = by_id[match.out_node]
            node_b = by_id[match.in_node]
        except KeyError:
            raise EngineError(f"stale match {match.show()}: node gone") from None
        if match.out_node in removed or match.in_node in removed:
            raise EngineError(f"stale match {match.show()}: node consumed twice")
        if (
            node_a.kind != rule.out_end.kind
            or node_b.kind != rule.in_end.kind
            or node_a.edges[rule.out_end.slot] != match.edge
            or node_b.edges[rule.in_end.slot] != match.edge
        ):
            raise EngineError(f"stale match {match.show()}: pattern moved")
        removed.add(match.out_node)
        removed.add(match.in_node)
        fresh_map: dict[int, str] = {}
        for rnode in rule.rhs:
            edges = []
            for tag, idx in rnode.ports:
                if tag == "a":
                    edges.append(node_a.edges[idx])
                elif tag == "b":
                    edges.append(node_b.edges[idx])
                else:
                    if idx not in fresh_map:
                        fresh_map[idx] = fresh.next()
                    edges.append(fresh_map[idx])
            new_rows.append((rnode.kind, tuple(edges)))

    next_id = max(by_id, default=-1) + 1
    kept = tuple(n for n in m.nodes if n.nid not in removed)
    added = tuple(
        Node(next_id + i, kind, edges) for i, (kind, edges) in enumerate(new_rows)
    )
    return Molecule(m.kinds, kept + added)


def comb_pass(m: Molecule) -> Molecule:
    """Fuse every Arrow with whatever its ends attach to, until only
    irreducible Arrows remain: self-loops `Arrow x x` and fully dangling
    wires.  Each fusion removes one Arrow, so this terminates."""
    nodes: list[Node | None] = list(m.nodes)

    def occurrences() -> dict[str, list[tuple[int, int, str]]]:
        occ: dict[str, list[tuple[int, int, str]]] = {}
        for i, node in enumerate(nodes):
            if node is None:
                continue
            sig = m.kinds[node.kind].signature
            for slot_i, name in enumerate(node.edges):
                occ.setdefault(name, []).append((i, slot_i, sig[slot_i].direction))
        return occ

    changed = True
    while changed:
        changed = False
        occ = occurrences()
        for i, node in enumerate(nodes):
            if node is None or node.kind != "Arrow":
                continue
            a, b = node.edges
            if a == b:
                continue  # closed loop, preserved
            a_ends = [e for e in occ[a] if e[0] != i]
            b_ends = [e for e in occ[b] if e[0] != i]
            if not a_ends and not b_ends:
                continue  # bare dangling wire, preserved
            # Unify edges a and b, keeping a boundary name if there is one.
            if not b_ends:
                keep, drop = b, a  # b dangles: its name survives on a's producer
            else:
                keep, drop = a, b
            nodes[i] = None
            for j, node_j in enumerate(nodes):
                if node_j is None or drop not in node_j.edges:
                    continue
                nodes[j] = Node(
                    node_j.nid,
                    node_j.kind,
                    tuple(keep if e == drop else e for e in node_j.edges),
                )
            changed = True
            break
    return Molecule(m.kinds, tuple(n for n in nodes if n is not None))


# --- cycles and traces --------------------------------------------------------

def _boundary_signature(b: Boundary) -> tuple:
    return (tuple(sorted(b.free_in)), tuple(sorted(b.free_out)))


def cycle(
    m: Molecule,
    chem: Chemistry,
    cfg: ReductionConfig,
    rng: SplitMix64,
    index: int = 0,
    fresh: FreshNames | None = None,
) -> tuple[Molecule, CycleReport]:
    before = _boundary_signature(m.boundary())
    found = find_matches(m, chem)
    chosen = resolve_conflicts(found, cfg, rng, chem)
    used: set[int] = set()
    for match in chosen:
        if used & set(match.nodes()):
            raise EngineError("conflict resolution returned overlapping matches")
        used.update(match.nodes())
    out = comb_pass(apply_matches(m, chosen, chem, fresh))
    if _boundary_signature(out.boundary()) != before:
        raise EngineError(f"cycle {index} changed the free boundary")
    histogram: dict[str, int] = {}
    for match in chosen:
        histogram[match.rule] = histogram.get(match.rule, 0) + 1
    report = CycleReport(index, len(found), tuple(chosen), histogram, out.kind_counts())
    return out, report


def reduce(m: Molecule, chem: Chemistry, cfg: ReductionConfig) -> Trace:
    """Iterate cycles until normal form or the cycle budget runs out."""
    rng = SplitMix64(cfg.seed)
    fresh = FreshNames(m.edge_names())
    state = m
    reports: list[CycleReport] = []
    terminal = "max-cycles"
    for i in range(cfg.max_cycles):
        if not find_matches(state, chem):
            terminal = "normal-form"
            break
        state, report = cycle(state, chem, cfg, rng, i, fresh)
        reports.append(report)
    else:
        if not find_matches(state, chem):
            terminal = "normal-form"
    return Trace(chem.name, cfg, m, tuple(reports), state, terminal)


@dataclass(frozen=True)
class QuineOutcome:
    detected: bool
    period: int = 0
    trace: Trace | None = None

    def __bool__(self) -> bool:
        return self.detected


def quine_check(
    m: Molecule, chem: Chemistry, cfg: ReductionConfig, horizon: int
) -> QuineOutcome:
    """Does the molecule recur, up to isomorphism, within `horizon` cycles
    with at least one rewrite applied in every cycle?  Requires the
    deterministic-greedy strategy so the answer is well defined."""
    if cfg.strategy != "deterministic-greedy":
        raise ValueError("quine_check requires the deterministic-greedy strategy")
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    rng = SplitMix64(cfg.seed)
    fresh = FreshNames(m.edge_names())
    state = m
    reports: list[CycleReport] = []
    for p in range(1, horizon + 1):
        state, report = cycle(state, chem, cfg, rng, p - 1, fresh)
        reports.append(report)
        if not report.applied:
            return QuineOutcome(False)  # reached a normal form: not a quine
        if len(state) == len(m) and iso_check(state, m):
            trace = Trace(
                chem.name, cfg, m, tuple(reports), state, "quine-detected"
            )
            return QuineOutcome(True, p, trace)
    return QuineOutcome(False)


# --- statistics ---------------------------------------------------------------

def stats(trace: Trace) -> tuple[list[str], list[list], dict[str, int]]:
    """Per-cycle table (header, rows) of kind counts and applied-rule counts,
    plus the rule-usage totals over the whole trace."""
    kind_names = sorted(trace.initial.kinds)
    rule_names = sorted({m.rule for rep in trace.cycles for m in rep.applied})
    header = ["cycle"] + kind_names + rule_names
    rows: list[list] = []
    totals: dict[str, int] = {name: 0 for name in rule_names}
    for rep in trace.cycles:
        row: list = [rep.index]
        row += [rep.kind_counts.get(k, 0) for k in kind_names]
        for rule in rule_names:
            n = rep.histogram.get(rule, 0)
            totals[rule] += n
            row.append(n)
        rows.append(row)
    return header, rows, totals


def stats_csv(trace: Trace) -> str:
    header, rows, _ = stats(trace)
    lines = [",".join(header)]
    lines += [",".join(str(v) for v in row) for row in rows]
    return "\n".join(lines) + "\n"


def replay_check(trace: Trace, chem: Chemistry) -> bool:
    """Re-run the trace's config on its initial molecule; byte-identical?"""
    again = reduce(trace.initial, chem, trace.config)
    return again.render() == trace.render()
