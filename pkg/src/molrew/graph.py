"""Open port graphs ("molecules") and the mol text notation.

A molecule is a list of typed nodes.  Each node kind has a fixed, ordered
signature of port slots; a slot has a role (left / middle / right) and a
direction (in / out).  Edges are plain name tokens: a name used twice joins
the out slot where it appears to the in slot where it appears, a name used
once is a dangling half-edge on the molecule's free boundary.

Everything here is immutable and chemistry-agnostic: the node-kind table is
passed in, so the same machinery serves every chemistry.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Sequence

IN = "in"
OUT = "out"
ROLES = ("left", "middle", "right")


class MolError(Exception):
    """Base error for molecule handling."""


class MolParseError(MolError):
    """Raised by parse_mol; carries one message per offending line."""

    def __init__(self, problems: list[str]):
        self.problems = problems
        super().__init__("; ".join(problems))


class IsoSizeError(MolError):
    """Molecule too large for exact isomorphism checking."""


@dataclass(frozen=True)
class PortSlot:
    role: str
    direction: str

    def __post_init__(self) -> None:
        if self.role not in ROLES:
            raise ValueError(f"bad port role {self.role!r}")
        if self.direction not in (IN, OUT):
            raise ValueError(f"bad port direction {self.direction!r}")

    def __str__(self) -> str:
        return f"{self.role}/{self.direction}"


@dataclass(frozen=True)
class NodeKind:
    """A node type: name plus ordered port signature (mol-line port order)."""

    name: str
    signature: tuple[PortSlot, ...]

    def __post_init__(self) -> None:
        if not 1 <= len(self.signature) <= 3:
            raise ValueError(f"kind {self.name}: arity must be 1..3")

    @property
    def arity(self) -> int:
        return len(self.signature)

    def slot_index(self, role: str, direction: str | None = None) -> int:
        """Index of the slot with the given role (and direction, if needed
        to disambiguate kinds like Arrow that reuse a role)."""
        hits = [
            i
            for i, s in enumerate(self.signature)
            if s.role == role and (direction is None or s.direction == direction)
        ]
        if len(hits) != 1:
            raise KeyError(f"kind {self.name}: slot {role}/{direction} not unique")
        return hits[0]


@dataclass(frozen=True)
class Node:
    nid: int
    kind: str
    edges: tuple[str, ...]


@dataclass(frozen=True)
class Boundary:
    """Free half-edges of a molecule, partitioned by the slot direction of
    the attached end.  A name under free_in dangles at its missing out end
    (the molecule consumes it); free_out dangles at its missing in end."""

    free_in: tuple[str, ...]
    free_out: tuple[str, ...]

    def profile(self) -> tuple[int, int]:
        return (len(self.free_in), len(self.free_out))


@dataclass(frozen=True)
class Molecule:
    """An immutable open port graph over a node-kind table."""

    kinds: Mapping[str, NodeKind]
    nodes: tuple[Node, ...]
    _occ: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "_occ", _occurrences(self))

    def __len__(self) -> int:
        return len(self.nodes)

    def __iter__(self) -> Iterator[Node]:
        return iter(self.nodes)

    def kind_of(self, node: Node) -> NodeKind:
        return self.kinds[node.kind]

    def kind_counts(self) -> dict[str, int]:
        counts: dict[str, int] = {}
        for n in self.nodes:
            counts[n.kind] = counts.get(n.kind, 0) + 1
        return counts

    def boundary(self) -> Boundary:
        free_in: list[str] = []
        free_out: list[str] = []
        for name, ends in self._occ.items():
            if len(ends) == 1:
                (_, _, direction), = ends
                (free_in if direction == IN else free_out).append(name)
        return Boundary(tuple(sorted(free_in)), tuple(sorted(free_out)))

    def edge_ends(self, name: str) -> list[tuple[int, int, str]]:
        """Occurrences of an edge name as (node index, slot index, direction)."""
        return list(self._occ.get(name, ()))

    def internal_edges(self) -> list[str]:
        return sorted(n for n, ends in self._occ.items() if len(ends) == 2)

    def edge_names(self) -> set[str]:
        return set(self._occ)

    def with_nodes(self, nodes: Iterable[tuple[str, Sequence[str]]]) -> Molecule:
        """New molecule with extra (kind, edges) nodes appended."""
        extra = []
        nid = (max((n.nid for n in self.nodes), default=-1)) + 1
        for kind, edges in nodes:
            extra.append(Node(nid, kind, tuple(edges)))
            nid += 1
        return Molecule(self.kinds, self.nodes + tuple(extra))


def molecule(kinds: Mapping[str, NodeKind],
             rows: Iterable[tuple[str, Sequence[str]]]) -> Molecule:
    """Build a molecule from (kind name, edge names) rows; ids follow row order."""
    nodes = tuple(Node(i, kind, tuple(edges)) for i, (kind, edges) in enumerate(rows))
    return Molecule(kinds, nodes)


def _occurrences(m: Molecule) -> dict[str, tuple[tuple[int, int, str], ...]]:
    occ: dict[str, list[tuple[int, int, str]]] = {}
    for idx, node in enumerate(m.nodes):
        kind = m.kinds.get(node.kind)
        sig = kind.signature if kind is not None else ()
        for slot_i, name in enumerate(node.edges):
            direction = sig[slot_i].direction if slot_i < len(sig) else "?"
            occ.setdefault(name, []).append((idx, slot_i, direction))
    return {k: tuple(v) for k, v in occ.items()}


# --- mol text format ------------------------------------------------------
#
# One node per line: KIND token followed by one edge-name token per port
# slot, in the kind's signature order.  Tokens are separated by runs of
# spaces/tabs; `#` starts a comment running to end of line; blank lines are
# skipped.  Edge names are arbitrary nonempty tokens without whitespace or #.

def parse_mol(text: str, kinds: Mapping[str, NodeKind]) -> Molecule:
    rows: list[tuple[str, tuple[str, ...]]] = []
    problems: list[str] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        kind_name, edges = tokens[0], tuple(tokens[1:])
        kind = kinds.get(kind_name)
        if kind is None:
            problems.append(f"line {lineno}: unknown node kind {kind_name!r}")
            continue
        if len(edges) != kind.arity:
            problems.append(
                f"line {lineno}: kind {kind_name} takes {kind.arity} edge "
                f"names, got {len(edges)}"
            )
            continue
        rows.append((kind_name, edges))
    if problems:
        raise MolParseError(problems)

    m = molecule(kinds, rows)
    edge_problems = _edge_violations(m, with_lines=True)
    if edge_problems:
        raise MolParseError(edge_problems)
    return m


def serialize_mol(m: Molecule) -> str:
    """Inverse of parse_mol up to node-id renumbering; edge names are kept."""
    lines = [" ".join((node.kind,) + node.edges) for node in m.nodes]
    return "\n".join(lines) + ("\n" if lines else "")


# --- validation -----------------------------------------------------------

def _edge_violations(m: Molecule, with_lines: bool = False) -> list[str]:
    problems = []
    for name, ends in sorted(m._occ.items()):
        where = ""
        if with_lines:
            where = " (lines " + ", ".join(str(e[0] + 1) for e in ends) + ")"
        if len(ends) > 2:
            problems.append(f"edge {name!r} used {len(ends)} times{where}")
        elif len(ends) == 2:
            dirs = sorted(e[2] for e in ends)
            if dirs != [IN, OUT]:
                side = "in" if dirs == [IN, IN] else "out"
                problems.append(
                    f"edge {name!r} occurs in two {side} slots, "
                    f"no {'out' if side == 'in' else 'in'} slot{where}"
                )
    return problems


def validate(m: Molecule) -> list[str]:
    """All well-formedness violations; empty list iff the molecule is valid.

    Never raises: the violations are the result.  Covers unknown kinds and
    arity mismatches (for molecules built directly in code) plus the edge
    rules that parse_mol enforces.
    """
    problems = []
    for node in m.nodes:
        kind = m.kinds.get(node.kind)
        if kind is None:
            problems.append(f"node {node.nid}: unknown kind {node.kind!r}")
        elif len(node.edges) != kind.arity:
            problems.append(
                f"node {node.nid}: kind {node.kind} takes {kind.arity} edge "
                f"names, got {len(node.edges)}"
            )
    ids = [n.nid for n in m.nodes]
    if len(set(ids)) != len(ids):
        problems.append("duplicate node ids")
    problems.extend(_edge_violations(m))
    return problems


def is_valid(m: Molecule) -> bool:
    return not validate(m)


# --- boundary closing -----------------------------------------------------

def close_boundary(m: Molecule, frin: str = "FRIN", frout: str = "FROUT") -> Molecule:
    """Cap every free half-edge: FRIN feeds dangling in slots, FROUT consumes
    dangling out slots.  Idempotent; the result has an empty boundary."""
    b = m.boundary()
    caps = [(frin, (name,)) for name in b.free_in]
    caps += [(frout, (name,)) for name in b.free_out]
    if not caps:
        return m
    return m.with_nodes(caps)


# --- exact isomorphism ----------------------------------------------------
#
# Canonical labeling by iterated neighbourhood refinement with backtracking
# on ties.  Exact by construction: two molecules are isomorphic iff their
# canonical certificates are equal.  Intended for desk-scale molecules; the
# size cap turns oversized inputs into an explicit error, never a wrong
# answer.

ISO_SIZE_CAP = 1024


def _neighbour_map(m: Molecule) -> list[list[tuple[int, int, int] | None]]:
    """For each node, per slot: (other node idx, other slot idx, 1) or None
    for a dangling slot.  Self-loops point back at the same node."""
    nbrs: list[list[tuple[int, int, int] | None]] = [
        [None] * len(n.edges) for n in m.nodes
    ]
    for ends in m._occ.values():
        if len(ends) == 2:
            (i0, s0, _), (i1, s1, _) = ends
            nbrs[i0][s0] = (i1, s1, 1)
            nbrs[i1][s1] = (i0, s0, 1)
    return nbrs


def _refine(colors: list[int], nbrs, kinds_key: list) -> list[int]:
    n = len(colors)
    while True:
        sigs = []
        for i in range(n):
            slot_sig = tuple(
                (colors[t[0]], t[1]) if t is not None else (-1, -1) for t in nbrs[i]
            )
            sigs.append((colors[i], kinds_key[i], slot_sig))
        order = sorted(range(n), key=lambda i: sigs[i])
        new = [0] * n
        c = 0
        for j, i in enumerate(order):
            if j and sigs[order[j - 1]] != sigs[i]:
                c += 1
            new[i] = c
        if new == colors:
            return colors
        colors = new


def _certificate_for(order: list[int], m: Molecule, fixed_boundary: bool) -> tuple:
    """Certificate of the molecule with nodes relabeled along `order`:
    kinds plus edge numbers by first appearance.  Dangling slots are encoded
    by direction (or, with fixed_boundary, by their actual name, for
    pattern comparisons where the context pins the free half-edges)."""
    edge_ids: dict[str, int] = {}
    rows = []
    for old in order:
        node = m.nodes[old]
        sig = m.kinds[node.kind].signature
        row = []
        for slot_i, name in enumerate(node.edges):
            ends = m._occ[name]
            if len(ends) == 1:
                tag = name if fixed_boundary else sig[slot_i].direction
                row.append(("free", tag))
            else:
                if name not in edge_ids:
                    edge_ids[name] = len(edge_ids)
                row.append(("e", edge_ids[name]))
        rows.append((node.kind, tuple(row)))
    return tuple(rows)


def canonical_certificate(m: Molecule, fixed_boundary: bool = False) -> tuple:
    """Canonical form invariant under node reordering and edge renaming."""
    if len(m.nodes) > ISO_SIZE_CAP:
        raise IsoSizeError(f"molecule has {len(m.nodes)} nodes, cap is {ISO_SIZE_CAP}")
    n = len(m.nodes)
    if n == 0:
        return ()
    nbrs = _neighbour_map(m)
    kinds_key = [m.nodes[i].kind for i in range(n)]

    base = {k: c for c, k in enumerate(sorted(set(kinds_key)))}
    init = [base[k] for k in kinds_key]

    best: list[tuple] = []

    def search(colors: list[int]) -> None:
        colors = _refine(colors, nbrs, kinds_key)
        cells: dict[int, list[int]] = {}
        for i, c in enumerate(colors):
            cells.setdefault(c, []).append(i)
        target = None
        for c in sorted(cells):
            if len(cells[c]) > 1:
                target = cells[c]
                break
        if target is None:
            order = sorted(range(n), key=lambda i: colors[i])
            cert = _certificate_for(order, m, fixed_boundary)
            if not best or cert < best[0]:
                best[:] = [cert]
            return
        bump = max(colors) + 1
        for i in target:
            child = list(colors)
            child[i] = bump
            search(child)

    search(init)
    return best[0]


def iso_check(a: Molecule, b: Molecule) -> bool:
    """True iff there is a kind- and slot-preserving bijection of nodes and
    edge names.  Raises IsoSizeError above the size cap."""
    if len(a.nodes) != len(b.nodes):
        return False
    if a.kind_counts() != b.kind_counts():
        return False
    if a.boundary().profile() != b.boundary().profile():
        return False
    return canonical_certificate(a) == canonical_certificate(b)


def pattern_equal(a: Molecule, b: Molecule) -> bool:
    """Isomorphism with the free half-edge names held fixed: the comparison
    for rewrite patterns, whose boundary is pinned by the shared context."""
    if len(a.nodes) != len(b.nodes) or a.kind_counts() != b.kind_counts():
        return False
    if a.boundary() != b.boundary():
        return False
    return canonical_certificate(a, fixed_boundary=True) == canonical_certificate(
        b, fixed_boundary=True
    )


def connected_components(m: Molecule) -> list[Molecule]:
    """Split into connected components (dangling edges stay with their node)."""
    n = len(m.nodes)
    parent = list(range(n))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for ends in m._occ.values():
        if len(ends) == 2:
            a, b = find(ends[0][0]), find(ends[1][0])
            if a != b:
                parent[a] = b
    groups: dict[int, list[Node]] = {}
    for i, node in enumerate(m.nodes):
        groups.setdefault(find(i), []).append(node)
    return [
        molecule(m.kinds, [(nd.kind, nd.edges) for nd in grp])
        for _, grp in sorted(groups.items())
    ]
