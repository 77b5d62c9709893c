"""Exhaustive search for small quines.

Enumerates closed molecules up to a node budget, runs each under the
deterministic-greedy strategy, and reports the ones that return to a graph
isomorphic to their start with at least one rewrite applied per cycle.

Search space: connected closed wirings over the rewriting node kinds (the
3-valent kinds plus T by default).  Arrow is excluded because a molecule
containing an Arrow is COMB-equivalent to a smaller one; FRIN and FROUT
are excluded because their only reactions strictly shrink the molecule, so
they can only decorate a smaller quine.  Disconnected wirings are skipped:
components evolve independently and a component with no matches stays dead
forever, so a disconnected quine is exactly a smaller quine together with
inert decoration, and every smaller size is searched first.  Within that
space the enumeration is exhaustive up to isomorphism: identical-kind
nodes are interchangeable and the generator emits one representative per
relabeling orbit (first-touch order), with a canonical-certificate set
catching stragglers.

Candidate testing is double-checked: the search's own orbit runner (a
self-contained re-implementation of the cycle semantics, bounded by a
horizon and a growth cap) is the brute-force oracle, and every hit it
reports must then pass the engine's quine_check at the same period before
it is returned.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations_with_replacement
from multiprocessing import Pool

from .chemistry import Chemistry, builtin_chemistry
from .engine import ReductionConfig, quine_check
from .graph import OUT, Molecule, canonical_certificate, molecule

DEFAULT_SEARCH_KINDS = ("L", "A", "FI", "FO", "FOE", "T")
DEFAULT_HORIZON = 8
DEFAULT_GROWTH_SLACK = 6


@dataclass(frozen=True)
class QuineHit:
    mol: Molecule
    period: int


# --- fast orbit runner ---------------------------------------------------------
#
# A compact re-run of the cycle semantics, kept in exact step with the
# engine's deterministic-greedy behaviour so that the two routes must agree
# on every candidate.  Edges are ints: initial edges 0..E-1 stand for the
# engine's e0..e{E-1} (single digit at this scale, so lexicographic and
# numeric order coincide) and fresh edges count up from FRESH_BASE in
# generation order, mirroring the engine's zero-padded fresh names which
# also sort in generation order and after every initial name.

FRESH_BASE = 1 << 20


class _FastChem:
    def __init__(self, chem: Chemistry):
        self.dirs = {k: tuple(s.direction for s in kind.signature)
                     for k, kind in chem.kinds.items()}
        self.rules = {}
        for key, rule in chem.rules_by_lhs.items():
            rhs = tuple((n.kind, tuple(n.ports)) for n in rule.rhs)
            self.rules[key] = rhs


def _fast_cycle(rows, fast: _FastChem, counter: list[int], matched=None,
                combed=False):
    """One engine cycle on [(kind, int edges)] rows; closed molecules only.
    Returns (rows, applied).  `matched` short-circuits the match scan when
    the caller already knows the cycle's matches in canonical edge order;
    `combed` promises the input carries no fusible Arrow, so only freshly
    produced Arrows can need the comb."""
    if matched is None:
        occ: dict[int, list[tuple[int, int]]] = {}
        setdefault = occ.setdefault
        for i, (kind, edges) in enumerate(rows):
            for s, name in enumerate(edges):
                setdefault(name, []).append((i, s))

        dirs = fast.dirs
        rules_get = fast.rules.get
        matched = []
        for name, ends in occ.items():
            if len(ends) != 2:
                continue
            (i0, s0), (i1, s1) = ends
            k0 = rows[i0][0]
            if dirs[k0][s0] == OUT:
                key = (k0, s0, rows[i1][0], s1)
                oi, ii = i0, i1
            else:
                key = (rows[i1][0], s1, k0, s0)
                oi, ii = i1, i0
            rhs = rules_get(key)
            if rhs is not None:
                matched.append((name, oi, ii, rhs))
        matched.sort(key=lambda m: m[0])

    used: set[int] = set()
    chosen = []
    for m in matched:
        if m[1] in used or m[2] in used:
            continue
        used.add(m[1])
        used.add(m[2])
        chosen.append(m)
    if not chosen and combed:
        return rows, 0  # quiet cycle, nothing to rebuild or comb

    removed = set()
    new_rows = []
    for _, oi, ii, rhs in chosen:
        removed.add(oi)
        removed.add(ii)
        edges_a, edges_b = rows[oi][1], rows[ii][1]
        fresh: dict[int, int] = {}
        for kind, ports in rhs:
            out_edges = []
            for tag, idx in ports:
                if tag == "a":
                    out_edges.append(edges_a[idx])
                elif tag == "b":
                    out_edges.append(edges_b[idx])
                else:
                    name = fresh.get(idx)
                    if name is None:
                        name = FRESH_BASE + counter[0]
                        counter[0] += 1
                        fresh[idx] = name
                    out_edges.append(name)
            new_rows.append((kind, tuple(out_edges)))
    rows = [r for i, r in enumerate(rows) if i not in removed] + new_rows
    sweep = new_rows if combed else rows
    if not any(k == "Arrow" for k, _ in sweep):
        return rows, len(chosen)

    # Arrow fusion, first fusible arrow in node order, restart after each
    changed = True
    while changed:
        changed = False
        for i, (kind, edges) in enumerate(rows):
            if kind != "Arrow" or edges[0] == edges[1]:
                continue
            a, b = edges
            holders = [
                j for j, (_, e) in enumerate(rows) if j != i and (a in e or b in e)
            ]
            if not holders:
                continue
            b_held = any(b in rows[j][1] for j in holders)
            keep, drop = (a, b) if b_held else (b, a)
            del rows[i]
            for j, (k2, e2) in enumerate(rows):
                if drop in e2:
                    rows[j] = (k2, tuple(keep if x == drop else x for x in e2))
            changed = True
            break
    return rows, len(chosen)


def _orbit_period(rows, fast, chem, horizon, growth_cap, first_matches=None):
    size0 = len(rows)
    start_cert = None
    counter = [0]
    state = rows  # never mutated by _fast_cycle; rebuilt per cycle
    for p in range(1, horizon + 1):
        state, applied = _fast_cycle(
            state, fast, counter, first_matches if p == 1 else None, combed=True
        )
        if not applied:
            return 0
        if len(state) > growth_cap:
            return 0
        if len(state) == size0:
            if start_cert is None:
                start_cert = canonical_certificate(molecule(chem.kinds, rows))
            if canonical_certificate(molecule(chem.kinds, state)) == start_cert:
                return p
    return 0


# --- enumeration -----------------------------------------------------------------

def _wirings(kind_names: tuple[str, ...], chem: Chemistry):
    """All closed wirings of the node multiset, one per relabeling orbit of
    identical-kind nodes: assignment vectors pairing the out-end list with
    in-ends."""
    sigs = [chem.kinds[k].signature for k in kind_names]
    out_ends = [
        (i, s) for i, sig in enumerate(sigs) for s, slot in enumerate(sig)
        if slot.direction == OUT
    ]
    in_ends = [
        (i, s) for i, sig in enumerate(sigs) for s, slot in enumerate(sig)
        if slot.direction != OUT
    ]
    if len(out_ends) != len(in_ends) or not out_ends:
        return
    n = len(kind_names)
    assignment: list[tuple[int, int] | None] = [None] * len(out_ends)
    used = [False] * len(in_ends)
    touched = [False] * n

    def rec(step: int):
        if step == len(out_ends):
            yield tuple(assignment)
            return
        oi, _ = out_ends[step]
        was_touched = touched[oi]
        touched[oi] = True
        seen_untouched: set[tuple[str, int]] = set()
        for j, (ii, islot) in enumerate(in_ends):
            if used[j]:
                continue
            if not touched[ii]:
                key = (kind_names[ii], islot)
                if key in seen_untouched:
                    continue  # symmetric to an untouched node already tried
                seen_untouched.add(key)
            used[j] = True
            was = touched[ii]
            touched[ii] = True
            assignment[step] = (ii, islot)
            yield from rec(step + 1)
            assignment[step] = None
            touched[ii] = was
            used[j] = False
        touched[oi] = was_touched

    yield from rec(0)


def _rows_from_assignment(kind_names, out_ends, assignment, arities):
    edges = [[-1] * arities[i] for i in range(len(kind_names))]
    for e, ((oi, oslot), (ii, islot)) in enumerate(zip(out_ends, assignment)):
        edges[oi][oslot] = e
        edges[ii][islot] = e
    return [(k, tuple(e)) for k, e in zip(kind_names, edges)]


_worker_state: dict = {}


def _worker_init(chem_name: str, horizon: int, growth_slack: int):
    chem = builtin_chemistry(chem_name)
    _worker_state["chem"] = chem
    _worker_state["fast"] = _FastChem(chem)
    _worker_state["horizon"] = horizon
    _worker_state["slack"] = growth_slack


def _search_multiset(kind_names: tuple[str, ...]):
    chem: Chemistry = _worker_state["chem"]
    fast: _FastChem = _worker_state["fast"]
    horizon: int = _worker_state["horizon"]
    slack: int = _worker_state["slack"]
    sigs = [chem.kinds[k].signature for k in kind_names]
    out_ends = [
        (i, s) for i, sig in enumerate(sigs) for s, slot in enumerate(sig)
        if slot.direction == OUT
    ]
    arities = [len(sig) for sig in sigs]
    rules_get = fast.rules.get
    n = len(kind_names)
    hits = []
    for assignment in _wirings(kind_names, chem):
        # cycle-1 matches fall out of the screen, in canonical edge order
        matched = []
        parent = list(range(n))
        for e, ((oi, oslot), (ii, islot)) in enumerate(zip(out_ends, assignment)):
            rhs = rules_get((kind_names[oi], oslot, kind_names[ii], islot))
            if rhs is not None:
                matched.append((e, oi, ii, rhs))
            a, b = oi, ii
            while parent[a] != a:
                a = parent[a]
            while parent[b] != b:
                b = parent[b]
            if a != b:
                parent[a] = b
        if not matched:
            continue  # no rewrite can ever start: not a quine
        # skip disconnected wirings: a disconnected quine decomposes into a
        # smaller quine plus dead normal-form decoration, and every smaller
        # size is searched first
        roots = 0
        for i in range(n):
            if parent[i] == i:
                roots += 1
                if roots > 1:
                    break
        if roots > 1:
            continue
        rows = _rows_from_assignment(kind_names, out_ends, assignment, arities)
        period = _orbit_period(
            rows, fast, chem, horizon, len(rows) + slack, first_matches=matched
        )
        if period:
            hits.append((rows, period))
    return hits


def search_quines(
    chem: Chemistry,
    max_nodes: int = 6,
    horizon: int = DEFAULT_HORIZON,
    kinds: tuple[str, ...] = DEFAULT_SEARCH_KINDS,
    growth_slack: int = DEFAULT_GROWTH_SLACK,
    workers: int | None = None,
) -> list[QuineHit]:
    from .chemistry import BUILTIN_CHEMISTRIES

    if chem.name not in BUILTIN_CHEMISTRIES:
        raise ValueError("search_quines runs over a bundled chemistry")
    units = [
        ms
        for n in range(1, max_nodes + 1)
        for ms in combinations_with_replacement(kinds, n)
    ]
    init_args = (chem.name, horizon, growth_slack)
    if workers == 1:
        _worker_init(*init_args)
        raw = [_search_multiset(ms) for ms in units]
    else:
        with Pool(workers, initializer=_worker_init, initargs=init_args) as pool:
            # big multisets cluster at the end; spread them for balance
            raw = pool.map(_search_multiset, units[::-1], chunksize=1)

    hits: list[QuineHit] = []
    seen = set()
    for batch in raw:
        for rows, period in batch:
            named = [
                (kind, tuple(f"e{e:04d}" for e in edges)) for kind, edges in rows
            ]
            m = molecule(chem.kinds, named)
            cert = canonical_certificate(m)
            if cert in seen:
                continue
            seen.add(cert)
            confirmed = quine_check(
                m, chem, ReductionConfig(max_cycles=horizon + 1), horizon
            )
            if not confirmed.detected or confirmed.period != period:
                raise AssertionError(
                    f"orbit runner and quine_check disagree on {named}"
                )
            hits.append(QuineHit(m, period))
    hits.sort(key=lambda h: (len(h.mol), h.period, canonical_certificate(h.mol)))
    return hits
