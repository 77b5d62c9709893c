import random

from molrew.chemistry import builtin_chemistry
from molrew.engine import FreshNames, ReductionConfig, cycle, quine_check
from molrew.graph import close_boundary, molecule, serialize_mol
from molrew.lam import parse_lambda, to_molecule
from molrew.rng import SplitMix64
from molrew.search import FRESH_BASE, _FastChem, _fast_cycle, search_quines

from conftest import random_molecule


def canonical_rename(m):
    """Rename edges to e0000-style in lex order of the original names, and
    return both the renamed molecule and the int-edge rows the search's
    runner uses (int i <-> name e{i:04d})."""
    names = sorted(m.edge_names())
    to_int = {name: i for i, name in enumerate(names)}
    named_rows = [
        (n.kind, tuple(f"e{to_int[e]:04d}" for e in n.edges)) for n in m.nodes
    ]
    int_rows = [(n.kind, tuple(to_int[e] for e in n.edges)) for n in m.nodes]
    return molecule(m.kinds, named_rows), int_rows


def int_rows_to_names(rows):
    def name(e):
        return f"e{e:04d}" if e < FRESH_BASE else f"x{e - FRESH_BASE:06d}"

    return [(k, tuple(name(e) for e in edges)) for k, edges in rows]


def run_parity(chem, fast, m, cycles):
    """Engine and orbit runner must produce identical states, names and
    node order included, for `cycles` steps."""
    named, rows = canonical_rename(m)
    fresh = FreshNames(named.edge_names())
    srng = SplitMix64(0)
    counter = [0]
    cfg = ReductionConfig(max_cycles=max(cycles, 1))
    state = named
    for i in range(cycles):
        state, _ = cycle(state, chem, cfg, srng, i, fresh)
        rows, _ = _fast_cycle(rows, fast, counter)
        fast_mol = molecule(chem.kinds, int_rows_to_names(rows))
        assert serialize_mol(fast_mol) == serialize_mol(state)


def test_fast_cycle_agrees_with_engine(chem):
    fast = _FastChem(chem)
    rng = random.Random(23)
    for _ in range(300):
        m = close_boundary(random_molecule(chem, rng, rng.randint(2, 8), close_fraction=0.8))
        run_parity(chem, fast, m, 4)


def test_fast_cycle_agrees_on_lambda_reductions(chem):
    fast = _FastChem(chem)
    for src in (r"(\x.x x)(\x.x x)", r"(\x y z.(x z)(y z)) (\x y.x) (\x y.x)"):
        m = close_boundary(to_molecule(parse_lambda(src), chem))
        run_parity(chem, fast, m, 12)


def test_search_small_sizes_clean(chem):
    hits = search_quines(chem, max_nodes=3, workers=1)
    for h in hits:
        out = quine_check(h.mol, chem, ReductionConfig(max_cycles=20), 16)
        assert out.detected and out.period == h.period


def test_search_finds_planted_quine(chem):
    """The known recurring state downstream of the Omega reduction must be
    confirmed by quine_check at its period."""
    m = close_boundary(to_molecule(parse_lambda(r"(\x.x x)(\x.x x)"), chem))
    cfg = ReductionConfig(max_cycles=10)
    rng = SplitMix64(0)
    fresh = FreshNames(m.edge_names())
    state = m
    for i in range(4):
        state, _ = cycle(state, chem, cfg, rng, i, fresh)
    out = quine_check(state, chem, cfg, 8)
    assert out.detected and out.period == 2
