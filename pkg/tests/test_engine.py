import random

import pytest

from molrew.chemistry import builtin_chemistry
from molrew.engine import (
    EngineError,
    FreshNames,
    Match,
    ReductionConfig,
    apply_matches,
    comb_pass,
    conflicting_pairs,
    cycle,
    find_matches,
    quine_check,
    reduce,
    replay_check,
    resolve_conflicts,
    stats,
    stats_csv,
)
from molrew.graph import close_boundary, iso_check, molecule, parse_mol, serialize_mol
from molrew.lam import parse_lambda, to_molecule
from molrew.rng import SplitMix64

from conftest import random_molecule


def cfg(**kw):
    return ReductionConfig(**kw)


# --- find_matches -------------------------------------------------------------

def test_single_beta_match(chem):
    m = parse_mol("L a b x\nA x c d", chem.kinds)
    matches = find_matches(m, chem)
    assert [m_.rule for m_ in matches] == ["BETA"]
    assert matches[0].edge == "x"


def test_conflicting_matches_share_a_node(chem):
    # the A node is in a BETA pattern through its in port and in an
    # A-FOE distribution through its out port
    m = parse_mol("L a b x\nA x c d\nFOE d e f", chem.kinds)
    matches = find_matches(m, chem)
    assert sorted(m_.rule for m_ in matches) == ["A-FOE", "BETA"]
    pairs = conflicting_pairs(matches)
    assert len(pairs) == 1


def test_empty_molecule_no_matches(chem):
    assert find_matches(molecule(chem.kinds, []), chem) == []


def test_matches_sorted_by_edge(chem):
    m = parse_mol("L a1 b1 p\nA p c1 d1\nL a2 b2 q\nA q c2 d2", chem.kinds)
    matches = find_matches(m, chem)
    assert [m_.edge for m_ in matches] == sorted(m_.edge for m_ in matches)


# --- resolve_conflicts -----------------------------------------------------------

def test_resolution_forces_disjoint(chem):
    m = parse_mol("L a b x\nA x c d\nFOE d e f", chem.kinds)
    matches = find_matches(m, chem)
    chosen = resolve_conflicts(matches, cfg(), SplitMix64(0), chem)
    assert len(chosen) == 1


def test_deterministic_greedy_takes_canonical_order(chem):
    m = parse_mol("L a b x\nA x c d\nFOE d e f", chem.kinds)
    matches = find_matches(m, chem)
    chosen = resolve_conflicts(matches, cfg(), SplitMix64(0), chem)
    assert chosen[0] == matches[0]


def test_weighted_random_replayable(chem):
    m = parse_mol("L a b x\nA x c d\nFOE d e f", chem.kinds)
    matches = find_matches(m, chem)
    config = cfg(strategy="weighted-random", seed=42)
    outs = {
        tuple(resolve_conflicts(matches, config, SplitMix64(42), chem))
        for _ in range(100)
    }
    assert len(outs) == 1


def test_weighted_random_zero_weight_drops_rule(chem):
    m = parse_mol("L a b x\nA x c d\nFOE d e f", chem.kinds)
    matches = find_matches(m, chem)
    config = cfg(strategy="weighted-random", seed=1, weights={"BETA": 0.0})
    for seed in range(20):
        chosen = resolve_conflicts(matches, config, SplitMix64(seed), chem)
        assert all(c.rule != "BETA" for c in chosen)


def test_diric_matches_always_disjoint(diric):
    rng = random.Random(99)
    for _ in range(1000):
        m = random_molecule(diric, rng, rng.randint(2, 12), close_fraction=0.9)
        matches = find_matches(m, diric)
        assert conflicting_pairs(matches) == []
        chosen = resolve_conflicts(matches, cfg(), SplitMix64(0), diric)
        assert chosen == matches


# --- apply_matches ------------------------------------------------------------------

def test_apply_beta(chem):
    m = parse_mol("L a b x\nA x c d", chem.kinds)
    out = apply_matches(m, find_matches(m, chem), chem)
    expected = parse_mol("Arrow a d\nArrow c b", chem.kinds)
    assert iso_check(out, expected)
    assert out.boundary() == m.boundary()


def test_apply_fanin(chem):
    m = parse_mol("FI a b x\nFOE x c d", chem.kinds)
    out = apply_matches(m, find_matches(m, chem), chem)
    # crossed wiring: a meets d, b meets c
    names = {tuple(n.edges) for n in out.nodes}
    assert names == {("a", "d"), ("b", "c")}


def test_apply_empty_choice(chem):
    m = parse_mol("L a b x\nA x c d", chem.kinds)
    assert apply_matches(m, [], chem) is not m
    assert iso_check(apply_matches(m, [], chem), m)


def test_apply_stale_match_raises(chem):
    m = parse_mol("L a b x\nA x c d", chem.kinds)
    stale = Match("BETA", 5, 6, "x")
    with pytest.raises(EngineError):
        apply_matches(m, [stale], chem)


def test_dist_grows_by_two(chem):
    m = parse_mol("L a b x\nFO x c d", chem.kinds)
    out = apply_matches(m, find_matches(m, chem), chem)
    assert len(out) == 4


# --- comb_pass ---------------------------------------------------------------------

def test_comb_chain(chem):
    m = parse_mol("Arrow a b\nArrow b c", chem.kinds)
    out = comb_pass(m)
    assert [n.kind for n in out.nodes] == ["Arrow"]
    assert out.boundary() == m.boundary()


def test_comb_splice(chem):
    m = parse_mol("L a b x\nArrow x y\nA y c d", chem.kinds)
    out = comb_pass(m)
    assert out.kind_counts() == {"L": 1, "A": 1}
    assert find_matches(out, chem)[0].rule == "BETA"


def test_comb_preserves_self_loop(chem):
    m = parse_mol("Arrow a a", chem.kinds)
    out = comb_pass(m)
    assert serialize_mol(out) == "Arrow a a\n"


def test_comb_collapses_arrow_cycle_to_loop(chem):
    m = parse_mol("Arrow a b\nArrow b a", chem.kinds)
    out = comb_pass(m)
    assert len(out) == 1
    node = out.nodes[0]
    assert node.kind == "Arrow" and node.edges[0] == node.edges[1]


def test_comb_keeps_bare_wire(chem):
    m = parse_mol("Arrow a b", chem.kinds)
    assert serialize_mol(comb_pass(m)) == "Arrow a b\n"


def test_comb_bounded_by_arrow_count(chem):
    rng = random.Random(17)
    for _ in range(50):
        m = random_molecule(chem, rng, rng.randint(2, 10), close_fraction=0.8)
        arrows_before = m.kind_counts().get("Arrow", 0)
        out = comb_pass(m)
        assert out.kind_counts().get("Arrow", 0) <= arrows_before
        assert out.boundary() == m.boundary()


# --- cycle / reduce -------------------------------------------------------------------

def test_cycle_normal_form_is_identity(chem):
    m = close_boundary(parse_mol("L a a r", chem.kinds))
    out, report = cycle(m, chem, cfg(), SplitMix64(0))
    assert report.found == 0 and report.applied == ()
    assert iso_check(out, m)


def test_cycle_beta_then_comb(chem):
    term = parse_lambda(r"(\x.x)(\y.y)")
    m = close_boundary(to_molecule(term, chem))
    out, report = cycle(m, chem, cfg(), SplitMix64(0))
    assert report.histogram == {"BETA": 1}
    target = close_boundary(to_molecule(parse_lambda(r"\y.y"), chem))
    assert iso_check(out, target)


def test_reduce_terminates_on_skk(chem):
    term = parse_lambda(r"(\x y z.(x z) (y z)) (\x y.x) (\x y.x)")
    m = close_boundary(to_molecule(term, chem))
    trace = reduce(m, chem, cfg(max_cycles=50))
    assert trace.terminal == "normal-form"
    target = close_boundary(to_molecule(parse_lambda(r"\z.z"), chem))
    assert iso_check(trace.final, target)


def test_reduce_omega_hits_max_cycles(chem):
    m = close_boundary(to_molecule(parse_lambda(r"(\x.x x)(\x.x x)"), chem))
    trace = reduce(m, chem, cfg(max_cycles=100))
    assert trace.terminal == "max-cycles"
    assert all(len(r.applied) >= 1 for r in trace.cycles)


def test_reduce_trace_replays_byte_identical(chem):
    m = close_boundary(to_molecule(parse_lambda(r"(\x.x x)(\x.x x)"), chem))
    for strategy in ("deterministic-greedy", "weighted-random"):
        config = cfg(strategy=strategy, seed=7, max_cycles=40)
        t1 = reduce(m, chem, config)
        t2 = reduce(m, chem, config)
        assert t1.render() == t2.render()
        assert replay_check(t1, chem)


def test_boundary_preserved_through_open_reduction(chem):
    # reduce a molecule with free half-edges; the boundary must survive
    m = parse_mol("L a b x\nA x c d", chem.kinds)
    trace = reduce(m, chem, cfg(max_cycles=10))
    assert trace.final.boundary() == m.boundary()


# --- quine_check ---------------------------------------------------------------------

def test_quine_check_rejects_normal_form(chem):
    m = close_boundary(parse_mol("L a a r", chem.kinds))
    out = quine_check(m, chem, cfg(max_cycles=10), horizon=10)
    assert not out.detected


def test_quine_check_rejects_terminating_term(chem):
    term = parse_lambda(r"(\x y z.(x z) (y z)) (\x y.x) (\x y.x)")
    m = close_boundary(to_molecule(term, chem))
    assert not quine_check(m, chem, cfg(max_cycles=60), horizon=50).detected


def test_quine_check_finds_omega_orbit_quine(chem):
    # drive Omega into its limit cycle, then check the recurring state
    from molrew.engine import FreshNames
    m = close_boundary(to_molecule(parse_lambda(r"(\x.x x)(\x.x x)"), chem))
    rng = SplitMix64(0)
    fresh = FreshNames(m.edge_names())
    state = m
    for i in range(4):
        state, _ = cycle(state, chem, cfg(max_cycles=10), rng, i, fresh)
    out = quine_check(state, chem, cfg(max_cycles=10), horizon=8)
    assert out.detected and out.period == 2
    assert out.trace is not None and out.trace.terminal == "quine-detected"


def test_quine_check_requires_greedy(chem):
    m = close_boundary(parse_mol("L a a r", chem.kinds))
    with pytest.raises(ValueError):
        quine_check(m, chem, cfg(strategy="weighted-random"), horizon=4)


# --- stats ------------------------------------------------------------------------------

def test_stats_zero_cycles(chem):
    m = close_boundary(parse_mol("L a a r", chem.kinds))
    trace = reduce(m, chem, cfg(max_cycles=5))
    header, rows, totals = stats(trace)
    assert header[0] == "cycle"
    assert rows == [] and totals == {}
    assert stats_csv(trace).count("\n") == 1


def test_stats_totals_match_reports(chem):
    m = close_boundary(to_molecule(parse_lambda(r"(\x.x x)(\x.x x)"), chem))
    trace = reduce(m, chem, cfg(max_cycles=30))
    _, rows, totals = stats(trace)
    assert len(rows) == len(trace.cycles)
    applied = sum(len(r.applied) for r in trace.cycles)
    assert sum(totals.values()) == applied
    assert all(v > 0 for v in totals.values())


def test_fresh_names_avoid_collisions():
    fresh = FreshNames({"x000000", "x000001"})
    assert fresh.next() == "x000002"
    assert fresh.next() == "x000003"
    # padded names sort in generation order
    assert "x000002" < "x000010" < "x000100"


def test_diric_resolution_keeps_all_matches_any_seed(diric):
    rng = random.Random(3)
    for seed in range(10):
        m = random_molecule(diric, rng, rng.randint(3, 10), close_fraction=0.9)
        matches = find_matches(m, diric)
        chosen = resolve_conflicts(
            matches,
            cfg(strategy="weighted-random", seed=seed),
            SplitMix64(seed),
            diric,
        )
        assert sorted(c.edge for c in chosen) == sorted(m_.edge for m_ in matches)
