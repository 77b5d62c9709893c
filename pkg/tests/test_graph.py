import random

import pytest

from molrew.graph import (
    IsoSizeError,
    MolParseError,
    close_boundary,
    connected_components,
    iso_check,
    molecule,
    parse_mol,
    serialize_mol,
    validate,
)

from conftest import permuted_renamed_copy, random_molecule


# --- parse_mol -----------------------------------------------------------

def test_parse_single_node(chem):
    m = parse_mol("L a b c", chem.kinds)
    assert len(m) == 1
    node = m.nodes[0]
    assert node.kind == "L"
    assert node.edges == ("a", "b", "c")
    b = m.boundary()
    assert b.free_in == ("a",)
    assert sorted(b.free_out) == ["b", "c"]


def test_parse_two_nodes_internal_edge(chem):
    m = parse_mol("L a b c\nA c d e", chem.kinds)
    assert len(m) == 2
    assert m.internal_edges() == ["c"]
    b = m.boundary()
    assert sorted(b.free_in) == ["a", "d"]
    assert sorted(b.free_out) == ["b", "e"]


def test_parse_direction_clash_rejected(chem):
    with pytest.raises(MolParseError) as err:
        parse_mol("T x\nT x", chem.kinds)
    assert "two in slots" in str(err.value)


def test_parse_unknown_kind(chem):
    with pytest.raises(MolParseError) as err:
        parse_mol("ZZ a b", chem.kinds)
    assert "line 1" in str(err.value)
    assert "unknown node kind" in str(err.value)


def test_parse_wrong_arity(chem):
    with pytest.raises(MolParseError) as err:
        parse_mol("L a b", chem.kinds)
    assert "takes 3" in str(err.value)


def test_parse_edge_used_three_times(chem):
    with pytest.raises(MolParseError) as err:
        parse_mol("L a b x\nA x c d\nT x", chem.kinds)
    assert "3 times" in str(err.value)


def test_parse_comments_and_blanks(chem):
    m = parse_mol("# header\n\nL a b c  # lambda\n", chem.kinds)
    assert len(m) == 1


# --- serialize / round trip ------------------------------------------------

def test_serialize_empty(chem):
    assert serialize_mol(molecule(chem.kinds, [])) == ""


def test_serialize_round_trip_exact(chem):
    text = "L a b c\nA c d e\n"
    m = parse_mol(text, chem.kinds)
    assert serialize_mol(m) == text


def test_round_trip_random_molecules(chem):
    rng = random.Random(7)
    for _ in range(50):
        m = random_molecule(chem, rng, rng.randint(1, 12), close_fraction=0.7)
        again = parse_mol(serialize_mol(m), chem.kinds)
        assert iso_check(m, again)


# --- validate ----------------------------------------------------------------

def test_validate_clean(chem):
    m = parse_mol("L a b c\nA c d e", chem.kinds)
    assert validate(m) == []


def test_validate_same_direction_edge(chem):
    m = molecule(chem.kinds, [("FO", ("x", "y", "y"))])
    report = validate(m)
    assert len(report) == 1
    assert "two out slots" in report[0]


def test_validate_arrow_cycle_ok(chem):
    m = parse_mol("Arrow a b\nArrow b c\nArrow c a", chem.kinds)
    assert validate(m) == []


def test_validate_overused_edge(chem):
    m = molecule(chem.kinds, [("T", ("x",)), ("T", ("x",)), ("FRIN", ("x",))])
    assert any("3 times" in p for p in validate(m))


# --- close_boundary -------------------------------------------------------------

def test_close_boundary_basic(chem):
    m = parse_mol("L a b c", chem.kinds)
    closed = close_boundary(m)
    counts = closed.kind_counts()
    assert counts == {"L": 1, "FRIN": 1, "FROUT": 2}
    assert closed.boundary().profile() == (0, 0)
    assert len(closed) == len(m) + 3


def test_close_boundary_idempotent(chem):
    m = close_boundary(parse_mol("Arrow a b", chem.kinds))
    assert close_boundary(m) is m
    assert m.kind_counts() == {"Arrow": 1, "FRIN": 1, "FROUT": 1}


def test_close_boundary_node_count_law(chem):
    rng = random.Random(3)
    for _ in range(30):
        m = random_molecule(chem, rng, rng.randint(1, 10), close_fraction=0.5)
        b = m.boundary()
        closed = close_boundary(m)
        assert len(closed) == len(m) + len(b.free_in) + len(b.free_out)
        assert closed.boundary().profile() == (0, 0)


# --- iso_check ---------------------------------------------------------------------

def test_iso_renamed(chem):
    a = parse_mol("L a b c\nA c d e", chem.kinds)
    b = parse_mol("L p q r\nA r s t", chem.kinds)
    assert iso_check(a, b)


def test_iso_kind_mismatch(chem):
    a = parse_mol("L a b c", chem.kinds)
    b = parse_mol("FO a b c", chem.kinds)
    assert not iso_check(a, b)


def test_iso_detects_wiring_difference(chem):
    a = parse_mol("L x x r", chem.kinds)   # variable wired to body
    b = parse_mol("L x y r", chem.kinds)   # both dangle
    assert not iso_check(a, b)


def test_iso_permuted_copies_bulk(chem):
    rng = random.Random(11)
    for _ in range(1000):
        m = random_molecule(chem, rng, rng.randint(1, 9), close_fraction=0.8)
        assert iso_check(m, permuted_renamed_copy(m, rng))


def test_iso_equivalence_relation(chem):
    rng = random.Random(13)
    for _ in range(40):
        m = random_molecule(chem, rng, rng.randint(1, 8))
        a = permuted_renamed_copy(m, rng)
        b = permuted_renamed_copy(m, rng)
        assert iso_check(m, m)              # reflexive
        assert iso_check(a, m) and iso_check(m, a)  # symmetric
        assert iso_check(m, a) and iso_check(a, b) and iso_check(m, b)  # transitive


def test_iso_twisted_vs_parallel_pair(chem):
    # two I-combinators vs a cross-linked pair: same kind counts, not iso
    two = parse_mol("L a a r1\nL b b r2", chem.kinds)
    twisted = parse_mol("L a b r1\nL b a r2", chem.kinds)
    assert not iso_check(two, twisted)


def test_iso_size_cap(chem):
    rows = [("Arrow", (f"a{i}", f"a{i+1}")) for i in range(1500)]
    big = molecule(chem.kinds, rows)
    with pytest.raises(IsoSizeError):
        iso_check(big, big)


# --- components -------------------------------------------------------------------

def test_connected_components(chem):
    m = parse_mol("L a a r1\nL b b r2\nFROUT r1\nFROUT r2", chem.kinds)
    comps = connected_components(m)
    assert len(comps) == 2
    assert all(c.kind_counts() == {"L": 1, "FROUT": 1} for c in comps)
