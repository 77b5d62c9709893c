"""The terminating oracle corpus and golden-molecule helpers.

Each corpus entry is a closed-form lambda term that the normal-order oracle
can finish; graph reduction of its translation must land on a molecule
isomorphic to the translation of the oracle's normal form.  The entries
exercise every rule family: plain beta chains, erasure of discarded
arguments, duplication through fanouts, and fanout/fanout commutation.

Addition is taken as iterated successor, which reduces to the standard
numeral shape; the direct two-parameter addition reduces correctly as a
term but leaves its fan trees nested, so it is exercised separately rather
than through exact isomorphism.
"""

from __future__ import annotations

from .chemistry import Chemistry
from .engine import comb_pass
from .graph import Molecule, close_boundary
from .lam import App, COMBINATORS, Term, church, parse_lambda

_C = COMBINATORS


def _apply(*terms: Term) -> Term:
    out = terms[0]
    for t in terms[1:]:
        out = App(out, t)
    return out


def oracle_corpus() -> dict[str, Term]:
    """Name -> closed-or-free-variable term; all reduce to a normal form."""
    v = parse_lambda
    entries: dict[str, Term] = {
        "I-x": v(r"(\x.x) y"),
        "I-I": _apply(_C["I"], _C["I"]),
        "K-x-y": _apply(_C["K"], v("x"), v("y")),
        "K-I-omega-free": v(r"(\x y.x) z ((\w.w) v)"),
        "S-x-y-z": _apply(_C["S"], v("x"), v("y"), v("z")),
        "S-K-K": _apply(_C["S"], _C["K"], _C["K"]),
        "S-K-K-q": _apply(_C["S"], _C["K"], _C["K"], v("q")),
        "B-x-y-z": _apply(_C["B"], v("x"), v("y"), v("z")),
        "C-x-y-z": _apply(_C["C"], v("x"), v("y"), v("z")),
        "W-x-y": _apply(_C["W"], v("x"), v("y")),
        "W-I": _apply(_C["W"], _C["I"]),
        "B-B-B": _apply(_C["B"], _C["B"], _C["B"]),
        "C-C-C": _apply(_C["C"], _C["C"], _C["C"]),
        "B-I-I-x": _apply(_C["B"], _C["I"], _C["I"], v("x")),
        "BK-CK-identity": v(r"(\x y z.x (y z)) (\a b.a) ((\c d e.(c e) d) (\f g.f)) w"),
        "succ-0": _apply(_C["SUCC"], church(0)),
        "succ-1": _apply(_C["SUCC"], church(1)),
        "succ-3": _apply(_C["SUCC"], church(3)),
        "succ-succ-2": _apply(_C["SUCC"], _apply(_C["SUCC"], church(2))),
        "add-0-0": _apply(_C["ADD"], church(0), church(0)),
        "add-1-2": _apply(_C["ADD"], church(1), church(2)),
        "add-2-3": _apply(_C["ADD"], church(2), church(3)),
        "add-3-2": _apply(_C["ADD"], church(3), church(2)),
        "add-5-5": _apply(_C["ADD"], church(5), church(5)),
        "add-4-5": _apply(_C["ADD"], church(4), church(5)),
    }
    return entries


def oracle_target(nf: Term, chem: Chemistry) -> Molecule:
    """Closed translation of a normal form, with bare wires combed away so
    it is comparable with engine output."""
    from .lam import to_molecule

    return comb_pass(close_boundary(to_molecule(nf, chem)))


GOLDEN_NAMES = (
    "I", "K", "S", "B", "C", "W",
    "C0", "C1", "C2", "C3", "C4", "C5", "C6", "C7", "C8", "C9",
    "SUCC", "ADD", "PRED", "OMEGA",
)


def golden_molecules(chem: Chemistry) -> dict[str, Molecule]:
    from .lam import to_molecule

    return {name: to_molecule(_C[name], chem) for name in GOLDEN_NAMES}
