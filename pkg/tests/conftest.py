import random

import pytest

from molrew.chemistry import builtin_chemistry
from molrew.graph import Molecule, molecule


@pytest.fixture(scope="session")
def chem():
    return builtin_chemistry("chemlambda-v2")


@pytest.fixture(scope="session")
def diric():
    return builtin_chemistry("diric")


@pytest.fixture(scope="session")
def ic():
    return builtin_chemistry("ic")


def random_molecule(chem, rng: random.Random, n_nodes: int, close_fraction: float = 1.0) -> Molecule:
    """Random valid molecule: pick kinds, then wire a random subset of
    out-ends to in-ends; the rest dangle."""
    kind_names = [k for k in sorted(chem.kinds) if k not in ("FRIN", "FROUT")]
    names = [rng.choice(kind_names) for _ in range(n_nodes)]
    outs, ins = [], []
    for i, k in enumerate(names):
        for s, slot in enumerate(chem.kinds[k].signature):
            (outs if slot.direction == "out" else ins).append((i, s))
    rng.shuffle(outs)
    rng.shuffle(ins)
    n_join = int(min(len(outs), len(ins)) * close_fraction)
    edges = [["?"] * chem.kinds[k].arity for k in names]
    counter = 0
    for (oi, os_), (ii, is_) in zip(outs[:n_join], ins[:n_join]):
        name = f"w{counter}"
        counter += 1
        edges[oi][os_] = name
        edges[ii][is_] = name
    for i, row in enumerate(edges):
        for s, v in enumerate(row):
            if v == "?":
                edges[i][s] = f"d{counter}"
                counter += 1
    return molecule(chem.kinds, [(k, tuple(e)) for k, e in zip(names, edges)])


def permuted_renamed_copy(m: Molecule, rng: random.Random) -> Molecule:
    order = list(range(len(m.nodes)))
    rng.shuffle(order)
    mapping = {}
    for name in sorted(m.edge_names()):
        mapping[name] = f"r{len(mapping)}_{rng.randrange(1000)}"
    rows = []
    for i in order:
        node = m.nodes[i]
        rows.append((node.kind, tuple(mapping[e] for e in node.edges)))
    return molecule(m.kinds, rows)
