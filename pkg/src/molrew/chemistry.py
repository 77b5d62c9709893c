"""Chemistries: node-kind tables plus declarative rewrite rule tables.

A chemistry definition is plain text (see docs/formats.md) so the exact
left- and right-hand wirings can be audited and edited without touching the
engine.  Three chemistries ship bundled: chemlambda-v2, ic and diric.

A rewrite rule's LHS is always two nodes joined by one edge from an out
slot to an in slot.  The RHS is a template over the LHS boundary ports
(`a1..a3` for the first node's slots, `b1..b3` for the second, in signature
order) plus fresh internal edges (`~1`, `~2`, ...).  COMB rules (Arrow
elimination) are declared here for completeness but executed by a dedicated
engine pass, so they do not contribute active ports.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from importlib import resources

from .graph import IN, OUT, Molecule, MolError, NodeKind, PortSlot, molecule, parse_mol

FAMILIES = ("BETA", "FAN-IN", "DIST", "PRUNE", "COMB", "ANNIHILATE")

BUILTIN_CHEMISTRIES = ("chemlambda-v2", "ic", "diric")


class ChemistryError(MolError):
    """Malformed chemistry definition or unusable chemistry."""


@dataclass(frozen=True)
class RuleEnd:
    kind: str
    slot: int


@dataclass(frozen=True)
class RhsNode:
    kind: str
    # each port is ("a", i) / ("b", i) for an lhs boundary slot, or ("~", n)
    ports: tuple[tuple[str, int], ...]


@dataclass(frozen=True)
class RewriteRule:
    name: str
    family: str
    out_end: RuleEnd  # lhs node whose out slot carries the shared edge
    in_end: RuleEnd   # lhs node whose in slot consumes it
    rhs: tuple[RhsNode, ...]
    weight: float = 1.0

    def lhs_key(self) -> tuple[str, int, str, int]:
        return (self.out_end.kind, self.out_end.slot, self.in_end.kind, self.in_end.slot)


@dataclass(frozen=True)
class Chemistry:
    name: str
    kinds: dict[str, NodeKind]
    rules: tuple[RewriteRule, ...]
    rules_by_lhs: dict[tuple[str, int, str, int], RewriteRule] = field(
        default_factory=dict, repr=False, compare=False
    )

    def __post_init__(self) -> None:
        index = {
            r.lhs_key(): r for r in self.rules if r.family != "COMB"
        }
        object.__setattr__(self, "rules_by_lhs", index)

    def rule(self, name: str) -> RewriteRule:
        for r in self.rules:
            if r.name == name:
                return r
        raise ChemistryError(f"chemistry {self.name} has no rule {name!r}")

    def has_rule(self, name: str) -> bool:
        return any(r.name == name for r in self.rules)

    def default_weights(self) -> dict[str, float]:
        return {r.name: r.weight for r in self.rules if r.family != "COMB"}


@dataclass(frozen=True)
class KindTranslation:
    """Total, arity-preserving node-kind relabeling between chemistries."""

    mapping: dict[str, str]

    def apply(self, kind: str) -> str:
        try:
            return self.mapping[kind]
        except KeyError:
            raise ChemistryError(f"kind {kind!r} not in translation domain") from None


# --- definition format ----------------------------------------------------

def _parse_slot_spec(token: str, where: str) -> PortSlot:
    try:
        role, direction = token.split("/", 1)
        return PortSlot(role, direction)
    except ValueError as exc:
        raise ChemistryError(f"{where}: bad slot spec {token!r}") from exc


def _parse_port_token(token: str, where: str) -> tuple[str, int]:
    token = token.strip()
    if token.startswith("~"):
        return ("~", int(token[1:]))
    if token and token[0] in "ab" and token[1:].isdigit():
        return (token[0], int(token[1:]) - 1)
    raise ChemistryError(f"{where}: bad rhs port token {token!r}")


def load_chemistry(text: str) -> Chemistry:
    """Parse and fully validate a chemistry definition."""
    name = ""
    kinds: dict[str, NodeKind] = {}
    rules: list[RewriteRule] = []
    section = ""
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        where = f"line {lineno}"
        if line.startswith("chemistry:"):
            name = line.split(":", 1)[1].strip()
            continue
        if line == "kinds:":
            section = "kinds"
            continue
        if line == "rules:":
            section = "rules"
            continue
        if section == "kinds":
            tokens = line.split()
            kname, slots = tokens[0], tokens[1:]
            if kname in kinds:
                raise ChemistryError(f"{where}: duplicate kind {kname}")
            sig = tuple(_parse_slot_spec(t, where) for t in slots)
            kinds[kname] = NodeKind(kname, sig)
        elif section == "rules":
            rules.append(_parse_rule_line(line, kinds, where))
        else:
            raise ChemistryError(f"{where}: content outside any section")
    if not name:
        raise ChemistryError("missing chemistry: header")
    chem = Chemistry(name, kinds, tuple(rules))
    _validate_chemistry(chem)
    return chem


def _parse_rule_line(line: str, kinds: dict[str, NodeKind], where: str) -> RewriteRule:
    head, _, rest = line.partition("lhs:")
    if not rest:
        raise ChemistryError(f"{where}: rule line missing lhs:")
    head_tokens = head.split()
    if len(head_tokens) != 2:
        raise ChemistryError(f"{where}: rule line needs NAME FAMILY before lhs:")
    rname, family = head_tokens
    if family not in FAMILIES:
        raise ChemistryError(f"{where}: unknown family {family!r}")
    lhs_text, _, rhs_text = rest.partition("rhs:")
    try:
        left_tok, right_tok = (t.strip() for t in lhs_text.split("-", 1))
        k1, role1 = left_tok.split(".")
        k2, role2 = right_tok.split(".")
    except ValueError:
        raise ChemistryError(f"{where}: lhs must be KIND.slot - KIND.slot") from None
    for k in (k1, k2):
        if k not in kinds:
            raise ChemistryError(f"{where}: rule {rname} references undeclared kind {k}")
    try:
        s1 = kinds[k1].slot_index(role1, OUT)
        s2 = kinds[k2].slot_index(role2, IN)
    except KeyError as exc:
        raise ChemistryError(f"{where}: rule {rname}: {exc.args[0]}") from None

    rhs_nodes: list[RhsNode] = []
    rhs_text = rhs_text.strip()
    if rhs_text:
        for part in rhs_text.split(";"):
            part = part.strip()
            if not part:
                continue
            kname, _, ports_text = part.partition("[")
            kname = kname.strip()
            if kname not in kinds:
                raise ChemistryError(f"{where}: rule {rname} rhs uses undeclared kind {kname}")
            if not ports_text.endswith("]"):
                raise ChemistryError(f"{where}: rule {rname}: rhs node needs [ports]")
            ports = tuple(
                _parse_port_token(t, where) for t in ports_text[:-1].split(",") if t.strip()
            )
            if len(ports) != kinds[kname].arity:
                raise ChemistryError(
                    f"{where}: rule {rname}: rhs {kname} takes "
                    f"{kinds[kname].arity} ports, got {len(ports)}"
                )
            rhs_nodes.append(RhsNode(kname, ports))
    return RewriteRule(rname, family, RuleEnd(k1, s1), RuleEnd(k2, s2), tuple(rhs_nodes))


def _rule_boundary_slots(rule: RewriteRule, kinds: dict[str, NodeKind]):
    """Non-shared lhs slots as {('a', i) or ('b', i): direction}."""
    out = {}
    for tag, end in (("a", rule.out_end), ("b", rule.in_end)):
        sig = kinds[end.kind].signature
        for i, slot in enumerate(sig):
            if i == end.slot:
                continue
            out[(tag, i)] = slot.direction
    return out


def _validate_rule(rule: RewriteRule, kinds: dict[str, NodeKind]) -> None:
    boundary = _rule_boundary_slots(rule, kinds)
    seen: dict[tuple[str, int], int] = {}
    fresh_dirs: dict[int, list[str]] = {}
    for rnode in rule.rhs:
        sig = kinds[rnode.kind].signature
        for slot_i, port in enumerate(rnode.ports):
            direction = sig[slot_i].direction
            if port[0] == "~":
                fresh_dirs.setdefault(port[1], []).append(direction)
                continue
            if port not in boundary:
                raise ChemistryError(
                    f"rule {rule.name}: rhs references non-boundary port "
                    f"{port[0]}{port[1] + 1}"
                )
            if boundary[port] != direction:
                raise ChemistryError(
                    f"rule {rule.name}: boundary port {port[0]}{port[1] + 1} "
                    f"changes direction"
                )
            seen[port] = seen.get(port, 0) + 1
    for port in boundary:
        count = seen.get(port, 0)
        if count == 0:
            raise ChemistryError(
                f"rule {rule.name}: boundary port dropped ({port[0]}{port[1] + 1})"
            )
        if count > 1:
            raise ChemistryError(
                f"rule {rule.name}: boundary port duplicated ({port[0]}{port[1] + 1})"
            )
    for n, dirs in fresh_dirs.items():
        if sorted(dirs) != [IN, OUT]:
            raise ChemistryError(
                f"rule {rule.name}: fresh edge ~{n} must join one out slot "
                f"to one in slot"
            )
    _validate_family_law(rule, kinds)


def _validate_family_law(rule: RewriteRule, kinds: dict[str, NodeKind]) -> None:
    def heavy(names) -> int:
        return sum(1 for k in names if kinds[k].arity >= 3)

    rhs_kinds = [n.kind for n in rule.rhs]
    lhs_kinds = [rule.out_end.kind, rule.in_end.kind]
    if rule.family == "DIST":
        if len(rhs_kinds) != 4:
            raise ChemistryError(f"rule {rule.name}: DIST must produce exactly 4 nodes")
    elif rule.family in ("BETA", "FAN-IN", "ANNIHILATE"):
        if any(k != "Arrow" for k in rhs_kinds):
            raise ChemistryError(
                f"rule {rule.name}: {rule.family} may only produce Arrow nodes"
            )
    elif rule.family == "PRUNE":
        before = (heavy(lhs_kinds), len(lhs_kinds))
        after = (heavy(rhs_kinds), len(rhs_kinds))
        if not after < before:
            raise ChemistryError(f"rule {rule.name}: PRUNE must shrink the molecule")
    elif rule.family == "COMB":
        if "Arrow" not in lhs_kinds:
            raise ChemistryError(f"rule {rule.name}: COMB lhs must contain Arrow")


def _validate_chemistry(chem: Chemistry) -> None:
    seen_lhs: dict[tuple, str] = {}
    seen_names: set[str] = set()
    for rule in chem.rules:
        if rule.name in seen_names:
            raise ChemistryError(f"duplicate rule name {rule.name}")
        seen_names.add(rule.name)
        _validate_rule(rule, chem.kinds)
        if rule.family == "COMB":
            continue
        key = rule.lhs_key()
        if key in seen_lhs:
            raise ChemistryError(
                f"duplicate rule for lhs {key}: {seen_lhs[key]} and {rule.name}"
            )
        seen_lhs[key] = rule.name
    actives = active_ports(chem)
    if chem.name in ("ic", "diric"):
        for kind, slots in actives.items():
            if len(slots) > 1:
                raise ChemistryError(
                    f"chemistry {chem.name}: kind {kind} has {len(slots)} active "
                    f"ports, at most one allowed"
                )
    if chem.name == "chemlambda-v2":
        if not any(len(slots) >= 2 for slots in actives.values()):
            raise ChemistryError(
                "chemistry chemlambda-v2: expected a kind with two active ports"
            )


def active_ports(chem: Chemistry) -> dict[str, frozenset[int]]:
    """Slots appearing in some non-COMB rule lhs, per kind."""
    table: dict[str, set[int]] = {k: set() for k in chem.kinds}
    for rule in chem.rules:
        if rule.family == "COMB":
            continue
        table[rule.out_end.kind].add(rule.out_end.slot)
        table[rule.in_end.kind].add(rule.in_end.slot)
    return {k: frozenset(v) for k, v in table.items()}


def active_port_roles(chem: Chemistry) -> dict[str, tuple[str, ...]]:
    """active_ports rendered as role/direction strings, for display."""
    out = {}
    for kind, slots in active_ports(chem).items():
        sig = chem.kinds[kind].signature
        out[kind] = tuple(str(sig[i]) for i in sorted(slots))
    return out


# --- bundled definitions ----------------------------------------------------

def _data_text(relpath: str) -> str:
    return resources.files("molrew.data").joinpath(relpath).read_text()


def builtin_chemistry(name: str) -> Chemistry:
    if name not in BUILTIN_CHEMISTRIES:
        raise ChemistryError(
            f"unknown chemistry {name!r}; built-ins: {', '.join(BUILTIN_CHEMISTRIES)}"
        )
    return load_chemistry(_data_text(f"{name}.chem"))


def load_translation(text: str) -> KindTranslation:
    mapping: dict[str, str] = {}
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        src, dst = line.split()
        mapping[src] = dst
    return KindTranslation(mapping)


def builtin_translation(src: str, dst: str) -> KindTranslation:
    if (src, dst) != ("ic", "diric"):
        raise ChemistryError(f"no bundled translation {src} -> {dst}")
    return load_translation(_data_text("ic-to-diric.map"))


def translate(m: Molecule, t: KindTranslation, target: Chemistry) -> Molecule:
    """Relabel node kinds; edges preserved.  The result must be valid under
    the target chemistry's kind table."""
    rows = []
    for node in m.nodes:
        new_kind = t.apply(node.kind)
        src_kind = m.kinds[node.kind]
        dst_kind = target.kinds.get(new_kind)
        if dst_kind is None:
            raise ChemistryError(f"translation target kind {new_kind!r} undeclared")
        if dst_kind.arity != src_kind.arity:
            raise ChemistryError(
                f"translation {node.kind} -> {new_kind} changes arity"
            )
        rows.append((new_kind, node.edges))
    return molecule(target.kinds, rows)


# --- SHUFFLE ----------------------------------------------------------------

def shuffle_patterns(chem: Chemistry) -> tuple[Molecule, Molecule]:
    lhs = parse_mol(_data_text("patterns/shuffle-lhs.mol"), chem.kinds)
    rhs = parse_mol(_data_text("patterns/shuffle-rhs.mol"), chem.kinds)
    return lhs, rhs


def check_shuffle(chem: Chemistry) -> bool:
    """True iff FO-FOE followed by FI-FOE (then COMB) rewrites the bundled
    SHUFFLE lhs into the bundled SHUFFLE rhs."""
    from . import engine  # local import; engine depends on this module
    from .graph import pattern_equal

    for required in ("FO-FOE", "FAN-IN"):
        if not chem.has_rule(required):
            raise ChemistryError(f"check_shuffle: chemistry lacks rule {required}")
    lhs, rhs = shuffle_patterns(chem)
    state = lhs
    for rule_name in ("FO-FOE", "FAN-IN"):
        matches = [m for m in engine.find_matches(state, chem) if m.rule == rule_name]
        if len(matches) != 1:
            return False
        state = engine.apply_matches(state, [matches[0]], chem)
    state = engine.comb_pass(state)
    return pattern_equal(state, rhs)
