"""Command-line interface.

Subcommands: validate, translate, reduce, trace, quine-check, conflicts,
translate-chem, serve.  Exit status 0 on success, 1 when validation or a
check fails, 2 on usage errors.  All randomness is seeded (--seed, default
0); for fixed inputs and seed the output is byte-identical across runs.
"""

from __future__ import annotations

import argparse
import sys

from .chemistry import (
    BUILTIN_CHEMISTRIES,
    Chemistry,
    ChemistryError,
    active_port_roles,
    builtin_chemistry,
    builtin_translation,
    check_shuffle,
    load_chemistry,
    load_translation,
    translate as translate_kinds,
)
from .engine import (
    ReductionConfig,
    conflicting_pairs,
    find_matches,
    quine_check,
    reduce,
)
from .graph import MolError, close_boundary, parse_mol, serialize_mol, validate
from .lam import (
    COMBINATORS,
    App,
    Lam,
    LambdaError,
    Term,
    Var,
    parse_lambda,
    to_molecule,
)
from .report import write_report

USAGE_ERROR = 2


def _chemistry_from_args(args) -> Chemistry:
    name = getattr(args, "chemistry", None) or "chemlambda-v2"
    if name in BUILTIN_CHEMISTRIES:
        return builtin_chemistry(name)
    with open(name) as fh:
        return load_chemistry(fh.read())


def _parse_weights(text: str | None) -> dict[str, float]:
    weights: dict[str, float] = {}
    if not text:
        return weights
    for part in text.split(","):
        name, _, value = part.partition("=")
        if not value:
            raise ValueError(f"bad weight spec {part!r}, want NAME=VALUE")
        weights[name.strip()] = float(value)
    return weights


def _config_from_args(args) -> ReductionConfig:
    return ReductionConfig(
        strategy=getattr(args, "strategy", "deterministic-greedy"),
        seed=getattr(args, "seed", 0),
        max_cycles=getattr(args, "max_cycles", 100),
        weights=_parse_weights(getattr(args, "weights", None)),
    )


def _resolve_library(term: Term, bound: frozenset[str] = frozenset()) -> Term:
    """Free variables naming library combinators (S, K, C3, ...) become the
    library terms, so `--lambda "S K K"` means what it says."""
    if isinstance(term, Var):
        if term.name not in bound and term.name in COMBINATORS:
            return COMBINATORS[term.name]
        return term
    if isinstance(term, Lam):
        return Lam(term.binder, _resolve_library(term.body, bound | {term.binder}))
    return App(_resolve_library(term.fn, bound), _resolve_library(term.arg, bound))


def _load_molecule(args, chem: Chemistry):
    term_text = getattr(args, "lambda_term", None)
    if term_text:
        term = _resolve_library(parse_lambda(term_text))
        return close_boundary(to_molecule(term, chem))
    if not getattr(args, "file", None):
        raise MolError("need a mol FILE or --lambda TERM")
    with open(args.file) as fh:
        return close_boundary(parse_mol(fh.read(), chem.kinds))


def _emit(args, text: str) -> None:
    out = getattr(args, "output", None)
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# --- subcommands ------------------------------------------------------------

def cmd_validate(args) -> int:
    chem = _chemistry_from_args(args)
    with open(args.file) as fh:
        m = parse_mol(fh.read(), chem.kinds)
    problems = validate(m)
    if problems:
        for p in problems:
            print(p)
        return 1
    b = m.boundary()
    print(
        f"ok: {len(m)} nodes, boundary in={len(b.free_in)} out={len(b.free_out)}"
    )
    return 0


def cmd_translate(args) -> int:
    chem = _chemistry_from_args(args)
    term = parse_lambda(args.term)
    m = to_molecule(term, chem)
    if args.close:
        m = close_boundary(m)
    _emit(args, serialize_mol(m))
    return 0


def cmd_reduce(args) -> int:
    chem = _chemistry_from_args(args)
    m = _load_molecule(args, chem)
    cfg = _config_from_args(args)
    trace = reduce(m, chem, cfg)
    applied = sum(len(r.applied) for r in trace.cycles)
    _emit(args, serialize_mol(trace.final))
    print(
        f"{trace.terminal}: {len(trace.cycles)} cycles, {applied} rewrites, "
        f"{len(trace.final)} nodes",
        file=sys.stderr,
    )
    return 0


def cmd_trace(args) -> int:
    chem = _chemistry_from_args(args)
    m = _load_molecule(args, chem)
    cfg = _config_from_args(args)
    trace = reduce(m, chem, cfg)
    if args.report_dir:
        paths = write_report(trace, args.report_dir, figures=args.figures)
        for p in paths:
            print(p)
    else:
        _emit(args, trace.render())
    return 0


def cmd_quine_check(args) -> int:
    chem = _chemistry_from_args(args)
    m = _load_molecule(args, chem)
    cfg = ReductionConfig(max_cycles=max(args.horizon, 1), seed=args.seed)
    outcome = quine_check(m, chem, cfg, args.horizon)
    if outcome.detected:
        print(f"quine: period {outcome.period}")
        return 0
    print("not detected")
    return 1


def cmd_conflicts(args) -> int:
    chem = _chemistry_from_args(args)
    m = _load_molecule(args, chem)
    matches = find_matches(m, chem)
    pairs = conflicting_pairs(matches)
    print(f"matches: {len(matches)}")
    for match in matches:
        print(f"  {match.show()} edge {match.edge}")
    print(f"conflicts: {len(pairs)}")
    for a, b in pairs:
        shared = sorted(set(a.nodes()) & set(b.nodes()))
        print(f"  {a.show()} <> {b.show()} share node {','.join(map(str, shared))}")
    return 0


def cmd_translate_chem(args) -> int:
    src = _chemistry_from_args_named(args.src)
    dst = _chemistry_from_args_named(args.dst)
    if args.map:
        with open(args.map) as fh:
            table = load_translation(fh.read())
    else:
        table = builtin_translation(args.src, args.dst)
    with open(args.file) as fh:
        m = parse_mol(fh.read(), src.kinds)
    _emit(args, serialize_mol(translate_kinds(m, table, dst)))
    return 0


def _chemistry_from_args_named(name: str) -> Chemistry:
    if name in BUILTIN_CHEMISTRIES:
        return builtin_chemistry(name)
    with open(name) as fh:
        return load_chemistry(fh.read())


def cmd_chem_info(args) -> int:
    chem = _chemistry_from_args(args)
    print(f"chemistry: {chem.name}")
    print(f"kinds: {', '.join(sorted(chem.kinds))}")
    print("active ports:")
    for kind, roles in sorted(active_port_roles(chem).items()):
        print(f"  {kind}: {', '.join(roles) or '-'}")
    print("rules:")
    for rule in chem.rules:
        print(f"  {rule.name} ({rule.family})")
    if chem.name == "chemlambda-v2":
        print(f"shuffle composition: {'ok' if check_shuffle(chem) else 'BROKEN'}")
    return 0


def cmd_serve(args) -> int:
    from .serve import run_server

    run_server(args.host, args.port)
    return 0


# --- argument plumbing ---------------------------------------------------------

def _add_common(p: argparse.ArgumentParser, with_strategy: bool = True) -> None:
    p.add_argument("--chemistry", default=None,
                   help="built-in name or chemistry definition file")
    if with_strategy:
        p.add_argument("--strategy", default="deterministic-greedy",
                       choices=("deterministic-greedy", "weighted-random"))
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--max-cycles", type=int, default=100, dest="max_cycles")
        p.add_argument("--weights", default=None,
                       help="per-rule weight overrides, NAME=V,NAME=V")
    p.add_argument("--output", default=None, help="write main output to a file")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="molrew", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a mol file")
    p.add_argument("file")
    p.add_argument("--chemistry", default=None)
    p.set_defaults(fn=cmd_validate)

    p = sub.add_parser("translate", help="lambda term to mol")
    p.add_argument("term")
    p.add_argument("--close", action="store_true",
                   help="cap free half-edges with FRIN/FROUT")
    _add_common(p, with_strategy=False)
    p.set_defaults(fn=cmd_translate)

    p = sub.add_parser("reduce", help="reduce to normal form or cycle budget")
    p.add_argument("file", nargs="?")
    p.add_argument("--lambda", dest="lambda_term", default=None,
                   help="reduce this term (or combinator name) instead of a file")
    _add_common(p)
    p.set_defaults(fn=cmd_reduce)

    p = sub.add_parser("trace", help="emit the full replayable trace")
    p.add_argument("file", nargs="?")
    p.add_argument("--lambda", dest="lambda_term", default=None)
    p.add_argument("--report-dir", default=None,
                   help="write trace.txt + stats.csv into this directory")
    p.add_argument("--figures", action="store_true",
                   help="also render PNG figures into the report directory")
    _add_common(p)
    p.set_defaults(fn=cmd_trace)

    p = sub.add_parser("quine-check", help="look for isomorphic recurrence")
    p.add_argument("file", nargs="?")
    p.add_argument("--lambda", dest="lambda_term", default=None)
    p.add_argument("--horizon", type=int, default=16)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--chemistry", default=None)
    p.set_defaults(fn=cmd_quine_check)

    p = sub.add_parser("conflicts", help="list matches and node-sharing pairs")
    p.add_argument("file", nargs="?")
    p.add_argument("--lambda", dest="lambda_term", default=None)
    p.add_argument("--chemistry", default=None)
    p.set_defaults(fn=cmd_conflicts)

    p = sub.add_parser("translate-chem", help="map node kinds between chemistries")
    p.add_argument("file")
    p.add_argument("--from", dest="src", required=True)
    p.add_argument("--to", dest="dst", required=True)
    p.add_argument("--map", default=None, help="translation table file")
    p.add_argument("--output", default=None)
    p.set_defaults(fn=cmd_translate_chem)

    p = sub.add_parser("chem-info", help="show a chemistry's kinds, rules, actives")
    p.add_argument("--chemistry", default=None)
    p.set_defaults(fn=cmd_chem_info)

    p = sub.add_parser("serve", help="run the interactive session server")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8765)
    p.set_defaults(fn=cmd_serve)

    return ap


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return USAGE_ERROR if exc.code not in (0, None) else 0
    try:
        return args.fn(args)
    except (MolError, ChemistryError, LambdaError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
