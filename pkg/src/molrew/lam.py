"""Untyped lambda calculus front-end.

Provides the term parser, the translation from terms to molecules, a small
combinator library, and an independent normal-order reducer used as the
oracle that graph reductions are checked against.  The reducer never touches
the graph machinery, and the translation never consults the reducer.
"""

from __future__ import annotations

from dataclasses import dataclass

from .graph import Molecule, molecule
from .chemistry import Chemistry


class LambdaError(Exception):
    pass


class LambdaParseError(LambdaError):
    def __init__(self, message: str, pos: int):
        self.pos = pos
        super().__init__(f"{message} (at {pos})")


# --- terms ------------------------------------------------------------------

@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Lam:
    binder: str
    body: "Term"


@dataclass(frozen=True)
class App:
    fn: "Term"
    arg: "Term"


Term = Var | Lam | App


def show(t: Term) -> str:
    if isinstance(t, Var):
        return t.name
    if isinstance(t, Lam):
        return f"\\{t.binder}.{show(t.body)}"
    fn = show(t.fn)
    if isinstance(t.fn, Lam):
        fn = f"({fn})"
    arg = show(t.arg)
    if isinstance(t.arg, (App, Lam)):
        arg = f"({arg})"
    return f"{fn} {arg}"


def free_vars(t: Term) -> set[str]:
    if isinstance(t, Var):
        return {t.name}
    if isinstance(t, Lam):
        return free_vars(t.body) - {t.binder}
    return free_vars(t.fn) | free_vars(t.arg)


# --- parser -----------------------------------------------------------------

_LAMBDA_CHARS = ("\\", "λ")


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def error(self, message: str):
        raise LambdaParseError(message, self.pos)

    def skip_ws(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip_ws()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def ident(self) -> str:
        self.skip_ws()
        start = self.pos
        while self.pos < len(self.text) and (
            self.text[self.pos].isalnum() or self.text[self.pos] in "_'"
        ):
            self.pos += 1
        if self.pos == start:
            self.error("identifier expected")
        return self.text[start:self.pos]

    def term(self) -> Term:
        if self.peek() in _LAMBDA_CHARS:
            return self.lam()
        return self.app()

    def lam(self) -> Term:
        self.pos += 1  # lambda marker
        binders = []
        while self.peek() != ".":
            if self.peek() == "":
                self.error("'.' expected after binder")
            binders.append(self.ident())
        if not binders:
            self.error("empty binder")
        self.pos += 1  # the dot
        body = self.term()
        for b in reversed(binders):
            body = Lam(b, body)
        return body

    def app(self) -> Term:
        out = self.atom()
        if out is None:
            self.error("term expected")
        while True:
            if self.peek() in _LAMBDA_CHARS:
                return App(out, self.lam())
            nxt = self.atom()
            if nxt is None:
                return out
            out = App(out, nxt)

    def atom(self) -> Term | None:
        c = self.peek()
        if c == "(":
            self.pos += 1
            inner = self.term()
            if self.peek() != ")":
                self.error("')' expected")
            self.pos += 1
            return inner
        if c and (c.isalnum() or c in "_'"):
            return Var(self.ident())
        return None


def parse_lambda(text: str) -> Term:
    p = _Parser(text)
    t = p.term()
    p.skip_ws()
    if p.pos != len(text):
        p.error("trailing input")
    return t


# --- translation to molecules -------------------------------------------------

def to_molecule(t: Term, chem: Chemistry) -> Molecule:
    """One L per abstraction, one A per application; a variable used k >= 2
    times fans out through k-1 FO nodes (a comb built in textual occurrence
    order), an unused binder feeds a T node.  The term's value dangles as a
    single out half-edge; free variables dangle as in half-edges."""
    rows: list[tuple[str, tuple[str, ...]]] = []
    counter = [0]

    def fresh() -> str:
        counter[0] += 1
        return f"e{counter[0]}"

    scopes: dict[str, list[list[str]]] = {}
    free_uses: dict[str, list[str]] = {}

    def fan_out(root: str, uses: list[str]) -> None:
        # root's producer is already placed; spread it over the uses
        feed = root
        for i, use in enumerate(uses[:-1]):
            tail = uses[-1] if i == len(uses) - 2 else fresh()
            rows.append(("FO", (feed, use, tail)))
            feed = tail

    def go(term: Term) -> str:
        if isinstance(term, Var):
            use = fresh()
            stack = scopes.get(term.name)
            if stack:
                stack[-1].append(use)
            else:
                free_uses.setdefault(term.name, []).append(use)
            return use
        if isinstance(term, App):
            fn_edge = go(term.fn)
            arg_edge = go(term.arg)
            out = fresh()
            rows.append(("A", (fn_edge, arg_edge, out)))
            return out
        scopes.setdefault(term.binder, []).append([])
        body_edge = go(term.body)
        uses = scopes[term.binder].pop()
        out = fresh()
        if not uses:
            sink = fresh()
            rows.append(("L", (body_edge, sink, out)))
            rows.append(("T", (sink,)))
        elif len(uses) == 1:
            rows.append(("L", (body_edge, uses[0], out)))
        else:
            var_edge = fresh()
            rows.append(("L", (body_edge, var_edge, out)))
            fan_out(var_edge, uses)
        return out

    root = go(t)
    if isinstance(t, Var):
        # a bare variable is a wire: nothing else would anchor the root edge
        rows.append(("Arrow", (root, fresh())))
    for uses in free_uses.values():
        if len(uses) > 1:
            fan_out(fresh(), uses)
    return molecule(chem.kinds, rows)


# --- normal-order oracle -------------------------------------------------------

def _substitute(t: Term, name: str, value: Term, counter: list[int]) -> Term:
    if isinstance(t, Var):
        return value if t.name == name else t
    if isinstance(t, App):
        return App(
            _substitute(t.fn, name, value, counter),
            _substitute(t.arg, name, value, counter),
        )
    if t.binder == name:
        return t
    if t.binder in free_vars(value) and name in free_vars(t.body):
        counter[0] += 1
        renamed = f"{t.binder}_{counter[0]}"
        body = _substitute(t.body, t.binder, Var(renamed), counter)
        return Lam(renamed, _substitute(body, name, value, counter))
    return Lam(t.binder, _substitute(t.body, name, value, counter))


def _step(t: Term, counter: list[int]) -> Term | None:
    """One leftmost-outermost beta step, or None at normal form."""
    if isinstance(t, App):
        if isinstance(t.fn, Lam):
            return _substitute(t.fn.body, t.fn.binder, t.arg, counter)
        fn = _step(t.fn, counter)
        if fn is not None:
            return App(fn, t.arg)
        arg = _step(t.arg, counter)
        if arg is not None:
            return App(t.fn, arg)
        return None
    if isinstance(t, Lam):
        body = _step(t.body, counter)
        return Lam(t.binder, body) if body is not None else None
    return None


def normal_order_reduce(t: Term, fuel: int = 10000) -> Term | None:
    """Leftmost-outermost reduction; None when the fuel runs out."""
    counter = [0]
    for _ in range(fuel):
        nxt = _step(t, counter)
        if nxt is None:
            return t
        t = nxt
    return None


def alpha_equal(a: Term, b: Term, env: tuple[tuple[str, str], ...] = ()) -> bool:
    if isinstance(a, Var) and isinstance(b, Var):
        for x, y in reversed(env):
            if a.name == x or b.name == y:
                return a.name == x and b.name == y
        return a.name == b.name
    if isinstance(a, Lam) and isinstance(b, Lam):
        return alpha_equal(a.body, b.body, env + ((a.binder, b.binder),))
    if isinstance(a, App) and isinstance(b, App):
        return alpha_equal(a.fn, b.fn, env) and alpha_equal(a.arg, b.arg, env)
    return False


# --- combinator library ----------------------------------------------------------

def church(n: int) -> Term:
    body: Term = Var("x")
    for _ in range(n):
        body = App(Var("f"), body)
    return Lam("f", Lam("x", body))


def _lib() -> dict[str, Term]:
    src = {
        "I": r"\x.x",
        "K": r"\x y.x",
        "S": r"\x y z.(x z) (y z)",
        "B": r"\x y z.x (y z)",
        "C": r"\x y z.(x z) y",
        "W": r"\x y.(x y) y",
        "OMEGA": r"(\x.x x) (\x.x x)",
        "SUCC": r"\n f x.f (n f x)",
        "ADD": r"\m n.m (\k f x.f (k f x)) n",
        "PRED": r"\n f x.n (\g h.h (g f)) (\u.x) (\u.u)",
    }
    out = {name: parse_lambda(text) for name, text in src.items()}
    for n in range(10):
        out[f"C{n}"] = church(n)
    return out


COMBINATORS: dict[str, Term] = _lib()


def library_term(name: str) -> Term:
    try:
        return COMBINATORS[name]
    except KeyError:
        raise LambdaError(f"unknown combinator {name!r}") from None
