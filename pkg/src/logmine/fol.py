"""Monadic first-order formulas, the temporal lowering and TPTP FOF text.

Lowering drops temporal order: □ becomes ∀ and ◇ becomes ∃ over a fresh
variable, and atoms become unary predicates of the variable of the nearest
enclosing modality.  Atoms outside any modality are closed as ``∃x p(x)``.
"""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from typing import Iterable, Iterator, Union

from . import ltl


@dataclass(frozen=True)
class Pred:
    name: str
    var: str


@dataclass(frozen=True)
class FNot:
    arg: "Fol"


@dataclass(frozen=True)
class FAnd:
    args: tuple["Fol", ...]


@dataclass(frozen=True)
class FOr:
    args: tuple["Fol", ...]


@dataclass(frozen=True)
class FImplies:
    lhs: "Fol"
    rhs: "Fol"


@dataclass(frozen=True)
class ForAll:
    var: str
    body: "Fol"


@dataclass(frozen=True)
class Exists:
    var: str
    body: "Fol"


@dataclass(frozen=True)
class Const:
    value: bool


Fol = Union[Pred, FNot, FAnd, FOr, FImplies, ForAll, Exists, Const]
TRUE, FALSE = Const(True), Const(False)


class NotMonadic(ValueError):
    pass


class TptpSyntaxError(ValueError):
    def __init__(self, msg: str, line: int, col: int):
        super().__init__(f"{msg} at line {line}, column {col}")
        self.line, self.col = line, col


class UnresolvedOperand(ValueError):
    pass


def fchildren(f: Fol) -> tuple[Fol, ...]:
    if isinstance(f, (Pred, Const)):
        return ()
    if isinstance(f, (FAnd, FOr)):
        return f.args
    if isinstance(f, FImplies):
        return (f.lhs, f.rhs)
    if isinstance(f, FNot):
        return (f.arg,)
    return (f.body,)


def predicates(f: Fol) -> Iterator[str]:
    if isinstance(f, Pred):
        yield f.name
    for c in fchildren(f):
        yield from predicates(c)


def free_vars(f: Fol) -> frozenset[str]:
    if isinstance(f, Pred):
        return frozenset((f.var,))
    if isinstance(f, (ForAll, Exists)):
        return free_vars(f.body) - {f.var}
    out: frozenset[str] = frozenset()
    for c in fchildren(f):
        out |= free_vars(c)
    return out


def fconj(args: Iterable[Fol]) -> Fol:
    args = tuple(args)
    if not args:
        return TRUE
    return args[0] if len(args) == 1 else FAnd(args)


def lower(f: ltl.Formula) -> Fol:
    """Map a temporal formula to a closed monadic sentence."""
    fresh = (f"X{i}" for i in itertools.count(1))

    def go(g: ltl.Formula, var: str | None) -> Fol:
        if isinstance(g, ltl.Atom):
            if var is None:
                v = next(fresh)
                return Exists(v, Pred(g.name, v))
            return Pred(g.name, var)
        if isinstance(g, ltl.Not):
            return FNot(go(g.arg, var))
        if isinstance(g, ltl.And):
            return FAnd(tuple(go(a, var) for a in g.args))
        if isinstance(g, ltl.Or):
            return FOr(tuple(go(a, var) for a in g.args))
        if isinstance(g, ltl.Implies):
            return FImplies(go(g.lhs, var), go(g.rhs, var))
        v = next(fresh)
        body = go(g.arg, v)
        return ForAll(v, body) if isinstance(g, ltl.Always) else Exists(v, body)

    return go(f, None)


def check_monadic(f: Fol) -> None:
    """Reject open sentences; arity is monadic by construction of the AST."""
    if free_vars(f):
        raise NotMonadic(f"free variable(s) {sorted(free_vars(f))} in sentence")


def alpha_key(f: Fol, env: tuple[str, ...] = ()) -> tuple:
    """Structural key invariant under renaming of bound variables."""
    if isinstance(f, Pred):
        return ("P", f.name, env.index(f.var) if f.var in env else f.var)
    if isinstance(f, Const):
        return ("C", f.value)
    if isinstance(f, (ForAll, Exists)):
        return ("A" if isinstance(f, ForAll) else "E", alpha_key(f.body, (f.var,) + env))
    tag = type(f).__name__
    return (tag, tuple(alpha_key(c, env) for c in fchildren(f)))


# -- text ---------------------------------------------------------------------


def to_unicode(f: Fol) -> str:
    if isinstance(f, Pred):
        return f"{f.name}({f.var})"
    if isinstance(f, Const):
        return "⊤" if f.value else "⊥"
    if isinstance(f, FNot):
        return "¬" + _uni_unit(f.arg)
    if isinstance(f, (ForAll, Exists)):
        q = "∀" if isinstance(f, ForAll) else "∃"
        return f"{q}{f.var} {_uni_unit(f.body)}"
    if isinstance(f, FImplies):
        return f"{_uni_unit(f.lhs)} → {_uni_unit(f.rhs)}"
    op = " ∧ " if isinstance(f, FAnd) else " ∨ "
    return op.join(_uni_unit(a) for a in f.args)


def _uni_unit(f: Fol) -> str:
    text = to_unicode(f)
    return text if isinstance(f, (Pred, Const, FNot)) else f"({text})"


def sanitize_names(names: Iterable[str]) -> dict[str, str]:
    """Injective map from predicate names to TPTP lower words."""
    out: dict[str, str] = {}
    used: set[str] = set()
    for name in dict.fromkeys(names):
        base = re.sub(r"[^a-z0-9_]", "_", name.lower())
        if not base or not base[0].isalpha():
            base = "p_" + base
        cand, n = base, 2
        while cand in used:
            cand = f"{base}_{n}"
            n += 1
        used.add(cand)
        out[name] = cand
    return out


def to_tptp(f: Fol, names: dict[str, str]) -> str:
    if isinstance(f, Pred):
        return f"{names.get(f.name, f.name)}({f.var})"
    if isinstance(f, Const):
        return "$true" if f.value else "$false"
    if isinstance(f, FNot):
        return "~ " + _tptp_unit(f.arg, names)
    if isinstance(f, (ForAll, Exists)):
        q = "!" if isinstance(f, ForAll) else "?"
        return f"{q}[{f.var}] : {_tptp_unit(f.body, names)}"
    if isinstance(f, FImplies):
        return f"{_tptp_unit(f.lhs, names)} => {_tptp_unit(f.rhs, names)}"
    op = " & " if isinstance(f, FAnd) else " | "
    return op.join(_tptp_unit(a, names) for a in f.args)


def _tptp_unit(f: Fol, names: dict[str, str]) -> str:
    text = to_tptp(f, names)
    return text if isinstance(f, (Pred, Const, FNot, ForAll, Exists)) else f"({text})"


@dataclass(frozen=True)
class Statement:
    name: str
    role: str
    formula: Fol


def emit_tptp(statements: list[Statement], header: Iterable[str] = ()) -> str:
    """Render FOF statements with a comment table of the name mapping."""
    names = sanitize_names(p for s in statements for p in predicates(s.formula))
    lines = [f"% {h}" for h in header]
    if names:
        lines.append("% predicate symbols:")
        lines.extend(f"%   {tp} = {orig}" for orig, tp in names.items())
    for s in statements:
        lines.append(f"fof({s.name}, {s.role}, {_tptp_unit(s.formula, names)}).")
    return "\n".join(lines) + "\n"


_TPTP_TOKEN = re.compile(
    r"(?P<ws>\s+)|(?P<comment>%[^\n]*)|(?P<op><=>|=>|[~&|!?:,()\[\].])"
    r"|(?P<dollar>\$(?:true|false))|(?P<lower>[a-z][A-Za-z0-9_]*)|(?P<upper>[A-Z][A-Za-z0-9_]*)"
)
_ROLES = {"axiom", "hypothesis", "conjecture", "negated_conjecture", "lemma", "theorem", "definition", "assumption"}


def parse_tptp(text: str) -> list[Statement]:
    """Strict reader for the FOF subset this package writes.

    Accepts ``fof(name, role, formula).`` statements with ``~ & | => <=>``,
    ``!``/``?`` quantifiers, unary predicates and ``%`` comments.  Binary
    connectives of different kinds must be parenthesized, as TPTP requires.
    """
    toks: list[tuple[str, str, int]] = []
    pos = 0
    while pos < len(text):
        m = _TPTP_TOKEN.match(text, pos)
        if not m:
            toks.append(("bad", text[pos], pos))
            break
        if m.lastgroup not in ("ws", "comment"):
            toks.append((m.lastgroup, m.group(), pos))
        pos = m.end()
    toks.append(("end", "", len(text)))
    i = 0

    def where(p: int) -> tuple[int, int]:
        line = text.count("\n", 0, p) + 1
        return line, p - (text.rfind("\n", 0, p) + 1) + 1

    def fail(msg: str) -> TptpSyntaxError:
        return TptpSyntaxError(msg, *where(toks[i][2]))

    def take(kind: str, value: str | None = None) -> str:
        nonlocal i
        k, v, _ = toks[i]
        if k != kind or (value is not None and v != value):
            raise fail(f"expected {value or kind!r}, found {v or 'end of input'!r}")
        i += 1
        return v

    def at(value: str) -> bool:
        return toks[i][0] == "op" and toks[i][1] == value

    def formula(bound: tuple[str, ...]) -> Fol:
        nonlocal i
        first = unitary(bound)
        if at("&") or at("|"):
            op = toks[i][1]
            args = [first]
            while at(op):
                i += 1
                args.append(unitary(bound))
            if at("&") or at("|") or at("=>") or at("<=>"):
                raise fail("mixed binary connectives need parentheses")
            return FAnd(tuple(args)) if op == "&" else FOr(tuple(args))
        if at("=>") or at("<=>"):
            op = toks[i][1]
            i += 1
            rhs = unitary(bound)
            if at("&") or at("|") or at("=>") or at("<=>"):
                raise fail("mixed binary connectives need parentheses")
            if op == "=>":
                return FImplies(first, rhs)
            return FAnd((FImplies(first, rhs), FImplies(rhs, first)))
        return first

    def unitary(bound: tuple[str, ...]) -> Fol:
        nonlocal i
        kind, value, _ = toks[i]
        if kind == "op" and value in ("!", "?"):
            i += 1
            take("op", "[")
            vs = [take("upper")]
            while at(","):
                i += 1
                vs.append(take("upper"))
            take("op", "]")
            take("op", ":")
            body = unitary(tuple(vs) + bound)
            for v in reversed(vs):
                body = ForAll(v, body) if value == "!" else Exists(v, body)
            return body
        if kind == "op" and value == "~":
            i += 1
            return FNot(unitary(bound))
        if kind == "op" and value == "(":
            i += 1
            f = formula(bound)
            take("op", ")")
            return f
        if kind == "dollar":
            i += 1
            return Const(value == "$true")
        if kind == "lower":
            i += 1
            if not at("("):
                raise fail("propositional symbols are outside the monadic fragment")
            i += 1
            var = take("upper")
            if at(","):
                raise fail("only unary predicates are supported")
            take("op", ")")
            if var not in bound:
                raise fail(f"unbound variable {var}")
            return Pred(value, var)
        raise fail(f"unexpected {value or 'end of input'!r}")

    out = []
    while toks[i][0] != "end":
        if toks[i][1] != "fof":
            raise fail("expected 'fof'")
        i += 1
        take("op", "(")
        name = toks[i][1]
        if toks[i][0] not in ("lower", "upper"):
            raise fail("expected a statement name")
        i += 1
        take("op", ",")
        role = take("lower")
        if role not in _ROLES:
            raise fail(f"unknown role {role!r}")
        take("op", ",")
        f = formula(())
        take("op", ")")
        take("op", ".")
        out.append(Statement(name, role, f))
    return out


# -- problems -----------------------------------------------------------------

KINDS = ("Satisfiability", "Entails", "Equivalent", "Requirement")


@dataclass(frozen=True)
class Problem:
    """A verification task over lowered specifications.

    ``lhs`` is the sentence list of the left (or only) specification; ``rhs``
    is the right specification or the requirement, as a sentence list whose
    conjunction forms the conjecture.
    """

    id: str
    kind: str
    lhs: tuple[Fol, ...] | None
    rhs: tuple[Fol, ...] | None = None
    description: str = ""

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ValueError(f"unknown problem kind {self.kind!r}")


@dataclass(frozen=True)
class Obligation:
    """One prover call: axioms plus an optional conjecture."""

    name: str
    axioms: tuple[Fol, ...]
    conjecture: Fol | None

    def statements(self) -> list[Statement]:
        st = [Statement(f"ax{i}", "axiom", f) for i, f in enumerate(self.axioms, 1)]
        if self.conjecture is not None:
            st.append(Statement("goal", "conjecture", self.conjecture))
        return st

    def tptp(self, header: Iterable[str] = ()) -> str:
        return emit_tptp(self.statements(), [f"problem {self.name}", *header])


def assemble(problem: Problem) -> list[Obligation]:
    """Split a problem into prover obligations (two for equivalence)."""
    if problem.lhs is None:
        raise UnresolvedOperand(f"{problem.id}: left operand unresolved")
    if problem.kind == "Satisfiability":
        return [Obligation(problem.id, problem.lhs, None)]
    if problem.rhs is None:
        raise UnresolvedOperand(f"{problem.id}: right operand unresolved")
    if problem.kind == "Equivalent":
        return [
            Obligation(f"{problem.id}_lr", problem.lhs, fconj(problem.rhs)),
            Obligation(f"{problem.id}_rl", problem.rhs, fconj(problem.lhs)),
        ]
    return [Obligation(problem.id, problem.lhs, fconj(problem.rhs))]
