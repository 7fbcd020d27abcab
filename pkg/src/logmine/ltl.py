"""Temporal formulas over □ (always) and ◇ (sometime) plus Booleans.

Text syntax (used for requirements and specification dumps)::

    formula := impl
    impl    := disj ["->" impl]               right associative
    disj    := conj ("|" conj)*
    conj    := unary ("&" unary)*
    unary   := "!" unary | "[]" unary | "<>" unary
             | "G(" formula ")" | "F(" formula ")"
             | "(" formula ")" | atom
    atom    := [A-Za-z0-9_][A-Za-z0-9_.]*  |  "'" any-but-quote "'"

``G`` and ``F`` are operators only when immediately followed by ``(``; an
atom may therefore be called ``G`` or ``F``.
"""
from __future__ import annotations

import difflib
import re
from dataclasses import dataclass
from typing import Callable, Iterable, Iterator, Union


class FormulaSyntaxError(ValueError):
    def __init__(self, msg: str, pos: int):
        super().__init__(f"{msg} at offset {pos}")
        self.pos = pos


class UnknownAtom(ValueError):
    def __init__(self, name: str, suggestions: list[str]):
        hint = f"; did you mean {', '.join(suggestions)}?" if suggestions else ""
        super().__init__(f"unknown atom {name!r}{hint}")
        self.name = name
        self.suggestions = suggestions


@dataclass(frozen=True)
class Atom:
    name: str


@dataclass(frozen=True)
class Not:
    arg: "Formula"


@dataclass(frozen=True)
class And:
    args: tuple["Formula", ...]


@dataclass(frozen=True)
class Or:
    args: tuple["Formula", ...]


@dataclass(frozen=True)
class Implies:
    lhs: "Formula"
    rhs: "Formula"


@dataclass(frozen=True)
class Always:
    arg: "Formula"


@dataclass(frozen=True)
class Sometime:
    arg: "Formula"


Formula = Union[Atom, Not, And, Or, Implies, Always, Sometime]


def conj(args: Iterable[Formula]) -> Formula:
    args = tuple(args)
    return args[0] if len(args) == 1 else And(args)


def disj(args: Iterable[Formula]) -> Formula:
    args = tuple(args)
    return args[0] if len(args) == 1 else Or(args)


def children(f: Formula) -> tuple[Formula, ...]:
    if isinstance(f, Atom):
        return ()
    if isinstance(f, (And, Or)):
        return f.args
    if isinstance(f, Implies):
        return (f.lhs, f.rhs)
    return (f.arg,)


def atoms(f: Formula) -> Iterator[str]:
    """Atom names in left-to-right order, with repetitions."""
    if isinstance(f, Atom):
        yield f.name
    for c in children(f):
        yield from atoms(c)


def map_atoms(f: Formula, fn: Callable[[str, bool], Formula], under_f: bool = False) -> Formula:
    """Replace every atom by ``fn(name, under_sometime)``.

    ``under_sometime`` tells whether the innermost modality above the atom is ◇.
    """
    if isinstance(f, Atom):
        return fn(f.name, under_f)
    if isinstance(f, Not):
        return Not(map_atoms(f.arg, fn, under_f))
    if isinstance(f, And):
        return And(tuple(map_atoms(a, fn, under_f) for a in f.args))
    if isinstance(f, Or):
        return Or(tuple(map_atoms(a, fn, under_f) for a in f.args))
    if isinstance(f, Implies):
        return Implies(map_atoms(f.lhs, fn, under_f), map_atoms(f.rhs, fn, under_f))
    if isinstance(f, Always):
        return Always(map_atoms(f.arg, fn, False))
    return Sometime(map_atoms(f.arg, fn, True))


# -- printing -----------------------------------------------------------------

_IDENT = re.compile(r"[A-Za-z0-9_][A-Za-z0-9_.]*")
_PREC = {Implies: 1, Or: 2, And: 3}


def _atom_text(name: str) -> str:
    return name if _IDENT.fullmatch(name) else f"'{name}'"


def to_text(f: Formula) -> str:
    """Print in the requirement syntax; ``parse(to_text(f)) == f``."""
    return _fmt(f, 0, ascii_ops=True)


def to_unicode(f: Formula) -> str:
    return _fmt(f, 0, ascii_ops=False)


def _fmt(f: Formula, ctx: int, ascii_ops: bool) -> str:
    if isinstance(f, Atom):
        return _atom_text(f.name) if ascii_ops else f.name
    if isinstance(f, Not):
        return ("!" if ascii_ops else "¬") + _fmt(f.arg, 4, ascii_ops)
    if isinstance(f, (Always, Sometime)):
        inner = _fmt(f.arg, 0, ascii_ops)
        if ascii_ops:
            return ("G(" if isinstance(f, Always) else "F(") + inner + ")"
        sym = "□" if isinstance(f, Always) else "◇"
        return sym + (inner if isinstance(f.arg, (Atom, Not, Always, Sometime)) else f"({inner})")
    prec = _PREC[type(f)]
    if isinstance(f, Implies):
        op = " -> " if ascii_ops else " → "
        # right associative: a nested implication on the left needs brackets
        text = _fmt(f.lhs, prec + 1, ascii_ops) + op + _fmt(f.rhs, prec, ascii_ops)
    else:
        op = {And: (" & ", " ∧ "), Or: (" | ", " ∨ ")}[type(f)][0 if ascii_ops else 1]
        text = op.join(_fmt(a, prec + 1, ascii_ops) for a in f.args)
    return f"({text})" if prec < ctx else text


def __str__(self: Formula) -> str:  # shared by all node classes
    return to_text(self)


for _cls in (Atom, Not, And, Or, Implies, Always, Sometime):
    _cls.__str__ = __str__  # type: ignore[assignment]


# -- parsing ------------------------------------------------------------------

_TOKENS = re.compile(
    r"\s*(?:(?P<op>->|\[\]|<>|[!&|()])|(?P<mod>[GF])\(|(?P<quoted>'[^']*')|(?P<ident>[A-Za-z0-9_][A-Za-z0-9_.]*))"
)


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    out = []
    pos = 0
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text):
            break
        m = _TOKENS.match(text, pos)
        if not m:
            raise FormulaSyntaxError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        value = m.group(kind)
        start = m.start(kind)
        if kind == "quoted":
            kind, value = "ident", value[1:-1]
            if not value:
                raise FormulaSyntaxError("empty quoted atom", start)
        out.append((kind, value, start))
        pos = m.end()
    out.append(("end", "", len(text)))
    return out


def parse(text: str) -> Formula:
    """Parse a formula without any alphabet check."""
    toks = _tokenize(text)
    i = 0

    def peek() -> tuple[str, str, int]:
        return toks[i]

    def expect_close() -> None:
        nonlocal i
        kind, value, pos = toks[i]
        if value != ")" or kind != "op":
            raise FormulaSyntaxError("expected ')'", pos)
        i += 1

    def impl() -> Formula:
        nonlocal i
        lhs = disj_()
        if peek()[1] == "->":
            i += 1
            return Implies(lhs, impl())
        return lhs

    def disj_() -> Formula:
        nonlocal i
        args = [conj_()]
        while peek()[:2] == ("op", "|"):
            i += 1
            args.append(conj_())
        return disj(args)

    def conj_() -> Formula:
        nonlocal i
        args = [unary()]
        while peek()[:2] == ("op", "&"):
            i += 1
            args.append(unary())
        return conj(args)

    def unary() -> Formula:
        nonlocal i
        kind, value, pos = peek()
        if kind == "op" and value in ("!", "[]", "<>"):
            i += 1
            arg = unary()
            return {"!": Not, "[]": Always, "<>": Sometime}[value](arg)
        if kind == "mod":
            i += 1
            arg = impl()
            expect_close()
            return Always(arg) if value == "G" else Sometime(arg)
        if kind == "op" and value == "(":
            i += 1
            f = impl()
            expect_close()
            return f
        if kind == "ident":
            i += 1
            return Atom(value)
        raise FormulaSyntaxError(f"expected a formula, found {value or 'end of input'!r}", pos)

    f = impl()
    kind, value, pos = peek()
    if kind != "end":
        raise FormulaSyntaxError(f"unexpected {value!r}", pos)
    return f


def is_tau(name: str) -> bool:
    return re.fullmatch(r"tau\d*", name) is not None


def parse_requirement(text: str, alphabet: Iterable[str], allow_free_atoms: bool = False) -> Formula:
    """Parse a requirement against a specification alphabet.

    ``null`` stands for any silent activity and expands to the disjunction of
    the tau atoms of ``alphabet``.  Names outside the alphabet raise
    :class:`UnknownAtom` unless ``allow_free_atoms`` is set.
    """
    alphabet = list(alphabet)
    known = set(alphabet)
    taus = [a for a in alphabet if is_tau(a)]
    f = parse(text)

    def resolve(name: str, _under: bool) -> Formula:
        if name == "null" and "null" not in known:
            if not taus:
                raise UnknownAtom("null", [])
            return disj(Atom(t) for t in taus)
        if name not in known and not allow_free_atoms:
            raise UnknownAtom(name, difflib.get_close_matches(name, alphabet, n=3))
        return Atom(name)

    return map_atoms(f, resolve)
