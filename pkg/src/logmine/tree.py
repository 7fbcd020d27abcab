"""Process trees and their textual form.

Grammar::

    tree     := operator "(" tree ("," tree)* ")" | "tau" [digits] | NAME
    operator := "Seq" | "Xor" | "And" | "Loop"

``tau`` leaves print as ``tau<N>``; NAME is any run of characters other than
whitespace, parentheses and commas.  Loop nodes have exactly two children
(body, redo).
"""
from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass
from typing import Iterator, Union

OPERATORS = ("Seq", "Xor", "And", "Loop")


class TreeSyntaxError(ValueError):
    def __init__(self, msg: str, pos: int):
        super().__init__(f"{msg} at offset {pos}")
        self.pos = pos


@dataclass(frozen=True)
class Activity:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Tau:
    id: int = 0

    def __str__(self) -> str:
        return f"tau{self.id}" if self.id else "tau"


@dataclass(frozen=True)
class Node:
    op: str
    children: tuple["ProcessTree", ...]

    def __post_init__(self) -> None:
        if self.op not in OPERATORS:
            raise ValueError(f"unknown operator {self.op!r}")
        if self.op == "Loop" and len(self.children) != 2:
            raise ValueError("Loop takes exactly two children (body, redo)")
        if len(self.children) < 2:
            raise ValueError(f"{self.op} needs at least two children")

    def __str__(self) -> str:
        return f"{self.op}({', '.join(str(c) for c in self.children)})"


ProcessTree = Union[Node, Activity, Tau]


def seq(*children: ProcessTree) -> ProcessTree:
    return Node("Seq", tuple(children))


def xor(*children: ProcessTree) -> ProcessTree:
    return Node("Xor", tuple(children))


def par(*children: ProcessTree) -> ProcessTree:
    return Node("And", tuple(children))


def loop(body: ProcessTree, redo: ProcessTree) -> ProcessTree:
    return Node("Loop", (body, redo))


def leaves(t: ProcessTree) -> Iterator[Activity | Tau]:
    if isinstance(t, Node):
        for c in t.children:
            yield from leaves(c)
    else:
        yield t


def number_taus(t: ProcessTree) -> ProcessTree:
    """Renumber tau leaves tau1, tau2, ... in left-to-right order."""
    counter = iter(range(1, 1 << 30))

    def walk(n: ProcessTree) -> ProcessTree:
        if isinstance(n, Tau):
            return Tau(next(counter))
        if isinstance(n, Node):
            return Node(n.op, tuple(walk(c) for c in n.children))
        return n

    return walk(t)


def canonical(t: ProcessTree) -> tuple:
    """Key for structural equality up to tau numbering.

    Seq and Loop children keep their order; Xor and And are commutative so
    their children compare as multisets.
    """
    if isinstance(t, Tau):
        return ("tau",)
    if isinstance(t, Activity):
        return ("act", t.name)
    keys = [canonical(c) for c in t.children]
    if t.op in ("Xor", "And"):
        keys.sort()
    return (t.op, tuple(keys))


def same_structure(a: ProcessTree, b: ProcessTree) -> bool:
    return canonical(a) == canonical(b)


def height(t: ProcessTree) -> int:
    if isinstance(t, Node):
        return 1 + max(height(c) for c in t.children)
    return 1


def metrics(t: ProcessTree, artificial: frozenset[str] = frozenset()) -> dict[str, int]:
    """Structural counts of a tree.

    ``activities_all`` counts every leaf including taus and ``artificial``
    boundary markers; ``activities_no_tau`` counts distinct observable
    activities, leaving out taus and the artificial markers.
    """
    ls = list(leaves(t))
    named = {leaf.name for leaf in ls if isinstance(leaf, Activity)}
    return {
        "activities_all": len(ls),
        "activities_no_tau": len(named - artificial),
        "height": height(t),
        "leaf_count": len(ls),
    }


def activity_counts(t: ProcessTree) -> Counter:
    return Counter(leaf.name for leaf in leaves(t) if isinstance(leaf, Activity))


_TOKEN = re.compile(r"\s*(?:(?P<punct>[(),])|(?P<name>[^\s(),]+))")


def parse_tree(text: str) -> ProcessTree:
    toks: list[tuple[str, int]] = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            if text[pos:].strip() == "":
                break
            raise TreeSyntaxError("unexpected character", pos)
        tok = m.group("punct") or m.group("name")
        toks.append((tok, m.start(m.lastindex)))
        pos = m.end()
    toks.append(("", len(text)))
    i = 0

    def parse() -> ProcessTree:
        nonlocal i
        tok, at = toks[i]
        if tok in ("", "(", ")", ","):
            raise TreeSyntaxError(f"expected a tree, found {tok or 'end of input'!r}", at)
        i += 1
        if tok in OPERATORS and toks[i][0] == "(":
            i += 1
            kids = [parse()]
            while toks[i][0] == ",":
                i += 1
                kids.append(parse())
            if toks[i][0] != ")":
                raise TreeSyntaxError("expected ')'", toks[i][1])
            i += 1
            try:
                return Node(tok, tuple(kids))
            except ValueError as exc:
                raise TreeSyntaxError(str(exc), at) from None
        m = re.fullmatch(r"tau(\d*)", tok)
        if m:
            return Tau(int(m.group(1)) if m.group(1) else 0)
        return Activity(tok)

    tree = parse()
    if toks[i][0] != "":
        raise TreeSyntaxError("trailing input", toks[i][1])
    return tree
