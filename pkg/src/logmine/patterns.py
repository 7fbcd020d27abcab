"""Pattern expressions: process trees rewritten over a fixed pattern set.

A pattern expression nests pattern applications such as
``Seq3(a, Loop(b, c), Xor2(d, e))``.  Each pattern has a family (Seq, Xor,
And, Loop) and a fixed arity.  Trees with wider operators are folded to the
right so that every application stays within the table below.

Xor, And and Loop instances own artificial entry/exit activities (``s``/``e``
markers).  They are not arguments; :class:`Instances` names them
deterministically from the position of the instance in the expression.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator, Union

from .tree import Activity, Node, ProcessTree, Tau, leaves, number_taus


@dataclass(frozen=True)
class PatternSpec:
    name: str
    family: str
    arity: int
    markers: tuple[str, ...]  # synthesized marker slots owned by an instance


# Adding a pattern means adding a row here and its templates in ``templates``.
PATTERNS: dict[str, PatternSpec] = {
    p.name: p
    for p in (
        PatternSpec("Seq2", "Seq", 2, ()),
        PatternSpec("Seq3", "Seq", 3, ()),
        PatternSpec("Seq4", "Seq", 4, ()),
        PatternSpec("Seq5", "Seq", 5, ()),
        PatternSpec("Xor2", "Xor", 2, ("s", "e")),
        PatternSpec("Xor3", "Xor", 3, ("s", "e")),
        PatternSpec("And2", "And", 2, ("s", "e")),
        PatternSpec("And3", "And", 3, ("s", "e")),
        PatternSpec("And4", "And", 4, ("s", "e")),
        PatternSpec("Loop", "Loop", 2, ("s",)),
    )
}

_MAX_ARITY = {"Seq": 5, "Xor": 3, "And": 4}


class UnsupportedShape(ValueError):
    pass


class PatternSyntaxError(ValueError):
    def __init__(self, msg: str, pos: int):
        super().__init__(f"{msg} at offset {pos}")
        self.pos = pos


@dataclass(frozen=True)
class Atom:
    name: str
    is_tau: bool = False

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class PatternApp:
    pattern: str
    args: tuple["PatternExpression", ...]

    def __post_init__(self) -> None:
        spec = PATTERNS.get(self.pattern)
        if spec is None:
            raise UnsupportedShape(f"unknown pattern {self.pattern!r}")
        if len(self.args) != spec.arity:
            raise UnsupportedShape(f"{self.pattern} takes {spec.arity} arguments, got {len(self.args)}")

    def __str__(self) -> str:
        return f"{self.pattern}({', '.join(str(a) for a in self.args)})"


PatternExpression = Union[PatternApp, Atom]
Path = tuple[int, ...]


def family_of(p: PatternApp) -> str:
    return PATTERNS[p.pattern].family


# -- extraction ---------------------------------------------------------------


def extract(tree: ProcessTree) -> PatternExpression:
    """Rewrite a process tree as a pattern expression.

    Unnumbered taus are numbered first so every tau atom is distinct.
    """
    if any(isinstance(leaf, Tau) and leaf.id == 0 for leaf in leaves(tree)):
        tree = number_taus(tree)
    return _extract(tree)


def _extract(t: ProcessTree) -> PatternExpression:
    if isinstance(t, Tau):
        return Atom(str(t), is_tau=True)
    if isinstance(t, Activity):
        return Atom(t.name)
    if not isinstance(t, Node) or len(t.children) < 2:
        raise UnsupportedShape(f"operator node needs two or more children: {t}")
    if t.op == "Loop":
        body, redo = t.children
        return PatternApp("Loop", (_extract(body), _extract(redo)))
    kids = list(t.children)
    limit = _MAX_ARITY[t.op]
    if len(kids) > limit:
        # keep limit-1 children and fold the tail into one nested operator
        kids = kids[: limit - 1] + [Node(t.op, tuple(kids[limit - 1:]))]
    return PatternApp(f"{t.op}{len(kids)}", tuple(_extract(k) for k in kids))


def to_tree(w: PatternExpression) -> ProcessTree:
    """Inverse of :func:`extract` up to folding (nested chains stay nested)."""
    if isinstance(w, Atom):
        m = re.fullmatch(r"tau(\d*)", w.name) if w.is_tau else None
        if m:
            return Tau(int(m.group(1) or 0))
        return Activity(w.name)
    op = family_of(w)
    return Node(op, tuple(to_tree(a) for a in w.args))


# -- traversal and metrics ----------------------------------------------------


def walk(w: PatternExpression, path: Path = ()) -> Iterator[tuple[Path, PatternExpression]]:
    """Pre-order traversal yielding ``(path, node)``."""
    yield path, w
    if isinstance(w, PatternApp):
        for i, a in enumerate(w.args):
            yield from walk(a, path + (i,))


def at(w: PatternExpression, path: Path) -> PatternExpression:
    for i in path:
        assert isinstance(w, PatternApp)
        w = w.args[i]
    return w


def atoms(w: PatternExpression) -> list[Atom]:
    return [n for _, n in walk(w) if isinstance(n, Atom)]


def pattern_count(w: PatternExpression) -> int:
    return sum(isinstance(n, PatternApp) for _, n in walk(w))


# -- markers, entry and exit --------------------------------------------------


class Instances:
    """Pattern instances of an expression with their synthesized markers.

    Instances are numbered 1, 2, ... in pre-order.  A marker is named
    ``<slot>_<Pattern>_<n>`` (e.g. ``s_Xor2_3``); when that collides with an
    activity of the expression a numeric suffix is appended.
    """

    def __init__(self, w: PatternExpression, reserved: frozenset[str] | set[str] = frozenset()):
        self.root = w
        taken = {a.name for a in atoms(w)} | set(reserved)
        self.markers: dict[Path, dict[str, str]] = {}
        self.number: dict[Path, int] = {}
        k = 0
        for path, node in walk(w):
            if not isinstance(node, PatternApp):
                continue
            k += 1
            self.number[path] = k
            slots = {}
            for slot in PATTERNS[node.pattern].markers:
                name = base = f"{slot}_{node.pattern}_{k}"
                j = 1
                while name in taken:
                    name = f"{base}_{j}"
                    j += 1
                taken.add(name)
                slots[slot] = name
            self.markers[path] = slots

    def label(self, path: Path) -> str:
        return f"{at(self.root, path).pattern}#{self.number[path]}"  # type: ignore[union-attr]

    def entry(self, path: Path = ()) -> str:
        node = at(self.root, path)
        if isinstance(node, Atom):
            return node.name
        fam = family_of(node)
        if fam == "Seq":
            return self.entry(path + (0,))
        return self.markers[path]["s"]

    def exit(self, path: Path = ()) -> str:
        node = at(self.root, path)
        if isinstance(node, Atom):
            return node.name
        fam = family_of(node)
        if fam == "Seq":
            return self.exit(path + (len(node.args) - 1,))
        if fam == "Loop":
            # the loop is left after its body, so the exit is the body's entry
            return self.entry(path + (0,))
        return self.markers[path]["e"]

    def all_markers(self) -> list[str]:
        return [m for slots in self.markers.values() for m in slots.values()]


def entry(w: PatternExpression) -> str:
    return Instances(w).entry()


def exit(w: PatternExpression) -> str:  # noqa: A001 - mirrors entry()
    return Instances(w).exit()


# -- text form ----------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(?P<punct>[(),])|(?P<name>[^\s(),]+))")


def parse_w(text: str) -> PatternExpression:
    """Parse ``Seq3(a, Loop(b, tau1), Xor2(c, d))``; ``tau<N>`` atoms are silent."""
    toks: list[tuple[str, int]] = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            if not text[pos:].strip():
                break
            raise PatternSyntaxError("unexpected character", pos)
        toks.append((m.group("punct") or m.group("name"), m.start(m.lastindex)))
        pos = m.end()
    toks.append(("", len(text)))
    i = 0

    def expr() -> PatternExpression:
        nonlocal i
        tok, where = toks[i]
        if tok in ("", "(", ")", ","):
            raise PatternSyntaxError(f"expected an expression, found {tok or 'end of input'!r}", where)
        i += 1
        if toks[i][0] == "(":
            i += 1
            args = [expr()]
            while toks[i][0] == ",":
                i += 1
                args.append(expr())
            if toks[i][0] != ")":
                raise PatternSyntaxError("expected ')'", toks[i][1])
            i += 1
            try:
                return PatternApp(tok, tuple(args))
            except UnsupportedShape as exc:
                raise PatternSyntaxError(str(exc), where) from None
        return Atom(tok, is_tau=bool(re.fullmatch(r"tau\d*", tok)))

    w = expr()
    if toks[i][0]:
        raise PatternSyntaxError("trailing input", toks[i][1])
    return w


def canonical(w: PatternExpression) -> tuple:
    """Comparison key: Xor/And arguments as multisets, taus anonymous."""
    if isinstance(w, Atom):
        return ("tau",) if w.is_tau else ("atom", w.name)
    keys = [canonical(a) for a in w.args]
    if family_of(w) in ("Xor", "And"):
        keys.sort()
    return (w.pattern, tuple(keys))
