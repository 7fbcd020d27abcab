"""Logical specifications generated from pattern expressions.

Every pattern owns a tuple of formula templates written in the requirement
syntax over its formal parameters.  Instantiating a pattern expression binds
the parameters of each instance and collects the formulas of all instances.

Binding rules for a parameter whose argument is itself a pattern:

* inside ◇ the parameter stands for where the argument starts (its entry);
* elsewhere it stands for where the argument finishes (its exit);
* Loop parameters always bind the entry of body and redo.

Only the outermost instance asserts its opening ``F(...)`` formula; nested
instances are reached through the chain formulas of their parent.  Formulas
that come out identical are kept once and remember every origin.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

from . import ltl
from .ltl import Formula
from .patterns import Atom, Instances, PatternApp, PatternExpression, Path, walk


@dataclass(frozen=True)
class Template:
    params: tuple[str, ...]  # formal parameters bound to arguments, in order
    formulas: tuple[str, ...]  # first one is the opening formula
    entry_bound: bool = False  # bind pattern arguments by entry everywhere


def _seq(n: int) -> Template:
    ps = "abcde"[:n]
    chain = [f"G({x} -> F({y}))" for x, y in zip(ps, ps[1:])]
    excl = [f"G(!({x} & {y}))" for i, x in enumerate(ps) for y in ps[i + 1:]]
    return Template(tuple(ps), (f"F({ps[0]})", *chain, *excl))


def _xor(n: int) -> Template:
    ps = "abc"[:n]
    arms = [
        " & ".join(f"F({q})" if q == p else f"!F({q})" for q in ps)
        for p in ps
    ]
    choice = " | ".join(f"({arm})" for arm in arms)
    nodes = ["s", *ps, "e"]
    excl = [f"G(!({x} & {y}))" for i, x in enumerate(nodes) for y in nodes[i + 1:]]
    return Template(
        tuple(ps),
        ("F(s)", f"G(s -> {choice})", f"G(({' | '.join(ps)}) -> F(e))", *excl),
    )


def _and(n: int) -> Template:
    ps = "abcd"[:n]
    any_ = " | ".join(ps)
    return Template(
        tuple(ps),
        (
            "F(s)",
            f"G(s -> {' & '.join(f'F({p})' for p in ps)})",
            *(f"G({p} -> F(e))" for p in ps),
            f"G(!(s & ({any_})))",
            f"G(!(({any_}) & e))",
        ),
    )


TEMPLATES: dict[str, Template] = {
    "Seq2": _seq(2),
    "Seq3": _seq(3),
    "Seq4": _seq(4),
    "Seq5": _seq(5),
    "Xor2": _xor(2),
    "Xor3": _xor(3),
    "And2": _and(2),
    "And3": _and(3),
    "And4": _and(4),
    "Loop": Template(
        ("a", "b"),
        (
            "F(s)",
            "G(s -> F(a))",
            "G(a -> (F(b) & F(a)) | !F(b))",
            "G(b -> F(a))",
            "G(!(s & a))",
            "G(!(s & b))",
            "G(!(a & b))",
        ),
        entry_bound=True,
    ),
}

_PARSED = {name: tuple(ltl.parse(f) for f in t.formulas) for name, t in TEMPLATES.items()}


@dataclass(frozen=True)
class Origin:
    instance: str  # e.g. "Xor2#5"
    index: int  # position in the pattern's template tuple

    def __str__(self) -> str:
        return f"{self.instance}[{self.index}]"


@dataclass
class LogicalSpecification:
    formulas: list[Formula]
    provenance: list[list[Origin]]
    markers: list[str] = field(default_factory=list)

    @property
    def alphabet(self) -> list[str]:
        seen: dict[str, None] = {}
        for f in self.formulas:
            for a in ltl.atoms(f):
                seen.setdefault(a, None)
        return list(seen)

    @property
    def taus(self) -> list[str]:
        return [a for a in self.alphabet if ltl.is_tau(a)]

    def __len__(self) -> int:
        return len(self.formulas)

    def dump(self) -> str:
        """One formula per line, each preceded by a ``#`` provenance line."""
        lines = []
        for f, origins in zip(self.formulas, self.provenance):
            lines.append("# " + " ".join(str(o) for o in origins))
            lines.append(ltl.to_text(f))
        return "\n".join(lines) + "\n"


def parse_dump(text: str) -> LogicalSpecification:
    """Read a specification dump back; provenance lines are optional."""
    formulas: list[Formula] = []
    prov: list[list[Origin]] = []
    pending: list[Origin] = []
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            pending = []
            for item in line[1:].split():
                head, _, idx = item.partition("[")
                if idx.endswith("]") and idx[:-1].isdigit():
                    pending.append(Origin(head, int(idx[:-1])))
            continue
        try:
            formulas.append(ltl.parse(line))
        except ltl.FormulaSyntaxError as exc:
            raise ltl.FormulaSyntaxError(f"line {n}: {exc}", exc.pos) from None
        prov.append(pending)
        pending = []
    return LogicalSpecification(formulas, prov)


def _bind(tpl: Template, inst: Instances, path: Path, node: PatternApp):
    slots = inst.markers[path]

    def resolve(param: str, under_f: bool) -> Formula:
        if param in slots:
            return ltl.Atom(slots[param])
        k = tpl.params.index(param)
        sub = path + (k,)
        if tpl.entry_bound or under_f:
            return ltl.Atom(inst.entry(sub))
        return ltl.Atom(inst.exit(sub))

    return resolve


def instantiate(w: PatternExpression, reserved: Iterable[str] = ()) -> list[tuple[Formula, Origin]]:
    """All instantiated template formulas in stable order, duplicates kept."""
    if isinstance(w, Atom):
        return [(ltl.Sometime(ltl.Atom(w.name)), Origin("Atom", 0))]
    inst = Instances(w, set(reserved))
    out = []
    for path, node in walk(w):
        if not isinstance(node, PatternApp):
            continue
        tpl = TEMPLATES[node.pattern]
        resolve = _bind(tpl, inst, path, node)
        label = inst.label(path)
        for idx, f in enumerate(_PARSED[node.pattern]):
            if idx == 0 and path:
                continue  # nested instances are opened by their parent
            out.append((ltl.map_atoms(f, resolve), Origin(label, idx)))
    return out


def generate(w: PatternExpression, reserved: Iterable[str] = ()) -> LogicalSpecification:
    """Instantiate the templates of every pattern instance of ``w``.

    ``reserved`` lists extra names (e.g. the log alphabet) that synthesized
    markers must avoid.
    """
    index: dict[Formula, int] = {}
    formulas: list[Formula] = []
    prov: list[list[Origin]] = []
    for f, origin in instantiate(w, reserved):
        j = index.get(f)
        if j is None:
            index[f] = len(formulas)
            formulas.append(f)
            prov.append([origin])
        else:
            prov[j].append(origin)
    markers = [] if isinstance(w, Atom) else Instances(w, set(reserved)).all_markers()
    return LogicalSpecification(formulas, prov, markers)
