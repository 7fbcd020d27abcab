"""Decision procedure for monadic first-order sentences without equality.

A model of such sentences is determined, up to elementary equivalence, by
the set of 1-types it realizes: the sets of predicates that hold together
for some element.  Satisfiability is therefore a propositional question
about which types are realized, handed to the CDCL solver in :mod:`sat`.

Two encodings are used.

*Flat* sentences, in which every quantified subformula is closed (the shape
produced by lowering temporal formulas), get one variable per quantified
subformula and one copy of the predicate variables per quantifier, standing
for the type that witnesses it.  Every copy must respect all universal
constraints, so the copies themselves form the realized type set.  This is
exact for any number of predicates.

Other sentences use one variable ``r_t`` per candidate type ``t`` and
expand quantifiers into conjunctions/disjunctions over the candidates.  All
``2^k`` types are candidates when ``k <= k_max``; beyond that only support
types are tried and an unsatisfiable answer becomes Unknown.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from enum import Enum
from itertools import product
from typing import Callable, Iterable, Sequence, TextIO

from .fol import (
    Const,
    Exists,
    FAnd,
    FImplies,
    FNot,
    Fol,
    ForAll,
    FOr,
    Obligation,
    alpha_key,
    check_monadic,
    fchildren,
    free_vars,
    predicates,
)
from .sat import Cnf, SolverBudgetExceeded


class Status(str, Enum):
    SATISFIABLE = "Satisfiable"
    UNSATISFIABLE = "Unsatisfiable"
    THEOREM = "Theorem"
    COUNTER_SATISFIABLE = "CounterSatisfiable"
    CONTRADICTORY_AXIOMS = "ContradictoryAxioms"
    UNKNOWN = "Unknown"

    def __str__(self) -> str:
        return self.value


class BudgetExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class Budget:
    k_max: int = 18
    max_conflicts: int | None = 5_000_000
    # candidate types x sentence size above which the type expansion is refused
    max_cells: int = 20_000_000


@dataclass(frozen=True)
class TypeSet:
    predicates: tuple[str, ...]
    realized: tuple[frozenset[str], ...]

    def __post_init__(self) -> None:
        order = {p: i for i, p in enumerate(self.predicates)}
        key = lambda t: (len(t), sorted(order.get(p, len(order)) for p in t))  # noqa: E731
        object.__setattr__(self, "realized", tuple(sorted(set(self.realized), key=key)))


@dataclass
class Verdict:
    status: Status
    engine: str = "builtin"
    witness: TypeSet | None = None
    elapsed: float = 0.0
    detail: str = ""
    parts: list["Verdict"] = field(default_factory=list)

    @property
    def definitive(self) -> bool:
        return self.status != Status.UNKNOWN


# -- direct semantics ---------------------------------------------------------


def evaluate(f: Fol, types: Sequence[frozenset[str]], env: dict[str, frozenset[str]] | None = None) -> bool:
    """Truth of ``f`` in the structure realizing exactly ``types``."""
    env = env or {}
    if isinstance(f, Const):
        return f.value
    if isinstance(f, FNot):
        return not evaluate(f.arg, types, env)
    if isinstance(f, FAnd):
        return all(evaluate(a, types, env) for a in f.args)
    if isinstance(f, FOr):
        return any(evaluate(a, types, env) for a in f.args)
    if isinstance(f, FImplies):
        return not evaluate(f.lhs, types, env) or evaluate(f.rhs, types, env)
    if isinstance(f, ForAll):
        return all(evaluate(f.body, types, {**env, f.var: t}) for t in types)
    if isinstance(f, Exists):
        return any(evaluate(f.body, types, {**env, f.var: t}) for t in types)
    return f.name in env[f.var]


def holds(sentences: Iterable[Fol], types: Sequence[frozenset[str]]) -> bool:
    return bool(types) and all(evaluate(s, types) for s in sentences)


def model_to_text(witness: TypeSet) -> str:
    """``world1: {a}; world2: {b}`` with predicates in alphabet order."""
    order = {p: i for i, p in enumerate(witness.predicates)}
    parts = []
    for i, t in enumerate(witness.realized, 1):
        names = sorted(t, key=lambda p: (order.get(p, len(order)), p))
        parts.append(f"world{i}: {{{', '.join(names)}}}")
    return "; ".join(parts)


# -- encodings ----------------------------------------------------------------


def is_flat(f: Fol) -> bool:
    """Every quantified subformula is a closed sentence."""
    if isinstance(f, (ForAll, Exists)):
        if free_vars(f):
            return False
    return all(is_flat(c) for c in fchildren(f))


def _gate(cnf: Cnf, f: Fol, leaf: Callable[[Fol], int]) -> int:
    if isinstance(f, Const):
        return cnf.TRUE if f.value else cnf.FALSE
    if isinstance(f, FNot):
        return -_gate(cnf, f.arg, leaf)
    if isinstance(f, FAnd):
        return cnf.and_(_gate(cnf, a, leaf) for a in f.args)
    if isinstance(f, FOr):
        return cnf.or_(_gate(cnf, a, leaf) for a in f.args)
    if isinstance(f, FImplies):
        return cnf.implies(_gate(cnf, f.lhs, leaf), _gate(cnf, f.rhs, leaf))
    return leaf(f)


@dataclass
class Encoding:
    cnf: Cnf
    preds: tuple[str, ...]
    complete: bool
    decode: Callable[[list[bool]], list[frozenset[str]]]
    kind: str


def encode_flat(sentences: Sequence[Fol], preds: tuple[str, ...]) -> Encoding:
    cnf = Cnf()
    nodes: dict[tuple, Fol] = {}

    def collect(f: Fol) -> None:
        for c in fchildren(f):
            collect(c)
        if isinstance(f, (ForAll, Exists)):
            nodes.setdefault(alpha_key(f), f)

    for s in sentences:
        collect(s)
    q = {k: cnf.var(f"q {k!r}") for k in nodes}
    copies = list(nodes) or [None]
    pvar = {c: {p: cnf.var(f"type{j} {p}") for p in preds} for j, c in enumerate(copies)}

    def body(node: Fol, copy) -> int:
        var = node.var  # type: ignore[union-attr]

        def leaf(g: Fol) -> int:
            if isinstance(g, (ForAll, Exists)):
                return q[alpha_key(g)]
            assert g.var == var  # type: ignore[union-attr]
            return pvar[copy][g.name]  # type: ignore[union-attr]

        return _gate(cnf, node.body, leaf)  # type: ignore[union-attr]

    for k, node in nodes.items():
        universal = isinstance(node, ForAll)
        for c in copies:
            b = body(node, c)
            # every realized type obeys true universals and refutes false existentials
            cnf.add([-q[k], b] if universal else [q[k], -b])
        w = body(node, k)
        cnf.add([q[k], -w] if universal else [-q[k], w])

    def top(g: Fol) -> int:
        return q[alpha_key(g)]

    for s in sentences:
        cnf.add([_gate(cnf, s, top)])

    def decode(model: list[bool]) -> list[frozenset[str]]:
        return [frozenset(p for p in preds if model[pvar[c][p]]) for c in copies]

    return Encoding(cnf, preds, True, decode, "flat")


def candidate_types(
    sentences: Sequence[Fol], preds: tuple[str, ...], budget: Budget, support: Iterable[frozenset[str]] = ()
) -> tuple[list[frozenset[str]], bool]:
    """Candidate 1-types and whether they cover every type.

    Types violating a top-level universal whose body decides to false
    regardless of its nested sentences are dropped; such a type can never be
    realized.
    """
    k = len(preds)
    if k <= budget.k_max:
        raw: Iterable[frozenset[str]] = (
            frozenset(p for p, bit in zip(preds, bits) if bit) for bits in product((False, True), repeat=k)
        )
        complete = True
    else:
        pool = {frozenset()} | {frozenset((p,)) for p in preds}
        pool |= {frozenset(t) & frozenset(preds) for t in support}
        raw = sorted(pool, key=lambda t: (len(t), sorted(preds.index(p) for p in t)))
        complete = False
    statics = []
    for s in sentences:
        for conj in s.args if isinstance(s, FAnd) else (s,):
            if isinstance(conj, ForAll):
                statics.append(conj)
    out = [t for t in raw if all(_tri(c.body, c.var, t) is not False for c in statics)]
    return out, complete


def _tri(f: Fol, var: str, t: frozenset[str]) -> bool | None:
    """Three-valued truth of ``f`` for an element of type ``t``; nested
    quantified sentences are unknown (None)."""
    if isinstance(f, Const):
        return f.value
    if isinstance(f, (ForAll, Exists)):
        return None
    if isinstance(f, FNot):
        v = _tri(f.arg, var, t)
        return None if v is None else not v
    if isinstance(f, FImplies):
        return _tri(FOr((FNot(f.lhs), f.rhs)), var, t)
    if isinstance(f, (FAnd, FOr)):
        vals = [_tri(a, var, t) for a in f.args]
        dominant = isinstance(f, FOr)
        if dominant in vals:
            return dominant
        return None if None in vals else not dominant
    if f.var != var:  # type: ignore[union-attr]
        return None
    return f.name in t  # type: ignore[union-attr]


def _size(f: Fol) -> int:
    return 1 + sum(_size(c) for c in fchildren(f))


def encode_types(
    sentences: Sequence[Fol], preds: tuple[str, ...], budget: Budget, support: Iterable[frozenset[str]] = ()
) -> Encoding:
    types, complete = candidate_types(sentences, preds, budget, support)
    cells = len(types) * sum(_size(s) for s in sentences)
    if cells > budget.max_cells:
        raise BudgetExceeded(f"{len(types)} candidate types exceed the expansion budget")
    cnf = Cnf()
    r = [cnf.var("r " + "{" + ",".join(sorted(t)) + "}") for t in types]
    cache: dict[tuple, int] = {}

    def ev(f: Fol, env: dict[str, int]) -> int:
        fv = free_vars(f)
        key = (alpha_key(f), tuple(sorted((v, env[v]) for v in fv)))
        hit = cache.get(key)
        if hit is not None:
            return hit
        if isinstance(f, ForAll):
            lit = cnf.and_(cnf.implies(r[i], ev(f.body, {**env, f.var: i})) for i in range(len(types)))
        elif isinstance(f, Exists):
            lit = cnf.or_(cnf.and_((r[i], ev(f.body, {**env, f.var: i}))) for i in range(len(types)))
        elif isinstance(f, (Const, FNot, FAnd, FOr, FImplies)):
            lit = _gate(cnf, f, lambda g: ev(g, env))
        else:
            lit = cnf.TRUE if f.name in types[env[f.var]] else cnf.FALSE
        cache[key] = lit
        return lit

    cnf.add(r)
    for s in sentences:
        cnf.add([ev(s, {})])

    def decode(model: list[bool]) -> list[frozenset[str]]:
        return [t for t, v in zip(types, r) if model[v]]

    return Encoding(cnf, preds, complete, decode, "types")


# -- decisions ----------------------------------------------------------------


def _preds(sentences: Iterable[Fol]) -> tuple[str, ...]:
    return tuple(dict.fromkeys(p for s in sentences for p in predicates(s)))


def encode(
    sentences: Sequence[Fol], budget: Budget = Budget(), support: Iterable[frozenset[str]] = (), engine: str = "auto"
) -> Encoding:
    for s in sentences:
        check_monadic(s)
    preds = _preds(sentences)
    if engine == "flat" or (engine == "auto" and all(is_flat(s) for s in sentences)):
        return encode_flat(sentences, preds)
    return encode_types(sentences, preds, budget, support)


def minimize(sentences: Sequence[Fol], types: list[frozenset[str]]) -> list[frozenset[str]]:
    """Greedily drop realized types that the sentences do not need."""
    kept = list(dict.fromkeys(types))
    i = len(kept) - 1
    while i >= 0 and len(kept) > 1:
        trial = kept[:i] + kept[i + 1:]
        if holds(sentences, trial):
            kept = trial
        i -= 1
    return kept


def decide_sat(
    sentences: Sequence[Fol],
    budget: Budget = Budget(),
    support: Iterable[frozenset[str]] = (),
    engine: str = "auto",
    cnf_out: TextIO | None = None,
) -> Verdict:
    start = time.perf_counter()
    sentences = list(sentences)
    enc = encode(sentences, budget, support, engine)
    if cnf_out is not None:
        enc.cnf.dimacs(cnf_out)
    try:
        model = enc.cnf.solve(budget.max_conflicts)
    except SolverBudgetExceeded as exc:
        return Verdict(Status.UNKNOWN, elapsed=time.perf_counter() - start, detail=str(exc))
    elapsed = time.perf_counter() - start
    if model is None:
        if enc.complete:
            return Verdict(Status.UNSATISFIABLE, elapsed=elapsed, detail=enc.kind)
        return Verdict(Status.UNKNOWN, elapsed=elapsed, detail="no model among support types")
    types = minimize(sentences, enc.decode(model))
    if not holds(sentences, types):
        raise AssertionError("solver model does not satisfy the sentences")
    return Verdict(
        Status.SATISFIABLE,
        witness=TypeSet(enc.preds, tuple(types)),
        elapsed=time.perf_counter() - start,
        detail=enc.kind,
    )


def decide_entailment(
    axioms: Sequence[Fol], conjecture: Fol, budget: Budget = Budget(), **kw
) -> Verdict:
    start = time.perf_counter()
    base = decide_sat(axioms, budget, **kw)
    if base.status == Status.UNSATISFIABLE:
        return Verdict(Status.CONTRADICTORY_AXIOMS, elapsed=time.perf_counter() - start)
    if base.status == Status.UNKNOWN:
        return Verdict(Status.UNKNOWN, elapsed=time.perf_counter() - start, detail=base.detail)
    refute = decide_sat([*axioms, FNot(conjecture)], budget, **kw)
    elapsed = time.perf_counter() - start
    if refute.status == Status.UNSATISFIABLE:
        return Verdict(Status.THEOREM, elapsed=elapsed)
    if refute.status == Status.SATISFIABLE:
        return Verdict(Status.COUNTER_SATISFIABLE, witness=refute.witness, elapsed=elapsed)
    return Verdict(Status.UNKNOWN, elapsed=elapsed, detail=refute.detail)


def decide_obligation(ob: Obligation, budget: Budget = Budget(), **kw) -> Verdict:
    if ob.conjecture is None:
        return decide_sat(ob.axioms, budget, **kw)
    return decide_entailment(ob.axioms, ob.conjecture, budget, **kw)


# worst first: one failing direction decides an equivalence
_SEVERITY = [
    Status.COUNTER_SATISFIABLE,
    Status.UNKNOWN,
    Status.CONTRADICTORY_AXIOMS,
    Status.THEOREM,
]


def combine(parts: list[Verdict]) -> Verdict:
    """Verdict of a problem made of several obligations (equivalence)."""
    if len(parts) == 1:
        return parts[0]
    worst = min(parts, key=lambda v: _SEVERITY.index(v.status) if v.status in _SEVERITY else 0)
    return Verdict(
        worst.status,
        engine=worst.engine,
        witness=worst.witness,
        elapsed=sum(p.elapsed for p in parts),
        parts=parts,
    )
