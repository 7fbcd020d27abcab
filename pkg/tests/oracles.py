"""Independent reference implementations used only by the tests."""
from __future__ import annotations

import itertools
from functools import lru_cache

import numpy as np

from logmine import fol
from logmine.tree import Activity, Node, Tau, leaves


# -- tree language membership -------------------------------------------------


def _alphabet(t) -> frozenset[str]:
    return frozenset(leaf.name for leaf in leaves(t) if isinstance(leaf, Activity))


def replays(tree, trace: tuple[str, ...]) -> bool:
    """Brute-force membership of ``trace`` in the language of ``tree``.

    Parallel children must have disjoint alphabets (true for mined trees);
    the trace is then projected on each child.
    """

    @lru_cache(maxsize=None)
    def acc(node, word: tuple[str, ...]) -> bool:
        if isinstance(node, Tau):
            return not word
        if isinstance(node, Activity):
            return word == (node.name,)
        kids = node.children
        if node.op == "Xor":
            return any(acc(c, word) for c in kids)
        if node.op == "Seq":
            if len(kids) == 1:
                return acc(kids[0], word)
            rest = Node("Seq", kids[1:]) if len(kids) > 2 else kids[1]
            return any(acc(kids[0], word[:i]) and acc(rest, word[i:]) for i in range(len(word) + 1))
        if node.op == "And":
            alph = [_alphabet(c) for c in kids]
            assert all(not (a & b) for a, b in itertools.combinations(alph, 2))
            if any(not any(x in a for a in alph) for x in word):
                return False
            return all(acc(c, tuple(x for x in word if x in a)) for c, a in zip(kids, alph))
        body, redo = kids
        # word = body (redo body)*; walk cut points left to right
        n = len(word)
        after_body = {j for j in range(n + 1) if acc(body, word[:j])}
        seen = set(after_body)
        frontier = set(after_body)
        while frontier:
            nxt = set()
            for i in frontier:
                for j in range(i, n + 1):
                    if acc(redo, word[i:j]):
                        for k in range(j, n + 1):
                            if k not in seen and acc(body, word[j:k]):
                                nxt.add(k)
            seen |= nxt
            frontier = nxt
        return n in seen

    return acc(tree, tuple(trace))


# -- monadic model enumeration ------------------------------------------------


class BruteForce:
    """All non-empty sets of 1-types over ``k`` predicates, evaluated at once.

    Row ``m`` of :attr:`realized` says which of the ``2^k`` types model ``m``
    realizes.
    """

    def __init__(self, preds: list[str]):
        self.preds = list(preds)
        k = len(preds)
        self.ntypes = 1 << k
        assert self.ntypes <= 16, "brute force is limited to 4 predicates"
        nmodels = (1 << self.ntypes) - 1
        ids = np.arange(1, nmodels + 1, dtype=np.int64)
        self.realized = ((ids[:, None] >> np.arange(self.ntypes)) & 1).astype(bool)
        self._memo: dict = {}

    def type_has(self, t: int, pred: str) -> bool:
        return bool((t >> self.preds.index(pred)) & 1)

    def eval(self, f: fol.Fol, env: dict[str, int] | None = None) -> np.ndarray:
        env = env or {}
        key = (f, tuple(sorted((v, env[v]) for v in fol.free_vars(f))))
        hit = self._memo.get(key)
        if hit is None:
            hit = self._memo[key] = self._eval(f, env)
        return hit

    def _eval(self, f: fol.Fol, env: dict[str, int]) -> np.ndarray:
        n = self.realized.shape[0]
        if isinstance(f, fol.Const):
            return np.full(n, f.value)
        if isinstance(f, fol.Pred):
            return np.full(n, self.type_has(env[f.var], f.name))
        if isinstance(f, fol.FNot):
            return ~self.eval(f.arg, env)
        if isinstance(f, fol.FAnd):
            out = np.ones(n, bool)
            for a in f.args:
                out &= self.eval(a, env)
            return out
        if isinstance(f, fol.FOr):
            out = np.zeros(n, bool)
            for a in f.args:
                out |= self.eval(a, env)
            return out
        if isinstance(f, fol.FImplies):
            return ~self.eval(f.lhs, env) | self.eval(f.rhs, env)
        if isinstance(f, fol.ForAll):
            out = np.ones(n, bool)
            for t in range(self.ntypes):
                out &= ~self.realized[:, t] | self.eval(f.body, {**env, f.var: t})
            return out
        out = np.zeros(n, bool)
        for t in range(self.ntypes):
            out |= self.realized[:, t] & self.eval(f.body, {**env, f.var: t})
        return out

    def satisfiable(self, sentences: list[fol.Fol]) -> bool:
        ok = np.ones(self.realized.shape[0], bool)
        for s in sentences:
            ok &= self.eval(s)
        return bool(ok.any())

    def models(self, sentences: list[fol.Fol]) -> list[frozenset[frozenset[str]]]:
        ok = np.ones(self.realized.shape[0], bool)
        for s in sentences:
            ok &= self.eval(s)
        out = []
        for row in self.realized[ok]:
            out.append(
                frozenset(
                    frozenset(p for p in self.preds if self.type_has(t, p)) for t in range(self.ntypes) if row[t]
                )
            )
        return out


def check_model(sentences, types) -> bool:
    """Plain recursive truth check, written separately from the reasoner."""
    types = [frozenset(t) for t in types]

    def ev(f, env):
        if isinstance(f, fol.Const):
            return f.value
        if isinstance(f, fol.Pred):
            return f.name in env[f.var]
        if isinstance(f, fol.FNot):
            return not ev(f.arg, env)
        if isinstance(f, fol.FAnd):
            return all(ev(a, env) for a in f.args)
        if isinstance(f, fol.FOr):
            return any(ev(a, env) for a in f.args)
        if isinstance(f, fol.FImplies):
            return (not ev(f.lhs, env)) or ev(f.rhs, env)
        vals = (ev(f.body, {**env, f.var: t}) for t in types)
        return all(vals) if isinstance(f, fol.ForAll) else any(vals)

    return bool(types) and all(ev(s, {}) for s in sentences)


# -- random sentences of the monadic fragment ---------------------------------


def random_sentence(rng, preds, depth: int = 3, nested: bool = True) -> fol.Fol:
    """A closed sentence; with ``nested`` quantifiers may mention outer variables."""
    counter = itertools.count(1)

    def form(bound: list[str], d: int) -> fol.Fol:
        choices = ["q"] if not bound else ["pred", "pred", "not", "and", "or", "imp", "q"]
        if d <= 0:
            choices = ["pred"] if bound else ["q"]
        kind = rng.choice(choices)
        if kind == "pred":
            # a flat sentence only refers to the innermost variable
            var = rng.choice(bound) if nested else bound[-1]
            return fol.Pred(rng.choice(preds), var)
        if kind == "not":
            return fol.FNot(form(bound, d - 1))
        if kind in ("and", "or"):
            args = tuple(form(bound, d - 1) for _ in range(rng.randint(2, 3)))
            return (fol.FAnd if kind == "and" else fol.FOr)(args)
        if kind == "imp":
            return fol.FImplies(form(bound, d - 1), form(bound, d - 1))
        v = f"V{next(counter)}"
        q = rng.choice((fol.ForAll, fol.Exists))
        return q(v, form((bound if nested else []) + [v], d - 1))

    return form([], depth)
