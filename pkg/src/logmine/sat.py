"""A small CDCL SAT solver and a Tseitin circuit builder.

Literals are non-zero ints in DIMACS style.  The solver uses two watched
literals, first-UIP clause learning, VSIDS-style activities with a
deterministic tie-break, phase saving and Luby restarts.  Runs are fully
deterministic for a given clause order.
"""
from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from typing import Iterable, TextIO


class SolverBudgetExceeded(RuntimeError):
    pass


def _luby(i: int) -> int:
    """i-th element (from 0) of the Luby sequence 1 1 2 1 1 2 4 ..."""
    size, seq = 1, 0
    while size < i + 1:
        seq += 1
        size = 2 * size + 1
    while size - 1 != i:
        size = (size - 1) >> 1
        seq -= 1
        i %= size
    return 1 << seq


class Solver:
    def __init__(self, nvars: int, clauses: Iterable[Iterable[int]]):
        self.n = nvars
        self.value = [0] * (nvars + 1)  # 1 true, -1 false, 0 unassigned
        self.level = [0] * (nvars + 1)
        self.reason: list[list[int] | None] = [None] * (nvars + 1)
        self.trail: list[int] = []
        self.lim: list[int] = []
        self.watches: dict[int, list[list[int]]] = {}
        for v in range(1, nvars + 1):
            self.watches[v] = []
            self.watches[-v] = []
        self.activity = [0.0] * (nvars + 1)
        self.inc = 1.0
        self.phase = [-1] * (nvars + 1)
        self.heap = [(0.0, v) for v in range(1, nvars + 1)]
        self.ok = True
        self.units: list[int] = []
        self.conflicts = 0
        for c in clauses:
            self._add(list(dict.fromkeys(c)))

    def _add(self, c: list[int]) -> None:
        if not self.ok:
            return
        if any(-l in c for l in c):
            return
        if not c:
            self.ok = False
        elif len(c) == 1:
            self.units.append(c[0])
        else:
            self.watches[-c[0]].append(c)
            self.watches[-c[1]].append(c)

    def _val(self, lit: int) -> int:
        v = self.value[abs(lit)]
        return v if lit > 0 else -v

    def _assign(self, lit: int, reason: list[int] | None) -> None:
        v = abs(lit)
        self.value[v] = 1 if lit > 0 else -1
        self.level[v] = len(self.lim)
        self.reason[v] = reason
        self.trail.append(lit)

    def _propagate(self, qhead: int) -> tuple[list[int] | None, int]:
        trail, value, watches = self.trail, self.value, self.watches
        while qhead < len(trail):
            lit = trail[qhead]
            qhead += 1
            # clauses watching -lit: lit became true, so -lit is false
            ws = watches[lit]
            i = j = 0
            n = len(ws)
            false_lit = -lit
            while i < n:
                c = ws[i]
                i += 1
                if c[0] == false_lit:
                    c[0], c[1] = c[1], c[0]
                first = c[0]
                fv = value[abs(first)]
                if (fv if first > 0 else -fv) == 1:
                    ws[j] = c
                    j += 1
                    continue
                for k in range(2, len(c)):
                    l2 = c[k]
                    v2 = value[abs(l2)]
                    if (v2 if l2 > 0 else -v2) != -1:
                        c[1], c[k] = l2, c[1]
                        watches[-l2].append(c)
                        break
                else:
                    ws[j] = c
                    j += 1
                    if (fv if first > 0 else -fv) == -1:
                        while i < n:
                            ws[j] = ws[i]
                            j += 1
                            i += 1
                        del ws[j:]
                        return c, qhead
                    self._assign(first, c)
            del ws[j:]
        return None, qhead

    def _bump(self, v: int) -> None:
        self.activity[v] += self.inc
        if self.activity[v] > 1e100:
            for u in range(1, self.n + 1):
                self.activity[u] *= 1e-100
            self.inc *= 1e-100
            self.heap = [(-self.activity[u], u) for u in range(1, self.n + 1) if self.value[u] == 0]
            heapq.heapify(self.heap)
        heapq.heappush(self.heap, (-self.activity[v], v))

    def _analyze(self, confl: list[int]) -> tuple[list[int], int]:
        seen = set()
        learnt = [0]
        counter = 0
        cur = len(self.lim)
        idx = len(self.trail) - 1
        clause: list[int] | None = confl
        p = 0
        while True:
            assert clause is not None
            for q in clause:
                if q == p:
                    continue
                v = abs(q)
                if v in seen or self.level[v] == 0:
                    continue
                seen.add(v)
                self._bump(v)
                if self.level[v] == cur:
                    counter += 1
                else:
                    learnt.append(q)
            while abs(self.trail[idx]) not in seen:
                idx -= 1
            p = self.trail[idx]
            idx -= 1
            clause = self.reason[abs(p)]
            seen.discard(abs(p))
            counter -= 1
            if counter == 0:
                break
        learnt[0] = -p
        if len(learnt) == 1:
            return learnt, 0
        # second watch goes to the highest remaining level
        best = max(range(1, len(learnt)), key=lambda k: self.level[abs(learnt[k])])
        learnt[1], learnt[best] = learnt[best], learnt[1]
        return learnt, self.level[abs(learnt[1])]

    def _backtrack(self, lvl: int) -> None:
        if len(self.lim) <= lvl:
            return
        stop = self.lim[lvl]
        for lit in reversed(self.trail[stop:]):
            v = abs(lit)
            self.phase[v] = 1 if lit > 0 else -1
            self.value[v] = 0
            self.reason[v] = None
            heapq.heappush(self.heap, (-self.activity[v], v))
        del self.trail[stop:]
        del self.lim[lvl:]

    def _pick(self) -> int:
        heap = self.heap
        while heap:
            act, v = heapq.heappop(heap)
            if self.value[v] == 0 and -act == self.activity[v]:
                return v
        for v in range(1, self.n + 1):  # stale heap entries only
            if self.value[v] == 0:
                return v
        return 0

    def solve(self, max_conflicts: int | None = None) -> bool:
        """Return True if satisfiable; the model is then in :meth:`model`."""
        if not self.ok:
            return False
        for u in self.units:
            val = self._val(u)
            if val == -1:
                return False
            if val == 0:
                self._assign(u, None)
        confl, qhead = self._propagate(0)
        if confl is not None:
            return False
        restart = 0
        budget = 100 * _luby(restart)
        since = 0
        while True:
            confl, qhead = self._propagate(qhead)
            if confl is not None:
                self.conflicts += 1
                since += 1
                if max_conflicts is not None and self.conflicts > max_conflicts:
                    raise SolverBudgetExceeded(f"more than {max_conflicts} conflicts")
                if not self.lim:
                    return False
                learnt, lvl = self._analyze(confl)
                self._backtrack(lvl)
                qhead = len(self.trail)
                if len(learnt) == 1:
                    self._assign(learnt[0], None)
                else:
                    self.watches[-learnt[0]].append(learnt)
                    self.watches[-learnt[1]].append(learnt)
                    self._assign(learnt[0], learnt)
                self.inc *= 1.05
                continue
            if since >= budget:
                restart += 1
                budget = 100 * _luby(restart)
                since = 0
                self._backtrack(0)
                qhead = len(self.trail)
                continue
            v = self._pick()
            if v == 0:
                return True
            self.lim.append(len(self.trail))
            self._assign(v * self.phase[v], None)

    def model(self) -> list[bool]:
        """Truth value per variable, index 0 unused."""
        return [False] + [self.value[v] == 1 for v in range(1, self.n + 1)]


@dataclass
class Cnf:
    """Clause store with a hash-consed Tseitin builder.

    Gate inputs and outputs are literals; ``TRUE``/``FALSE`` are the
    constant pseudo-literals ``+T``/``-T`` of a dedicated variable.
    """

    nvars: int = 1
    clauses: list[list[int]] = field(default_factory=list)
    meaning: dict[int, str] = field(default_factory=dict)
    _gates: dict[tuple, int] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not self.clauses:
            self.clauses.append([1])
            self.meaning[1] = "true"

    @property
    def TRUE(self) -> int:  # noqa: N802
        return 1

    @property
    def FALSE(self) -> int:  # noqa: N802
        return -1

    def var(self, meaning: str) -> int:
        self.nvars += 1
        self.meaning[self.nvars] = meaning
        return self.nvars

    def add(self, clause: Iterable[int]) -> None:
        c = [l for l in dict.fromkeys(clause) if l != -1]
        if 1 in c or any(-l in c for l in c):
            return
        self.clauses.append(c)

    def and_(self, lits: Iterable[int]) -> int:
        ls = sorted(set(lits), key=lambda l: (abs(l), l))
        if -1 in ls or any(-l in ls for l in ls):
            return -1
        ls = [l for l in ls if l != 1]
        if not ls:
            return 1
        if len(ls) == 1:
            return ls[0]
        key = ("and", tuple(ls))
        g = self._gates.get(key)
        if g is None:
            g = self.var("and")
            self._gates[key] = g
            for l in ls:
                self.clauses.append([-g, l])
            self.clauses.append([g] + [-l for l in ls])
        return g

    def or_(self, lits: Iterable[int]) -> int:
        return -self.and_(-l for l in lits)

    def implies(self, a: int, b: int) -> int:
        return self.or_((-a, b))

    def dimacs(self, out: TextIO) -> None:
        out.write(f"p cnf {self.nvars} {len(self.clauses)}\n")
        for v in sorted(self.meaning):
            if self.meaning[v] not in ("and", "true"):
                out.write(f"c {v} {self.meaning[v]}\n")
        for c in self.clauses:
            out.write(" ".join(map(str, c)) + " 0\n")

    def solve(self, max_conflicts: int | None = None) -> list[bool] | None:
        s = Solver(self.nvars, [list(c) for c in self.clauses])
        return s.model() if s.solve(max_conflicts) else None


def parse_dimacs(text: str) -> tuple[int, list[list[int]]]:
    nvars = 0
    clauses: list[list[int]] = []
    cur: list[int] = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line[0] in "c%":
            continue
        if line.startswith("p"):
            nvars = int(line.split()[2])
            continue
        for tok in line.split():
            lit = int(tok)
            if lit == 0:
                clauses.append(cur)
                cur = []
            else:
                cur.append(lit)
    if cur:
        clauses.append(cur)
    return nvars, clauses
