"""Inductive-Miner style discovery of process trees.

The recursion works on variant multisets (``Counter`` of activity tuples).
At every step the directly-follows graph is noise-filtered *before* cut
detection, cuts are tried in the order exclusive choice, sequence,
parallel, loop, and the log is split with filtering (events that do not fit
the chosen cut are dropped, as in IMf).
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Sequence

import networkx as nx

from .eventlog import EventLog
from .tree import Activity, Node, ProcessTree, Tau, number_taus

Variants = Counter  # Counter[tuple[str, ...]]


@dataclass
class DirectlyFollowsGraph:
    nodes: tuple[str, ...]
    edge_freq: dict[tuple[str, str], int] = field(default_factory=dict)
    start_freq: dict[str, int] = field(default_factory=dict)
    end_freq: dict[str, int] = field(default_factory=dict)

    def successors(self, a: str) -> list[str]:
        return [y for (x, y) in self.edge_freq if x == a]

    def digraph(self) -> nx.DiGraph:
        g = nx.DiGraph()
        g.add_nodes_from(self.nodes)
        g.add_edges_from(self.edge_freq)
        return g


def _variants(log: EventLog | Variants | Iterable[Sequence[str]]) -> Variants:
    if isinstance(log, EventLog):
        return Counter(log.sequences)
    if isinstance(log, Counter):
        return log
    return Counter(tuple(t) for t in log)


def _ordered_alphabet(variants: Variants) -> tuple[str, ...]:
    seen: dict[str, None] = {}
    for trace in variants:
        for a in trace:
            seen.setdefault(a, None)
    return tuple(seen)


def _keep_relative(freq: dict, noise: float) -> dict:
    if not freq or noise <= 0:
        return dict(freq)
    top = max(freq.values())
    return {k: v for k, v in freq.items() if v >= noise * top}


def build_dfg(log: EventLog | Variants | Iterable[Sequence[str]], noise: float = 0.0) -> DirectlyFollowsGraph:
    """Count directly-follows pairs, then drop infrequent ones.

    An edge ``(a, b)`` survives when its count is at least ``noise`` times the
    largest count among edges leaving ``a``.  Start and end activities are
    filtered the same way against their own maxima.
    """
    if not 0.0 <= noise <= 1.0:
        raise ValueError("noise must lie in [0, 1]")
    variants = _variants(log)
    edges: Counter = Counter()
    start: Counter = Counter()
    end: Counter = Counter()
    for trace, n in variants.items():
        if not trace:
            continue
        start[trace[0]] += n
        end[trace[-1]] += n
        for a, b in zip(trace, trace[1:]):
            edges[(a, b)] += n

    kept: dict[tuple[str, str], int] = {}
    by_source: dict[str, dict] = {}
    for (a, b), n in edges.items():
        by_source.setdefault(a, {})[(a, b)] = n
    for outgoing in by_source.values():
        kept.update(_keep_relative(outgoing, noise))
    # deterministic edge order: by first appearance in the counter
    kept = {e: kept[e] for e in edges if e in kept}
    return DirectlyFollowsGraph(
        nodes=_ordered_alphabet(variants),
        edge_freq=kept,
        start_freq=_keep_relative(dict(start), noise),
        end_freq=_keep_relative(dict(end), noise),
    )


# -- cut detection ------------------------------------------------------------


def _order_groups(groups: list[set[str]], nodes: tuple[str, ...]) -> list[set[str]]:
    rank = {a: i for i, a in enumerate(nodes)}
    return sorted(groups, key=lambda g: min(rank[a] for a in g))


def xor_cut(dfg: DirectlyFollowsGraph) -> list[set[str]] | None:
    comps = [set(c) for c in nx.connected_components(dfg.digraph().to_undirected())]
    return _order_groups(comps, dfg.nodes) if len(comps) > 1 else None


def seq_cut(dfg: DirectlyFollowsGraph) -> list[set[str]] | None:
    g = dfg.digraph()
    reach = {a: nx.descendants(g, a) for a in dfg.nodes}

    def reaches(x: set[str], y: set[str]) -> bool:
        return any(reach[a] & y for a in x)

    groups = [set(c) for c in nx.strongly_connected_components(g)]
    merged = True
    while merged:
        merged = False
        for i, j in combinations(range(len(groups)), 2):
            if not reaches(groups[i], groups[j]) and not reaches(groups[j], groups[i]):
                groups[i] |= groups.pop(j)
                merged = True
                break
    if len(groups) < 2:
        return None
    for x, y in combinations(groups, 2):
        if reaches(x, y) == reaches(y, x):
            return None
    # a group that reaches more of the others comes first
    return sorted(groups, key=lambda gr: -sum(reaches(gr, o) for o in groups if o is not gr))


def par_cut(dfg: DirectlyFollowsGraph) -> list[set[str]] | None:
    edges = dfg.edge_freq
    ng = nx.Graph()
    ng.add_nodes_from(dfg.nodes)
    for a, b in combinations(dfg.nodes, 2):
        if not ((a, b) in edges and (b, a) in edges):
            ng.add_edge(a, b)
    groups = _order_groups([set(c) for c in nx.connected_components(ng)], dfg.nodes)
    if len(groups) < 2:
        return None
    start, end = set(dfg.start_freq), set(dfg.end_freq)

    def weight(x: set[str], y: set[str]) -> int:
        return sum(n for (a, b), n in edges.items() if (a in x and b in y) or (a in y and b in x))

    # a component without both a start and an end activity cannot stand on its
    # own; fold it into the component it interacts with most
    while len(groups) > 1:
        lacking = [g for g in groups if not (g & start and g & end)]
        if not lacking:
            break
        g = lacking[0]
        others = [o for o in groups if o is not g]
        target = max(others, key=lambda o: weight(g, o))  # first maximum wins ties
        target |= g
        groups = others
    return groups if len(groups) > 1 else None


def loop_cut(dfg: DirectlyFollowsGraph) -> list[set[str]] | None:
    """Body first, then redo groups.  Body holds every start and end activity."""
    start, end = set(dfg.start_freq), set(dfg.end_freq)
    body = (start | end) & set(dfg.nodes)
    if not body:
        return None
    edges = set(dfg.edge_freq)
    rest = [a for a in dfg.nodes if a not in body]
    if not rest:
        return None
    ug = nx.Graph()
    ug.add_nodes_from(rest)
    ug.add_edges_from((a, b) for a, b in edges if a in ug and b in ug)
    redo = [set(c) for c in nx.connected_components(ug)]

    def valid(comp: set[str]) -> bool:
        into = [(a, b) for a, b in edges if b in comp and a in body]
        out = [(a, b) for a, b in edges if a in comp and b in body]
        if not into or not out:
            return False
        if any(a not in end for a, _ in into) or any(b not in start for _, b in out):
            return False
        for r in {b for _, b in into}:
            if any((e, r) not in edges for e in end):
                return False
        for r in {a for a, _ in out}:
            if any((r, s) not in edges for s in start):
                return False
        return True

    changed = True
    while changed:
        changed = False
        for comp in list(redo):
            if not valid(comp):
                body |= comp
                redo.remove(comp)
                changed = True
    if not redo:
        return None
    return [body] + _order_groups(redo, dfg.nodes)


# -- log splitting ------------------------------------------------------------


def _project(variants: Variants, keep: set[str]) -> Variants:
    out: Counter = Counter()
    for trace, n in variants.items():
        out[tuple(a for a in trace if a in keep)] += n
    return out


def split_xor(variants: Variants, groups: list[set[str]]) -> list[Variants]:
    subs = [Counter() for _ in groups]
    for trace, n in variants.items():
        scores = [sum(a in g for a in trace) for g in groups]
        best = scores.index(max(scores))
        subs[best][tuple(a for a in trace if a in groups[best])] += n
    return subs


def _seq_segments(trace: tuple[str, ...], groups: list[set[str]]) -> list[tuple[str, ...]]:
    """Place group boundaries so that the most events fit their group."""
    m, n = len(groups), len(trace)
    # best[i][j]: events kept among trace[:i] with the i-th event in group <= j
    best = [[0] * m for _ in range(n + 1)]
    for i in range(1, n + 1):
        a = trace[i - 1]
        for j in range(m):
            here = best[i - 1][j] + (a in groups[j])
            best[i][j] = max(here, best[i][j - 1]) if j else here
    segs: list[list[str]] = [[] for _ in groups]
    j = m - 1
    for i in range(n, 0, -1):
        while j > 0 and best[i][j - 1] == best[i][j]:
            j -= 1
        a = trace[i - 1]
        if a in groups[j]:
            segs[j].append(a)
    return [tuple(reversed(s)) for s in segs]


def split_seq(variants: Variants, groups: list[set[str]]) -> list[Variants]:
    subs = [Counter() for _ in groups]
    for trace, n in variants.items():
        for sub, seg in zip(subs, _seq_segments(trace, groups)):
            sub[seg] += n
    return subs


def split_par(variants: Variants, groups: list[set[str]]) -> list[Variants]:
    return [_project(variants, g) for g in groups]


def split_loop(variants: Variants, groups: list[set[str]]) -> list[Variants]:
    body_set = groups[0]
    body: Counter = Counter()
    redo: Counter = Counter()
    for trace, n in variants.items():
        runs: list[tuple[bool, list[str]]] = []
        for a in trace:
            in_body = a in body_set
            if runs and runs[-1][0] == in_body:
                runs[-1][1].append(a)
            else:
                runs.append((in_body, [a]))
        if not runs or not runs[0][0]:
            runs.insert(0, (True, []))
        if not runs[-1][0]:
            runs.append((True, []))
        for in_body, run in runs:
            (body if in_body else redo)[tuple(run)] += n
    return [body, redo]


# -- recursion ----------------------------------------------------------------

_CUTS = (
    ("Xor", xor_cut, split_xor),
    ("Seq", seq_cut, split_seq),
    ("And", par_cut, split_par),
    ("Loop", loop_cut, split_loop),
)


def _find_cut(variants: Variants, noise: float):
    dfg = build_dfg(variants, noise)
    for op, detect, split in _CUTS:
        groups = detect(dfg)
        if groups:
            return op, groups, split
    return None


class _Miner:
    def __init__(self, noise: float):
        self.noise = noise

    def mine(self, variants: Variants) -> ProcessTree:
        variants = +variants  # drop zero counts
        total = sum(variants.values())
        empty = variants.get((), 0)
        if total == 0 or empty == total:
            return Tau()
        if empty:
            rest = Counter({t: n for t, n in variants.items() if t})
            # the empty trace competes with the start activities, like any
            # other start alternative under the relative filter
            starts = Counter()
            for t, n in rest.items():
                starts[t[0]] += n
            if empty >= self.noise * max(starts.values()):
                return Node("Xor", (Tau(), self.mine(rest)))
            variants, total = rest, total - empty

        alphabet = _ordered_alphabet(variants)
        if len(alphabet) == 1:
            a = alphabet[0]
            repeating = sum(n for t, n in variants.items() if len(t) > 1)
            if repeating > self.noise * total:
                return Node("Loop", (Activity(a), Tau()))
            return Activity(a)

        found = _find_cut(variants, self.noise)
        if found:
            return self._recurse(variants, *found)
        return self._fall_through(variants, alphabet)

    def _recurse(self, variants: Variants, op: str, groups: list[set[str]], split) -> ProcessTree:
        subs = split(variants, groups)
        kids = tuple(self.mine(s) for s in subs)
        if op == "Loop" and len(kids) != 2:
            kids = (kids[0], Node("Xor", kids[1:]))
        return Node(op, kids)

    def _fall_through(self, variants: Variants, alphabet: tuple[str, ...]) -> ProcessTree:
        ordered = sorted(alphabet)
        # an activity occurring exactly once in every trace runs in parallel to the rest
        for a in ordered:
            if all(t.count(a) == 1 for t in variants):
                rest = _project(variants, set(alphabet) - {a})
                return Node("And", (Activity(a), self.mine(rest)))
        # an activity whose removal exposes a cut is treated as concurrent
        for a in ordered:
            rest = _project(variants, set(alphabet) - {a})
            if _find_cut(+Counter({t: n for t, n in rest.items() if t}), self.noise):
                return Node("And", (self.mine(_project(variants, {a})), self.mine(rest)))
        return flower(alphabet)


def flower(alphabet: Sequence[str]) -> ProcessTree:
    acts = tuple(Activity(a) for a in alphabet)
    body = acts[0] if len(acts) == 1 else Node("Xor", acts)
    return Node("Loop", (body, Tau()))


def discover(log: EventLog | Variants | Iterable[Sequence[str]], noise: float = 0.0) -> ProcessTree:
    """Discover a process tree; tau leaves are numbered left to right."""
    if not 0.0 <= noise <= 1.0:
        raise ValueError("noise must lie in [0, 1]")
    variants = _variants(log)
    if not any(variants):
        raise ValueError("log has no events")
    return number_taus(_Miner(noise).mine(variants))
