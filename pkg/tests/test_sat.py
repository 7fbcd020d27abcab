import io
import itertools
import random

import pytest

from logmine.sat import Cnf, Solver, SolverBudgetExceeded, _luby, parse_dimacs


def brute(nvars, clauses):
    for bits in itertools.product((False, True), repeat=nvars):
        if all(any(bits[abs(l) - 1] == (l > 0) for l in c) for c in clauses):
            return True
    return False


def random_cnf(rng, nvars, nclauses):
    return [
        [rng.choice((-1, 1)) * rng.randint(1, nvars) for _ in range(rng.randint(1, 3))] for _ in range(nclauses)
    ]


def test_matches_brute_force():
    rng = random.Random(7)
    for _ in range(300):
        n = rng.randint(1, 9)
        clauses = random_cnf(rng, n, rng.randint(1, 5 * n))
        s = Solver(n, clauses)
        sat = s.solve()
        assert sat == brute(n, clauses)
        if sat:
            m = s.model()
            assert all(any(m[abs(l)] == (l > 0) for l in c) for c in clauses)


def test_pigeonhole_unsat():
    # 5 pigeons, 4 holes
    var = lambda p, h: p * 4 + h + 1  # noqa: E731
    clauses = [[var(p, h) for h in range(4)] for p in range(5)]
    for h in range(4):
        for p, q in itertools.combinations(range(5), 2):
            clauses.append([-var(p, h), -var(q, h)])
    assert not Solver(20, clauses).solve()


def test_empty_clause():
    assert not Solver(1, [[]]).solve()


def test_conflict_budget():
    var = lambda p, h: p * 7 + h + 1  # noqa: E731
    clauses = [[var(p, h) for h in range(7)] for p in range(8)]
    for h in range(7):
        for p, q in itertools.combinations(range(8), 2):
            clauses.append([-var(p, h), -var(q, h)])
    with pytest.raises(SolverBudgetExceeded):
        Solver(56, clauses).solve(max_conflicts=10)


def test_luby():
    assert [_luby(i) for i in range(15)] == [1, 1, 2, 1, 1, 2, 4, 1, 1, 2, 1, 1, 2, 4, 8]


def test_gates_and_constants():
    cnf = Cnf()
    a, b = cnf.var("a"), cnf.var("b")
    assert cnf.and_([a, cnf.TRUE]) == a
    assert cnf.and_([a, cnf.FALSE]) == cnf.FALSE
    assert cnf.and_([a, b]) == cnf.and_([b, a])
    cnf.add([cnf.implies(a, b)])
    cnf.add([a])
    m = cnf.solve()
    assert m[a] and m[b]


def test_dimacs_round_trip():
    cnf = Cnf()
    a, b = cnf.var("r_{a}"), cnf.var("r_{b}")
    cnf.add([cnf.or_([a, b])])
    cnf.add([-a])
    buf = io.StringIO()
    cnf.dimacs(buf)
    text = buf.getvalue()
    assert "c 2 r_{a}" in text
    n, clauses = parse_dimacs(text)
    assert n == cnf.nvars and clauses == cnf.clauses
    m = Solver(n, clauses)
    assert m.solve() and m.model()[b]
