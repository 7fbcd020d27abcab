import random
import re

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import FIXTURES, GOLDEN, W1, W2
from logmine import ltl
from logmine.patterns import PATTERNS, Instances, PatternApp, extract, parse_w, walk
from logmine.specgen import TEMPLATES, generate, instantiate, parse_dump
from logmine.tree import Node, parse_tree

_UNICODE = {"□": " [] ", "◇": " <> ", "¬": " ! ", "∧": " & ", "∨": " | ", "→": " -> "}


def from_unicode(text):
    return ltl.parse(re.sub("[□◇¬∧∨→]", lambda m: _UNICODE[m.group()], text))


def split_top(text):
    out, depth, cur = [], 0, ""
    for ch in text:
        if ch == "," and depth == 0:
            out.append(cur.strip())
            cur = ""
            continue
        depth += ch in "(⟨"
        depth -= ch in ")⟩"
        cur += ch
    return out + [cur.strip()]


def load_table():
    table = {}
    for line in (FIXTURES / "pattern_templates.txt").read_text(encoding="utf-8").splitlines():
        if not line.strip() or line.startswith("#"):
            continue
        head, body = line.split(" = ")
        name, params = re.fullmatch(r"(\w+)\((.*)\)", head).groups()
        items = split_top(body.strip()[1:-1])
        table[name] = {
            "params": params.split(","),
            "entry": items[0],
            "exit": items[1],
            "formulas": [from_unicode(f) for f in items[2:]],
        }
    return table


TABLE = load_table()


def atomic_instance(name):
    """The pattern over atoms named like its formal parameters, markers renamed to s/e."""
    row = TABLE[name]
    args = [p for p in row["params"] if p not in PATTERNS[name].markers]
    w = parse_w(f"{name}({', '.join(args)})")
    slots = Instances(w).markers[()]
    rename = {v: k for k, v in slots.items()}
    spec = generate(w)
    return w, slots, [ltl.map_atoms(f, lambda n, _u: ltl.Atom(rename.get(n, n))) for f in spec.formulas]


def test_fixture_covers_every_pattern():
    assert set(TABLE) == set(TEMPLATES)


@pytest.mark.parametrize("name", sorted(TABLE))
def test_formula_count_law(name):
    _, _, formulas = atomic_instance(name)
    assert len(formulas) == len(TABLE[name]["formulas"])


@pytest.mark.parametrize("name", sorted(TABLE))
def test_formulas_match_table(name):
    _, _, formulas = atomic_instance(name)
    assert set(formulas) == set(TABLE[name]["formulas"])


@pytest.mark.parametrize("name", sorted(TABLE))
def test_entry_exit_match_table(name):
    w, slots, _ = atomic_instance(name)
    inst = Instances(w)
    back = {v: k for k, v in slots.items()}
    assert back.get(inst.entry(), inst.entry()) == TABLE[name]["entry"]
    assert back.get(inst.exit(), inst.exit()) == TABLE[name]["exit"]


def test_seq2_exact():
    spec = generate(parse_w("Seq2(a, b)"))
    assert [ltl.to_unicode(f) for f in spec.formulas] == ["◇a", "□(a → ◇b)", "□¬(a ∧ b)"]


def test_xor2_count():
    assert len(generate(parse_w("Xor2(a, b)"))) == 9


def test_atom_yields_sometime():
    spec = generate(parse_w("a"))
    assert spec.formulas == [ltl.Sometime(ltl.Atom("a"))]


@pytest.mark.parametrize("w, golden", [(W1, "w1.spec"), (W2, "w2.spec")])
def test_golden_dumps(w, golden):
    assert generate(parse_w(w)).dump() == (GOLDEN / golden).read_text(encoding="utf-8")


def test_running_example_count_within_tolerance():
    n = len(generate(parse_w(W1)))
    assert abs(n - 36) <= 3.6


def test_dump_round_trip():
    spec = generate(parse_w(W2))
    back = parse_dump(spec.dump())
    assert back.formulas == spec.formulas
    assert back.provenance == spec.provenance


def test_nested_argument_binding():
    # a pattern on the left hands over its exit, one on the right its entry
    w = parse_w("Seq2(Xor2(a, b), c)")
    inst = Instances(w)
    s, e = inst.markers[(0,)]["s"], inst.markers[(0,)]["e"]
    texts = {ltl.to_text(f) for f in generate(w).formulas}
    assert f"F({s})" in texts
    assert f"G({e} -> F(c))" in texts
    assert "F(a)" not in texts
    w = parse_w("Seq2(c, Xor2(a, b))")
    s = Instances(w).markers[(1,)]["s"]
    assert f"G(c -> F({s}))" in {ltl.to_text(f) for f in generate(w).formulas}


def trees():
    leaf = st.sampled_from(["a", "b", "c", "d", "e", "tau"]).map(parse_tree)

    def extend(children):
        ops = st.sampled_from(["Seq", "Xor", "And"])
        wide = st.tuples(ops, st.lists(children, min_size=2, max_size=6)).map(lambda p: Node(p[0], tuple(p[1])))
        lp = st.tuples(children, children).map(lambda p: Node("Loop", p))
        return wide | lp

    return st.recursive(leaf, extend, max_leaves=14).map(extract)


@given(trees())
def test_idempotent(w):
    a, b = generate(w), generate(w)
    assert a.formulas == b.formulas and a.provenance == b.provenance


@given(trees())
def test_alphabet_closure(w):
    spec = generate(w, reserved={"a", "z"})
    allowed = {a.name for _, a in walk(w) if not isinstance(a, PatternApp)} | set(spec.markers)
    assert set(spec.alphabet) <= allowed
    assert not set(spec.markers) & {"a", "z"}


@given(trees(), st.randoms(use_true_random=False))
def test_compositional(w, rnd: random.Random):
    pairs = instantiate(w)
    if isinstance(w, PatternApp):
        # every instance contributes its tuple; only the root keeps the opening formula
        expected = sum(len(TABLE[n.pattern]["formulas"]) - (1 if p else 0) for p, n in walk(w) if isinstance(n, PatternApp))
        assert len(pairs) == expected
    rnd.shuffle(pairs)
    assert set(f for f, _ in pairs) == set(generate(w).formulas)
    spec = generate(w)
    assert len(spec.formulas) == len(set(spec.formulas))
    assert sum(len(p) for p in spec.provenance) == len(pairs)
