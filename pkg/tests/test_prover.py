import os
import stat
import sys

import pytest

from logmine.prover import ProverNotFound, parse_szs, resolve, run_external
from logmine.reasoner import Status

PROBLEM = "fof(ax1, axiom, ? [X] : a(X)).\n"


def fake(tmp_path, body, name="fake"):
    path = tmp_path / name
    path.write_text(f"#!{sys.executable}\nimport sys\n{body}\n")
    path.chmod(path.stat().st_mode | stat.S_IEXEC)
    return path


@pytest.mark.parametrize(
    "output, status",
    [
        ("# SZS status Satisfiable for problem\n", Status.SATISFIABLE),
        ("% SZS status Theorem for p\n% SZS status Satisfiable\n", Status.THEOREM),
        ("banner\n% SZS status ContradictoryAxioms for p\n", Status.CONTRADICTORY_AXIOMS),
        ("% SZS status GaveUp for p\n", Status.UNKNOWN),
        ("no status at all\n", Status.UNKNOWN),
    ],
)
def test_parse_szs(output, status):
    assert parse_szs(output)[0] == status


def test_env_override_and_last_argument(tmp_path, monkeypatch):
    script = fake(tmp_path, "text = open(sys.argv[-1]).read()\n"
                            "print('% SZS status ' + ('Satisfiable' if 'a(X)' in text else 'Error'))")
    monkeypatch.setenv("LOGMINE_PROVER_FAKE", str(script))
    assert resolve("fake") == str(script)
    v = run_external(PROBLEM, "fake", timeout=10)
    assert v.status == Status.SATISFIABLE
    assert v.engine == "external(fake)"


def test_exit_status_is_ignored(tmp_path, monkeypatch):
    script = fake(tmp_path, "print('SZS status CounterSatisfiable'); sys.exit(3)")
    monkeypatch.setenv("LOGMINE_PROVER_FAKE", str(script))
    assert run_external(PROBLEM, "fake").status == Status.COUNTER_SATISFIABLE


def test_timeout_is_unknown(tmp_path, monkeypatch):
    script = fake(tmp_path, "import time; time.sleep(30)")
    monkeypatch.setenv("LOGMINE_PROVER_FAKE", str(script))
    v = run_external(PROBLEM, "fake", timeout=0.5)
    assert v.status == Status.UNKNOWN
    assert v.detail == "timeout"


def test_missing_prover(monkeypatch):
    monkeypatch.delenv("LOGMINE_PROVER_NO_SUCH_PROVER", raising=False)
    monkeypatch.setenv("PATH", os.devnull)
    with pytest.raises(ProverNotFound):
        run_external(PROBLEM, "no-such-prover")
