from __future__ import annotations

from pathlib import Path

import pytest

ROOT = Path(__file__).resolve().parents[1]
DATA = ROOT / "data"
LOGS = DATA / "logs"
MANIFESTS = DATA / "manifests"
FIXTURES = Path(__file__).parent / "fixtures"
GOLDEN = Path(__file__).parent / "golden"

RUNNING = LOGS / "running-example.xes"
REPAIR = LOGS / "repair-example.xes"

RUNNING_TREE = (
    "Seq(Register_request, Loop(Seq(And(Check_ticket, Xor(Examine_thoroughly, Examine_casually)), Decide),"
    " Reinitiate_request), Xor(Reject_request, Pay_compensation))"
)
REPAIR_TREE = (
    "Seq(Register, Analyse_defect, And(Xor(tau, Inform_user), And(Xor(tau, Loop(Test_repair, tau)),"
    " Loop(Xor(Repair_simple, Repair_complex), Restart_repair))), Xor(tau, Archive_repair), End)"
)
REPAIR_TREE_HALF = (
    "Seq(Register, Analyse_defect, And(Xor(tau, Inform_user), Seq(Loop(Xor(Repair_simple, Repair_complex),"
    " Restart_repair), Test_repair)), Archive_repair, End)"
)
REPAIR_TREE_FULL = (
    "Seq(Register, Analyse_defect, And(Inform_user, Xor(tau, Loop(Test_repair, tau), Repair_complex)),"
    " Archive_repair, End)"
)
W1 = (
    "Seq3(Register_request, Loop(Seq2(And2(Check_ticket, Xor2(Examine_thoroughly, Examine_casually)), Decide),"
    " Reinitiate_request), Xor2(Reject_request, Pay_compensation))"
)
W2 = (
    "Seq5(Register, Analyse_defect, And2(Xor2(tau1, Inform_user), And2(Xor2(tau2, Loop(Test_repair, tau3)),"
    " Loop(Xor2(Repair_complex, Repair_simple), Restart_repair))), Xor2(tau4, Archive_repair), End)"
)

# criterion number -> (title, {check name: passed})
ACCEPTANCE: dict[int, tuple[str, dict[str, bool]]] = {}


@pytest.fixture
def criterion(request):
    """Record the outcome of one acceptance check under its criterion number."""

    def record(number: int, title: str, check: str, ok: bool) -> bool:
        ACCEPTANCE.setdefault(number, (title, {}))[1][check] = bool(ok)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        title, checks = ACCEPTANCE[number]
        failed = [name for name, ok in checks.items() if not ok]
        verdict = "SKIP" if not checks else "PASS" if not failed else "FAIL"
        detail = f" (failed: {', '.join(failed)})" if failed else ""
        tr.write_line(f"{verdict}  {number:>2}. {title}{detail}")
