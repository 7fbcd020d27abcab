"""Regenerate the two bundled example logs under data/logs/.

Both logs are small and fully determined by the variant tables below; the
script is kept so the XES files can be rebuilt and audited.

    python scripts/make_example_logs.py
"""
from __future__ import annotations

import random
from datetime import datetime, timedelta
from pathlib import Path

from logmine.eventlog import Event, EventLog, Trace, write_xes

ROOT = Path(__file__).resolve().parent.parent / "data" / "logs"

# classic six-case ticket-handling log
RUNNING = [
    ["register request", "examine thoroughly", "check ticket", "decide", "reject request"],
    ["register request", "check ticket", "examine casually", "decide", "pay compensation"],
    ["register request", "examine casually", "check ticket", "decide", "reinitiate request",
     "examine thoroughly", "check ticket", "decide", "pay compensation"],
    ["register request", "check ticket", "examine thoroughly", "decide", "reject request"],
    ["register request", "examine casually", "check ticket", "decide", "reinitiate request",
     "check ticket", "examine casually", "decide", "reinitiate request", "examine casually",
     "check ticket", "decide", "reject request"],
    ["register request", "examine casually", "check ticket", "decide", "pay compensation"],
]

# repair process: every case is registered and analysed, then repaired
# (simple or complex, restarted on failure) and tested, with the user
# possibly informed at any point; most cases are archived; End closes a case.
REPAIR_STEPS = {
    "I": "Inform user",
    "S": "Repair simple",
    "C": "Repair complex",
    "T": "Test repair",
    "X": "Restart repair",
}
# middle part of the case -> (archived cases, unarchived cases)
REPAIR_VARIANTS = {
    "CIT": (1, 0), "CITT": (2, 0), "CIXCT": (3, 0), "CT": (1, 0), "CTTT": (4, 0),
    "CXIC": (1, 0), "CXITS": (1, 0), "CXSTI": (4, 0), "CXSTIXS": (1, 0), "ICXS": (1, 0),
    "IS": (6, 0), "ISXS": (1, 0), "ITTS": (1, 0), "ST": (7, 1), "STIXST": (1, 0),
    "SXC": (6, 1), "SXICT": (1, 0), "SXIS": (1, 0), "TICTT": (1, 0), "TITSXST": (1, 0),
    "TSXICT": (1, 0), "TTIC": (4, 0), "TTSI": (7, 1),
}


def _case(case_id: str, names: list[str], start: datetime, rng: random.Random) -> Trace:
    t = start
    events = []
    for n in names:
        events.append(Event(n.replace(" ", "_"), t, (("lifecycle:transition", "complete"),)))
        t += timedelta(minutes=rng.randint(5, 180))
    return Trace(case_id, tuple(events))


def running_example() -> EventLog:
    rng = random.Random(1)
    base = datetime(2010, 12, 30, 9, 0)
    traces = [_case(str(i + 1), [n.capitalize() for n in names], base + timedelta(days=i), rng)
              for i, names in enumerate(RUNNING)]
    return EventLog(tuple(traces), source="running-example.xes")


def repair_example() -> EventLog:
    rng = random.Random(7)
    cases = []
    for middle, (archived, plain) in REPAIR_VARIANTS.items():
        steps = [REPAIR_STEPS[c] for c in middle]
        cases += [["Register", "Analyse defect", *steps, "Archive repair", "End"]] * archived
        cases += [["Register", "Analyse defect", *steps, "End"]] * plain
    rng.shuffle(cases)
    base = datetime(1970, 1, 2, 8, 0)
    traces = [_case(str(i + 1), names, base + timedelta(hours=6 * i), rng) for i, names in enumerate(cases)]
    return EventLog(tuple(traces), source="repair-example.xes")


def main() -> None:
    ROOT.mkdir(parents=True, exist_ok=True)
    for log in (running_example(), repair_example()):
        with open(ROOT / log.source, "wb") as fh:
            write_xes(log, fh)
        print(f"{log.source}: {len(log.traces)} traces, {log.event_count} events")


if __name__ == "__main__":
    main()
