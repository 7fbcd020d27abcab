"""Command line entry point.

Each stage reads the text artifact of the previous one, so stages pipe::

    logmine mine log.xes | logmine extract | logmine gen > spec.txt
    logmine tptp --kind sat spec.txt | logmine solve
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Sequence

from . import __version__, fol, ltl
from .eventlog import IngestError, load_log
from .miner import discover
from .patterns import PatternSyntaxError, UnsupportedShape, extract, parse_w
from .pipeline import (
    KIND_NAMES,
    ManifestError,
    RunOptions,
    exit_code,
    load_manifest,
    run,
    validate_report,
)
from .prover import ProverNotFound, SpawnFailure, run_external
from .reasoner import Budget, BudgetExceeded, decide_obligation, encode, model_to_text
from .specgen import generate, parse_dump
from .tree import TreeSyntaxError, parse_tree

log = logging.getLogger("logmine")


def _read(src: str) -> str:
    if src == "-":
        return sys.stdin.read()
    return Path(src).read_text(encoding="utf-8")


def cmd_mine(a: argparse.Namespace) -> int:
    csv = {}
    if a.csv_case or a.csv_activity:
        csv = {"case_col": a.csv_case, "activity_col": a.csv_activity}
        if a.csv_time:
            csv["time_col"] = a.csv_time
    print(discover(load_log(a.log, **csv), a.noise))
    return 0


def cmd_extract(a: argparse.Namespace) -> int:
    print(extract(parse_tree(_read(a.input))))
    return 0


def cmd_gen(a: argparse.Namespace) -> int:
    spec = generate(parse_w(_read(a.input)))
    if a.count:
        print(len(spec))
    else:
        sys.stdout.write(spec.dump())
    return 0


def _obligations(a: argparse.Namespace) -> list[fol.Obligation]:
    specs = [parse_dump(_read(p)) for p in a.specs]
    need = 2 if a.kind in ("implies", "equivalent") else 1
    if len(specs) != need:
        raise ValueError(f"--kind {a.kind} takes {need} specification file(s)")
    lowered = [tuple(fol.lower(f) for f in s.formulas) for s in specs]
    rhs = lowered[1] if need == 2 else None
    if a.kind == "requirement":
        if not a.requirement:
            raise ValueError("--requirement is required for --kind requirement")
        req = ltl.parse_requirement(a.requirement, specs[0].alphabet, a.allow_free_atoms)
        rhs = (fol.lower(req),)
    problem = fol.Problem(a.id, KIND_NAMES[a.kind], lowered[0], rhs)
    return fol.assemble(problem)


def cmd_tptp(a: argparse.Namespace) -> int:
    obs = _obligations(a)
    if a.out:
        out = Path(a.out)
        out.mkdir(parents=True, exist_ok=True)
        for ob in obs:
            (out / f"{ob.name}.p").write_text(ob.tptp([f"kind {KIND_NAMES[a.kind]}"]), encoding="utf-8")
            print(out / f"{ob.name}.p")
        return 0
    if len(obs) > 1:
        raise ValueError("an equivalence yields two problems; pass --out DIR")
    sys.stdout.write(obs[0].tptp([f"kind {KIND_NAMES[a.kind]}"]))
    return 0


def cmd_solve(a: argparse.Namespace) -> int:
    text = _read(a.input)
    statements = fol.parse_tptp(text)
    axioms = tuple(s.formula for s in statements if s.role != "conjecture")
    goals = [s.formula for s in statements if s.role == "conjecture"]
    name = Path(a.input).stem if a.input != "-" else "stdin"
    ob = fol.Obligation(name, axioms, fol.fconj(goals) if goals else None)
    if a.prover:
        v = run_external(text, a.prover, a.timeout)
    else:
        budget = Budget(k_max=a.k_max)
        if a.emit_cnf:
            out = Path(a.emit_cnf)
            out.mkdir(parents=True, exist_ok=True)
            with open(out / f"{name}.axioms.cnf", "w") as fh:
                encode(ob.axioms, budget).cnf.dimacs(fh)
            if ob.conjecture is not None:
                with open(out / f"{name}.refute.cnf", "w") as fh:
                    encode([*ob.axioms, fol.FNot(ob.conjecture)], budget).cnf.dimacs(fh)
        v = decide_obligation(ob, budget)
    print(f"% SZS status {v.status.value} for {name}")
    if v.witness:
        print(f"% model: {model_to_text(v.witness)}")
    return 0


def cmd_report(a: argparse.Namespace) -> int:
    report = json.loads(_read(a.report))
    validate_report(report)
    print(f"manifest: {report['manifest']}")
    for s in report["specs"]:
        if s.get("error"):
            print(f"  spec {s['id']}: ERROR {s['error']}")
            continue
        m = s["metrics"]
        print(
            f"  spec {s['id']}: {s['formula_count']} formulas, {m['patterns']} patterns,"
            f" height {m.get('height', '-')}, activities {m.get('activities_no_tau', '-')}"
        )
    width = max((len(p["id"]) for p in report["problems"]), default=0)
    for p in report["problems"]:
        if p["error"]:
            line = f"ERROR {p['error']}"
        else:
            mark = {True: "ok", False: "MISMATCH", None: ""}[p["match"]]
            expect = f" (expected {p['expect']})" if p["expect"] else ""
            line = f"{p['status']}{expect} {mark}".rstrip()
        print(f"  {p['id']:<{width}}  {line}")
    for note in report["assumptions"]:
        print(f"  assumption: {note}")
    s = report["summary"]
    print(f"{s['problems']} problems, {s['matched']} matched, {s['mismatched']} mismatched, {s['errors']} errors")
    return 0


def cmd_run(a: argparse.Namespace) -> int:
    manifest = load_manifest(a.manifest)
    opts = RunOptions(
        noise=a.noise,
        k_max=a.k_max,
        provers=tuple(a.prover) if a.prover else None,
        timeout=a.timeout,
        emit_tptp=Path(a.emit_tptp) if a.emit_tptp else None,
        emit_cnf=Path(a.emit_cnf) if a.emit_cnf else None,
        jobs=a.jobs,
        allow_free_atoms=a.allow_free_atoms,
    )
    report = run(manifest, opts)
    validate_report(report)
    out = Path(a.report or f"{Path(a.manifest).stem}.report.json")
    out.write_text(json.dumps(report, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    for p in report["problems"]:
        status = p["error"] and f"ERROR {p['error']}" or p["status"]
        flag = {True: "ok", False: "MISMATCH", None: ""}[p["match"]] if not p["error"] else ""
        print(f"{p['id']}: {status} {flag}".rstrip())
    s = report["summary"]
    print(f"{s['matched']}/{s['problems']} matched, {s['errors']} errors; report written to {out}")
    return exit_code(report)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="logmine", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"logmine {__version__}")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    m = sub.add_parser("mine", help="event log -> process tree")
    m.add_argument("log")
    m.add_argument("--noise", type=float, default=0.0)
    m.add_argument("--csv-case")
    m.add_argument("--csv-activity")
    m.add_argument("--csv-time")
    m.set_defaults(fn=cmd_mine)

    e = sub.add_parser("extract", help="process tree -> pattern expression")
    e.add_argument("input", nargs="?", default="-")
    e.set_defaults(fn=cmd_extract)

    g = sub.add_parser("gen", help="pattern expression -> specification dump")
    g.add_argument("input", nargs="?", default="-")
    g.add_argument("--count", action="store_true", help="print only the formula count")
    g.set_defaults(fn=cmd_gen)

    t = sub.add_parser("tptp", help="specification dump(s) -> TPTP problem")
    t.add_argument("specs", nargs="+")
    t.add_argument("--kind", choices=sorted(KIND_NAMES), default="sat")
    t.add_argument("--requirement")
    t.add_argument("--allow-free-atoms", action="store_true")
    t.add_argument("--id", default="problem")
    t.add_argument("--out", help="directory for the .p file(s)")
    t.set_defaults(fn=cmd_tptp)

    s = sub.add_parser("solve", help="TPTP problem -> SZS status")
    s.add_argument("input", nargs="?", default="-")
    s.add_argument("--k-max", type=int, default=18)
    s.add_argument("--prover")
    s.add_argument("--timeout", type=float, default=60.0)
    s.add_argument("--emit-cnf")
    s.set_defaults(fn=cmd_solve)

    r = sub.add_parser("run", help="run a problem manifest end to end")
    r.add_argument("manifest")
    r.add_argument("--report", help="report path (default <manifest>.report.json)")
    r.add_argument("--noise", type=float)
    r.add_argument("--k-max", type=int)
    r.add_argument("--prover", action="append")
    r.add_argument("--timeout", type=float)
    r.add_argument("--emit-tptp")
    r.add_argument("--emit-cnf")
    r.add_argument("--jobs", type=int, default=1)
    r.add_argument("--allow-free-atoms", action="store_true")
    r.set_defaults(fn=cmd_run)

    rep = sub.add_parser("report", help="pretty-print a run report")
    rep.add_argument("report")
    rep.set_defaults(fn=cmd_report)
    return p


_USER_ERRORS = (
    OSError,
    IngestError,
    TreeSyntaxError,
    PatternSyntaxError,
    UnsupportedShape,
    ltl.FormulaSyntaxError,
    ltl.UnknownAtom,
    fol.TptpSyntaxError,
    fol.NotMonadic,
    ManifestError,
    ProverNotFound,
    SpawnFailure,
    BudgetExceeded,
    ValueError,
)


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        return args.fn(args)
    except _USER_ERRORS as exc:
        print(f"logmine {args.command}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
