"""Manifest-driven runs: build specifications, decide problems, write a report."""
from __future__ import annotations

import json
import re
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any

import jsonschema
import yaml

from . import __version__, fol, ltl
from .eventlog import EventLog, IngestError, load_log
from .miner import discover
from .patterns import PatternExpression, extract, parse_w, pattern_count
from .reasoner import Budget, Status, Verdict, combine, decide_obligation, encode, model_to_text
from .specgen import LogicalSpecification, generate
from .tree import ProcessTree, TreeSyntaxError, metrics, parse_tree

KIND_NAMES = {
    "sat": "Satisfiability",
    "implies": "Entails",
    "equivalent": "Equivalent",
    "requirement": "Requirement",
}
_ARITY = {"sat": 1, "implies": 2, "equivalent": 2, "requirement": 1}


class ManifestError(ValueError):
    pass


@dataclass(frozen=True)
class SpecEntry:
    id: str
    log: Path | None = None
    tree: Path | None = None
    w: str | None = None
    noise: float = 0.0
    csv: dict[str, str] | None = None


@dataclass(frozen=True)
class ProblemEntry:
    id: str
    kind: str
    operands: tuple[str, ...]
    requirement: str | None = None
    allow_free_atoms: bool = False
    expect: str | None = None
    description: str = ""


@dataclass(frozen=True)
class EngineConfig:
    k_max: int = 18
    provers: tuple[str, ...] = ()
    timeout: float = 60.0


@dataclass(frozen=True)
class Manifest:
    path: Path
    specs: tuple[SpecEntry, ...]
    problems: tuple[ProblemEntry, ...]
    engine: EngineConfig = EngineConfig()
    assumptions: tuple[str, ...] = ()


def load_manifest(path: str | Path) -> Manifest:
    """Read and validate a YAML manifest; relative paths resolve against it."""
    path = Path(path)
    try:
        doc = yaml.safe_load(path.read_text(encoding="utf-8"))
    except (OSError, yaml.YAMLError) as exc:
        raise ManifestError(f"cannot read manifest {path}: {exc}") from exc
    if not isinstance(doc, dict) or doc.get("version") != 1:
        raise ManifestError("manifest must be a mapping with 'version: 1'")
    base = path.parent

    specs = []
    for raw in doc.get("specs") or []:
        sources = [k for k in ("log", "tree", "w") if raw.get(k) is not None]
        if len(sources) != 1:
            raise ManifestError(f"spec {raw.get('id')!r} needs exactly one of log, tree, w")
        specs.append(
            SpecEntry(
                id=str(raw["id"]),
                log=base / raw["log"] if raw.get("log") else None,
                tree=base / raw["tree"] if raw.get("tree") else None,
                w=raw.get("w"),
                noise=float(raw.get("noise", 0.0)),
                csv=raw.get("csv"),
            )
        )
    problems = []
    for raw in doc.get("problems") or []:
        kind = raw.get("kind")
        if kind not in KIND_NAMES:
            raise ManifestError(f"problem {raw.get('id')!r}: unknown kind {kind!r}")
        ops = tuple(str(o) for o in raw.get("operands") or ())
        if len(ops) != _ARITY[kind]:
            raise ManifestError(f"problem {raw['id']!r}: {kind} takes {_ARITY[kind]} operand(s)")
        if (kind == "requirement") != bool(raw.get("requirement")):
            raise ManifestError(f"problem {raw['id']!r}: 'requirement' text goes with kind requirement only")
        expect = raw.get("expect")
        if expect is not None and expect not in {s.value for s in Status}:
            raise ManifestError(f"problem {raw['id']!r}: unknown expected status {expect!r}")
        problems.append(
            ProblemEntry(
                id=str(raw["id"]),
                kind=kind,
                operands=ops,
                requirement=raw.get("requirement"),
                allow_free_atoms=bool(raw.get("allow_free_atoms", False)),
                expect=expect,
                description=str(raw.get("description", "")),
            )
        )
    ids = [s.id for s in specs] + [p.id for p in problems]
    dupes = sorted({i for i in ids if ids.count(i) > 1})
    if dupes:
        raise ManifestError(f"duplicate ids: {', '.join(dupes)}")
    known = {s.id for s in specs}
    for p in problems:
        missing = [o for o in p.operands if o not in known]
        if missing:
            raise ManifestError(f"problem {p.id!r}: unknown spec(s) {', '.join(missing)}")
    eng = doc.get("engine") or {}
    engine = EngineConfig(
        k_max=int(eng.get("k_max", 18)),
        provers=tuple(eng.get("provers") or ()),
        timeout=float(eng.get("timeout", 60.0)),
    )
    return Manifest(path, tuple(specs), tuple(problems), engine, tuple(doc.get("assumptions") or ()))


# -- specifications -----------------------------------------------------------


@dataclass
class BuiltSpec:
    entry: SpecEntry
    tree: ProcessTree | None
    w: PatternExpression
    spec: LogicalSpecification
    sentences: tuple[fol.Fol, ...]
    log: EventLog | None = None
    timings: dict[str, float] = field(default_factory=dict)

    def record(self) -> dict[str, Any]:
        artificial = self.log.boundary_markers() if self.log else frozenset()
        m = metrics(self.tree, artificial) if self.tree is not None else {}
        rec: dict[str, Any] = {
            "id": self.entry.id,
            "source": _source(self.entry),
            "tree": str(self.tree) if self.tree is not None else None,
            "w": str(self.w),
            "metrics": {**m, "patterns": pattern_count(self.w)},
            "formula_count": len(self.spec),
            "alphabet": self.spec.alphabet,
            "markers": self.spec.markers,
            "taus": self.spec.taus,
            "formulas": [ltl.to_text(f) for f in self.spec.formulas],
            "timings": self.timings,
            "error": None,
        }
        if self.log is not None:
            rec["log"] = {
                "traces": len(self.log.traces),
                "events": self.log.event_count,
                "activities": len(self.log.activity_alphabet),
                "boundary_markers": sorted(artificial),
            }
        return rec


def _source(e: SpecEntry) -> dict[str, Any]:
    if e.log is not None:
        return {"kind": "log", "path": str(e.log), "noise": e.noise}
    if e.tree is not None:
        return {"kind": "tree", "path": str(e.tree)}
    return {"kind": "w", "text": e.w}


def build_spec(entry: SpecEntry, noise: float | None = None) -> BuiltSpec:
    timings: dict[str, float] = {}
    t0 = time.perf_counter()
    log = None
    tree: ProcessTree | None = None
    reserved: frozenset[str] | tuple = ()
    if entry.log is not None:
        log = load_log(entry.log, **(entry.csv or {}))
        timings["ingest"] = time.perf_counter() - t0
        t0 = time.perf_counter()
        tree = discover(log, entry.noise if noise is None else noise)
        timings["mine"] = time.perf_counter() - t0
        reserved = frozenset(log.activity_alphabet)
    elif entry.tree is not None:
        tree = parse_tree(entry.tree.read_text(encoding="utf-8"))
    t0 = time.perf_counter()
    w = extract(tree) if tree is not None else parse_w(entry.w or "")
    timings["extract"] = time.perf_counter() - t0
    t0 = time.perf_counter()
    spec = generate(w, reserved)
    sentences = tuple(fol.lower(f) for f in spec.formulas)
    timings["generate"] = time.perf_counter() - t0
    return BuiltSpec(entry, tree, w, spec, sentences, log, timings)


# -- problems -----------------------------------------------------------------


def resolve_problem(
    entry: ProblemEntry, specs: dict[str, BuiltSpec], allow_free_atoms: bool = False
) -> tuple[fol.Problem, list[str]]:
    notes: list[str] = []
    ops = [specs[o] for o in entry.operands]
    kind = KIND_NAMES[entry.kind]
    rhs: tuple[fol.Fol, ...] | None = None
    if entry.kind in ("implies", "equivalent"):
        rhs = ops[1].sentences
    elif entry.kind == "requirement":
        alphabet = ops[0].spec.alphabet
        req = ltl.parse_requirement(entry.requirement or "", alphabet, allow_free_atoms or entry.allow_free_atoms)
        raw_atoms = set(ltl.atoms(ltl.parse(entry.requirement or "")))
        if "null" in raw_atoms:
            notes.append(f"{entry.id}: null expands to {' | '.join(ops[0].spec.taus)}")
        free = sorted(a for a in raw_atoms - {"null"} if a not in alphabet)
        if free:
            notes.append(f"{entry.id}: free atom(s) {', '.join(free)} not in {ops[0].entry.id}")
        rhs = (fol.lower(req),)
    return fol.Problem(entry.id, kind, ops[0].sentences, rhs, entry.description), notes


def _verdict_record(v: Verdict) -> dict[str, Any]:
    return {
        "status": v.status.value,
        "witness": model_to_text(v.witness) if v.witness else None,
        "witness_types": [sorted(t) for t in v.witness.realized] if v.witness else None,
        "elapsed": v.elapsed,
    }


@dataclass(frozen=True)
class SolveOptions:
    budget: Budget = Budget()
    provers: tuple[str, ...] = ()
    timeout: float = 60.0
    emit_tptp: Path | None = None
    emit_cnf: Path | None = None


def solve_problem(problem: fol.Problem, opts: SolveOptions) -> dict[str, Any]:
    """Decide one problem with the builtin engine and any external provers."""
    from .prover import ProverNotFound, SpawnFailure, run_external

    start = time.perf_counter()
    obligations = fol.assemble(problem)
    parts = []
    external = []
    for ob in obligations:
        text = ob.tptp([f"kind {problem.kind}"] + ([problem.description] if problem.description else []))
        if opts.emit_tptp is not None:
            opts.emit_tptp.mkdir(parents=True, exist_ok=True)
            (opts.emit_tptp / f"{ob.name}.p").write_text(text, encoding="utf-8")
        if opts.emit_cnf is not None:
            opts.emit_cnf.mkdir(parents=True, exist_ok=True)
            with open(opts.emit_cnf / f"{ob.name}.axioms.cnf", "w") as fh:
                encode(ob.axioms, opts.budget).cnf.dimacs(fh)
            if ob.conjecture is not None:
                with open(opts.emit_cnf / f"{ob.name}.refute.cnf", "w") as fh:
                    encode([*ob.axioms, fol.FNot(ob.conjecture)], opts.budget).cnf.dimacs(fh)
        parts.append(decide_obligation(ob, opts.budget))
        for name in opts.provers:
            try:
                ev = run_external(text, name, opts.timeout)
                external.append({"prover": name, "obligation": ob.name, "status": ev.status.value, "raw": ev.detail})
            except (ProverNotFound, SpawnFailure) as exc:
                external.append({"prover": name, "obligation": ob.name, "status": None, "raw": str(exc)})
    v = combine(parts)
    rec = _verdict_record(v)
    rec["obligations"] = [{"name": ob.name, **_verdict_record(p)} for ob, p in zip(obligations, parts)]
    rec["external"] = external
    combined_ext = {}
    for name in opts.provers:
        statuses = [e["status"] for e in external if e["prover"] == name]
        if statuses and None not in statuses:
            combined_ext[name] = combine([Verdict(Status(s)) for s in statuses]).status.value
    rec["external_combined"] = combined_ext
    rec["elapsed"] = time.perf_counter() - start
    return rec


def _natural(s: str) -> list:
    return [int(t) if t.isdigit() else t for t in re.split(r"(\d+)", s)]


# -- runs ---------------------------------------------------------------------


@dataclass(frozen=True)
class RunOptions:
    noise: float | None = None
    k_max: int | None = None
    provers: tuple[str, ...] | None = None
    timeout: float | None = None
    emit_tptp: Path | None = None
    emit_cnf: Path | None = None
    jobs: int = 1
    allow_free_atoms: bool = False


def run(manifest: Manifest, opts: RunOptions = RunOptions()) -> dict[str, Any]:
    """Execute every spec build and problem; errors become report records."""
    assumptions = list(manifest.assumptions)
    built: dict[str, BuiltSpec] = {}
    spec_records = []
    for entry in manifest.specs:
        try:
            b = build_spec(entry, opts.noise)
            built[entry.id] = b
            spec_records.append(b.record())
        except (OSError, IngestError, TreeSyntaxError, ValueError) as exc:
            spec_records.append({"id": entry.id, "source": _source(entry), "error": f"{type(exc).__name__}: {exc}"})
    if any(r["source"]["kind"] == "log" for r in spec_records) and opts.noise is not None:
        assumptions.append(f"noise overridden to {opts.noise} for every log")

    engine = manifest.engine
    solve_opts = SolveOptions(
        budget=Budget(k_max=opts.k_max if opts.k_max is not None else engine.k_max),
        provers=opts.provers if opts.provers is not None else engine.provers,
        timeout=opts.timeout if opts.timeout is not None else engine.timeout,
        emit_tptp=opts.emit_tptp,
        emit_cnf=opts.emit_cnf,
    )
    records: dict[str, dict[str, Any]] = {}
    pending: list[tuple[ProblemEntry, fol.Problem]] = []
    for entry in manifest.problems:
        base = {
            "id": entry.id,
            "kind": entry.kind,
            "operands": list(entry.operands),
            "requirement": entry.requirement,
            "description": entry.description,
            "expect": entry.expect,
        }
        records[entry.id] = base
        missing = [o for o in entry.operands if o not in built]
        if missing:
            base["error"] = f"operand spec(s) failed to build: {', '.join(missing)}"
            continue
        try:
            problem, notes = resolve_problem(entry, built, opts.allow_free_atoms)
        except ValueError as exc:
            base["error"] = f"{type(exc).__name__}: {exc}"
            continue
        assumptions.extend(notes)
        pending.append((entry, problem))

    def finish(entry: ProblemEntry, rec: dict[str, Any]) -> None:
        base = records[entry.id]
        base.update(rec)
        base["error"] = None
        status = rec["status"]
        base["definitive"] = status != Status.UNKNOWN.value
        base["match"] = None if entry.expect is None else status == entry.expect

    if opts.jobs > 1 and len(pending) > 1:
        with ProcessPoolExecutor(max_workers=opts.jobs) as pool:
            futures = [(e, pool.submit(solve_problem, p, solve_opts)) for e, p in pending]
            for e, fut in futures:
                try:
                    finish(e, fut.result())
                except Exception as exc:  # noqa: BLE001 - one failure must not sink the run
                    records[e.id]["error"] = f"{type(exc).__name__}: {exc}"
    else:
        for e, p in pending:
            try:
                finish(e, solve_problem(p, solve_opts))
            except Exception as exc:  # noqa: BLE001
                records[e.id]["error"] = f"{type(exc).__name__}: {exc}"

    problems = [records[k] for k in sorted(records, key=_natural)]
    for rec in problems:
        rec.setdefault("error", None)
        for key in ("status", "match", "definitive"):
            rec.setdefault(key, None)
    errors = sum(1 for r in spec_records if r.get("error")) + sum(1 for r in problems if r["error"])
    mismatched = sum(1 for r in problems if not r["error"] and (r["match"] is False or not r["definitive"]))
    return {
        "version": 1,
        "tool": f"logmine {__version__}",
        "manifest": str(manifest.path),
        "engine": {
            "k_max": solve_opts.budget.k_max,
            "provers": list(solve_opts.provers),
            "timeout": solve_opts.timeout,
        },
        "assumptions": assumptions,
        "specs": spec_records,
        "problems": problems,
        "summary": {
            "problems": len(problems),
            "matched": sum(1 for r in problems if r["match"] is True),
            "mismatched": mismatched,
            "errors": errors,
        },
    }


def exit_code(report: dict[str, Any]) -> int:
    s = report["summary"]
    if s["errors"]:
        return 2
    return 1 if s["mismatched"] else 0


def schema() -> dict[str, Any]:
    return json.loads(resources.files("logmine").joinpath("report.schema.json").read_text(encoding="utf-8"))


def validate_report(report: dict[str, Any]) -> None:
    jsonschema.validate(report, schema())


TIMING_KEYS = frozenset({"elapsed", "timings"})


def strip_timings(obj: Any) -> Any:
    """Copy of a report without timing fields, for reproducibility checks."""
    if isinstance(obj, dict):
        return {k: strip_timings(v) for k, v in obj.items() if k not in TIMING_KEYS}
    if isinstance(obj, list):
        return [strip_timings(v) for v in obj]
    return obj
