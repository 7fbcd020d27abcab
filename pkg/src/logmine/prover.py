"""Adapter for external TPTP provers reporting SZS statuses."""
from __future__ import annotations

import os
import re
import shutil
import subprocess
import tempfile
import time
from pathlib import Path

from .reasoner import Status, Verdict


class ProverNotFound(RuntimeError):
    pass


class SpawnFailure(RuntimeError):
    pass


# extra arguments per known binary; "{t}" is replaced by the timeout in seconds
PROFILES: dict[str, list[str]] = {
    "eprover": ["--auto", "--tstp-format", "-s", "--cpu-limit={t}"],
    "vampire": ["--mode", "casc", "-t", "{t}"],
}
ALIASES = {"e": "eprover", "E": "eprover", "Vampire": "vampire"}

_SZS = re.compile(r"SZS status\s+([A-Za-z]+)")
_KNOWN = {s.value: s for s in Status}


def resolve(name: str) -> str:
    """Binary for a prover name: ``LOGMINE_PROVER_<NAME>`` first, then PATH."""
    env = os.environ.get(f"LOGMINE_PROVER_{re.sub(r'[^A-Za-z0-9]', '_', name).upper()}")
    if env:
        return env
    binary = ALIASES.get(name, name)
    found = shutil.which(binary)
    if not found:
        raise ProverNotFound(f"prover {name!r} not found on PATH")
    return found


def parse_szs(output: str) -> tuple[Status, str | None]:
    """First SZS status line wins; statuses outside the verdict set map to Unknown."""
    for line in output.splitlines():
        m = _SZS.search(line)
        if m:
            return _KNOWN.get(m.group(1), Status.UNKNOWN), m.group(1)
    return Status.UNKNOWN, None


def run_external(tptp: str, prover: str, timeout: float = 60.0) -> Verdict:
    binary = resolve(prover)
    profile = PROFILES.get(ALIASES.get(prover, prover), PROFILES.get(Path(binary).name, []))
    args = [a.replace("{t}", str(max(1, int(timeout)))) for a in profile]
    with tempfile.TemporaryDirectory() as tmp:
        path = Path(tmp) / "problem.p"
        path.write_text(tptp, encoding="utf-8")
        start = time.perf_counter()
        try:
            # the problem file is always the final argument
            proc = subprocess.run(
                [binary, *args, str(path)], capture_output=True, text=True, timeout=timeout
            )
        except subprocess.TimeoutExpired:
            return Verdict(Status.UNKNOWN, engine=f"external({prover})", elapsed=timeout, detail="timeout")
        except FileNotFoundError as exc:
            raise ProverNotFound(str(exc)) from exc
        except OSError as exc:
            raise SpawnFailure(str(exc)) from exc
    status, raw = parse_szs(proc.stdout + "\n" + proc.stderr)
    return Verdict(
        status,
        engine=f"external({prover})",
        elapsed=time.perf_counter() - start,
        detail=raw or "no SZS status line",
    )
