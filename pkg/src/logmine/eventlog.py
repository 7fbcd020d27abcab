"""Event log ingestion: XES and CSV into an in-memory :class:`EventLog`."""
from __future__ import annotations

import csv
import io
import logging
import re
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from datetime import datetime
from pathlib import Path
from typing import BinaryIO, Iterable

log = logging.getLogger(__name__)

_WS = re.compile(r"\s+")


class IngestError(Exception):
    pass


class MalformedXml(IngestError):
    pass


class EmptyLog(IngestError):
    pass


class MissingColumn(IngestError):
    pass


def normalize_activity(name: str) -> str:
    """Trim and map internal whitespace runs to ``_``; case is preserved."""
    return _WS.sub("_", name.strip())


@dataclass(frozen=True)
class Event:
    activity: str
    timestamp: datetime | None = None
    attributes: tuple[tuple[str, str], ...] = ()

    def attr(self, key: str, default: str | None = None) -> str | None:
        for k, v in self.attributes:
            if k == key:
                return v
        return default


@dataclass(frozen=True)
class Trace:
    case_id: str
    events: tuple[Event, ...]

    @property
    def activities(self) -> tuple[str, ...]:
        return tuple(e.activity for e in self.events)


@dataclass(frozen=True)
class EventLog:
    traces: tuple[Trace, ...]
    source: str = ""
    skipped_events: int = 0
    activity_alphabet: tuple[str, ...] = field(init=False)

    def __post_init__(self) -> None:
        if not self.traces:
            raise EmptyLog("log contains no traces")
        seen: dict[str, None] = {}
        for t in self.traces:
            for e in t.events:
                seen.setdefault(e.activity, None)
        object.__setattr__(self, "activity_alphabet", tuple(seen))

    @property
    def sequences(self) -> list[tuple[str, ...]]:
        return [t.activities for t in self.traces]

    @property
    def event_count(self) -> int:
        return sum(len(t.events) for t in self.traces)

    def boundary_markers(self) -> frozenset[str]:
        """Artificial ``Start``/``End`` activities framing every trace.

        An activity counts as artificial when it is named Start or End
        (case-insensitive), occurs exactly once per trace, and always sits at
        the first (Start) or last (End) position.
        """
        found = set()
        for name in self.activity_alphabet:
            low = name.lower()
            if low not in ("start", "end"):
                continue
            pos = 0 if low == "start" else -1
            if all(t.activities.count(name) == 1 and t.activities[pos] == name for t in self.traces):
                found.add(name)
        return frozenset(found)


def _parse_ts(value: str | None) -> datetime | None:
    if not value:
        return None
    try:
        return datetime.fromisoformat(value.replace("Z", "+00:00"))
    except ValueError:
        return None


def _order(events: list[Event]) -> list[Event]:
    if events and all(e.timestamp is not None for e in events):
        # sorted() is stable, so equal instants keep document order
        try:
            return sorted(events, key=lambda e: e.timestamp)
        except TypeError:  # naive/aware mix
            return events
    return events


def _local(tag: str) -> str:
    return tag.rsplit("}", 1)[-1]


def parse_xes(source: BinaryIO | bytes | str | Path, name: str | None = None) -> EventLog:
    """Parse an XES document.

    ``source`` may be raw bytes, a binary stream or a filesystem path.
    Events without a ``concept:name`` string attribute are skipped and
    counted in :attr:`EventLog.skipped_events`.
    """
    if isinstance(source, (str, Path)):
        name = name or str(source)
        with open(source, "rb") as fh:
            data = fh.read()
    elif isinstance(source, bytes):
        data = source
    else:
        data = source.read()
    try:
        root = ET.fromstring(data)
    except ET.ParseError as exc:
        raise MalformedXml(str(exc)) from exc

    traces: list[Trace] = []
    skipped = 0
    for i, tnode in enumerate(el for el in root if _local(el.tag) == "trace"):
        case_id = str(i)
        events: list[Event] = []
        for child in tnode:
            tag = _local(child.tag)
            if tag == "string" and child.get("key") == "concept:name":
                case_id = child.get("value", case_id)
            elif tag == "event":
                activity = None
                ts = None
                attrs = []
                for a in child:
                    key, value = a.get("key"), a.get("value")
                    if key is None or value is None:
                        continue
                    if key == "concept:name" and _local(a.tag) == "string":
                        activity = normalize_activity(value)
                    elif key == "time:timestamp":
                        ts = _parse_ts(value)
                    else:
                        attrs.append((key, value))
                if not activity:
                    skipped += 1
                    continue
                events.append(Event(activity, ts, tuple(attrs)))
        if events:
            traces.append(Trace(case_id, tuple(_order(events))))
    if skipped:
        log.warning("skipped %d events without concept:name", skipped)
    if not traces:
        raise EmptyLog("log contains no events")
    return EventLog(tuple(traces), source=name or "", skipped_events=skipped)


def parse_csv(
    source: BinaryIO | bytes | str | Path,
    case_col: str,
    activity_col: str,
    time_col: str | None = None,
    name: str | None = None,
) -> EventLog:
    """Parse a comma-separated log with a header row, grouping rows by case."""
    if isinstance(source, (str, Path)):
        name = name or str(source)
        with open(source, "rb") as fh:
            data = fh.read()
    elif isinstance(source, bytes):
        data = source
    else:
        data = source.read()
    reader = csv.reader(io.StringIO(data.decode("utf-8-sig")))
    try:
        header = next(reader)
    except StopIteration:
        raise EmptyLog("empty CSV input") from None
    dupes = sorted({h for h in header if header.count(h) > 1})
    if dupes:
        raise MissingColumn(f"ambiguous duplicate header(s): {', '.join(dupes)}")
    wanted = [case_col, activity_col] + ([time_col] if time_col else [])
    for col in wanted:
        if col not in header:
            raise MissingColumn(f"column {col!r} not found in header {header}")
    ci, ai = header.index(case_col), header.index(activity_col)
    ti = header.index(time_col) if time_col else None

    cases: dict[str, list[Event]] = {}
    for row in reader:
        if not row or all(not c.strip() for c in row):
            continue
        activity = normalize_activity(row[ai])
        if not activity:
            continue
        ts = _parse_ts(row[ti]) if ti is not None else None
        attrs = tuple((h, v) for j, (h, v) in enumerate(zip(header, row)) if j not in (ci, ai, ti))
        cases.setdefault(row[ci], []).append(Event(activity, ts, attrs))
    if not cases:
        raise EmptyLog("CSV contains no events")
    traces = tuple(Trace(cid, tuple(_order(evs))) for cid, evs in cases.items())
    return EventLog(traces, source=name or "")


def from_sequences(seqs: Iterable[Iterable[str]], source: str = "") -> EventLog:
    """Build a log from plain activity sequences (test and tooling helper)."""
    traces = []
    for i, seq in enumerate(seqs):
        events = tuple(Event(normalize_activity(a)) for a in seq)
        if events:
            traces.append(Trace(str(i), events))
    if not traces:
        raise EmptyLog("no non-empty sequences")
    return EventLog(tuple(traces), source=source)


def load_log(path: str | Path, **csv_options: str) -> EventLog:
    """Dispatch on file extension: ``.xes`` or ``.csv``."""
    p = Path(path)
    if p.suffix.lower() == ".csv":
        return parse_csv(p, **csv_options)
    return parse_xes(p)


def write_xes(log_: EventLog, fh: BinaryIO) -> None:
    """Serialize a log in the minimal XES layout accepted by :func:`parse_xes`."""
    root = ET.Element("log", {"xes.version": "1.0", "xmlns": "http://www.xes-standard.org/"})
    for t in log_.traces:
        tn = ET.SubElement(root, "trace")
        ET.SubElement(tn, "string", key="concept:name", value=t.case_id)
        for e in t.events:
            en = ET.SubElement(tn, "event")
            ET.SubElement(en, "string", key="concept:name", value=e.activity.replace("_", " "))
            for k, v in e.attributes:
                ET.SubElement(en, "string", key=k, value=v)
            if e.timestamp is not None:
                ET.SubElement(en, "date", key="time:timestamp", value=e.timestamp.isoformat())
    ET.indent(root)
    fh.write(b'<?xml version="1.0" encoding="UTF-8"?>\n')
    fh.write(ET.tostring(root, encoding="utf-8"))
    fh.write(b"\n")
