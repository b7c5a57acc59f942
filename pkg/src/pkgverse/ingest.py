"""Parsers turning raw ecosystem data into event streams.

Three input families are supported, all file-based:

* package manifests (package.json-like documents),
* registry dump CSVs (libraries.io-style, column mapping configurable),
* contribution records (NDJSON of pull requests / issues / discussions),

plus the bundled table describing well-known package registries. Parsers
are streaming and pure per record: a registry dump is converted row by row
with memory bounded by the row, never the file. Records that cannot be
converted are yielded as :class:`Quarantined` items so a single bad row
cannot poison a large ingest.

Use-edges in the event schema name a concrete ``(name, release)`` target.
Dependency declarations, however, carry *ranges*; these are emitted
verbatim as the target release label. Exact pins therefore link up at
replay time, while range-valued requirements surface in the replay
quarantine as unresolvable references (they remain fully analyzable via
the resolver, which works on manifests, not on the log). Resolving ranges
at replay time instead would require a second pass and break the property
that replaying a concatenation equals replaying the parts in order.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

from .errors import CsvError, InvalidTimestamp, MissingField, ParseError
from .eventlog import EcosystemEvent, contribution_event, unit_event, use_event
from .semver import VersionRange

__all__ = [
    "Manifest",
    "RegistryInfo",
    "ColumnMap",
    "Quarantined",
    "parse_timestamp",
    "parse_manifest",
    "manifest_to_json",
    "manifest_events",
    "parse_registry_dump",
    "parse_contribution_events",
    "load_registry_table",
    "registry_info",
]

DEPENDENCY_SECTIONS = (
    "dependencies",
    "devDependencies",
    "peerDependencies",
    "optionalDependencies",
)


@dataclass(frozen=True)
class Quarantined:
    """A record that could not be converted, with its location and reason."""

    source: str
    line_no: int
    reason: str
    record: object


def parse_timestamp(value) -> int:
    """Normalize epoch seconds or ISO-8601 text to UTC epoch seconds."""
    if isinstance(value, bool):
        raise InvalidTimestamp(f"not a timestamp: {value!r}")
    if isinstance(value, (int, float)):
        return int(value)
    if isinstance(value, str):
        text = value.strip()
        if not text:
            raise InvalidTimestamp("empty timestamp")
        try:
            return int(text)
        except ValueError:
            pass
        if text.endswith(" UTC"):  # registry-dump style: 2015-03-17 22:05:49 UTC
            text = text[:-4]
        if text.endswith(("Z", "z")):
            text = text[:-1] + "+00:00"
        try:
            dt = datetime.fromisoformat(text)
        except ValueError:
            raise InvalidTimestamp(f"not a timestamp: {value!r}") from None
        if dt.tzinfo is None:
            dt = dt.replace(tzinfo=timezone.utc)
        return int(dt.timestamp())
    raise InvalidTimestamp(f"not a timestamp: {value!r}")


# --- manifests ---------------------------------------------------------------


@dataclass(frozen=True)
class Manifest:
    """Parsed dependency declaration of one released unit."""

    name: str
    release: str
    dependencies: tuple[tuple[str, VersionRange], ...]

    def dependency_names(self) -> set[str]:
        return {name for name, _ in self.dependencies}


def _reject_duplicate_keys(pairs):
    seen = set()
    for key, _ in pairs:
        if key in seen:
            raise ParseError(f"duplicate key {key!r}")
        seen.add(key)
    return dict(pairs)


def parse_manifest(data: bytes | str, sections: tuple[str, ...] = ("dependencies",)) -> Manifest:
    """Parse a package.json-like document.

    Only the named dependency ``sections`` are read (runtime dependencies
    by default); unknown fields are ignored. Duplicate JSON keys are
    rejected — a manifest with two entries for one dependency is ambiguous.
    """
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    try:
        doc = json.loads(data, object_pairs_hook=_reject_duplicate_keys)
    except json.JSONDecodeError as exc:
        raise ParseError(f"malformed JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise ParseError("manifest must be a JSON object")
    name = doc.get("name")
    release = doc.get("version")
    if not isinstance(name, str) or not name:
        raise MissingField("manifest has no name")
    if not isinstance(release, str) or not release:
        raise MissingField("manifest has no version")
    deps: list[tuple[str, VersionRange]] = []
    for section in sections:
        if section not in DEPENDENCY_SECTIONS:
            raise ValueError(f"unknown dependency section {section!r}")
        block = doc.get(section)
        if block is None:
            continue
        if not isinstance(block, dict):
            raise ParseError(f"section {section!r} must be an object")
        for dep_name, requirement in block.items():
            if not isinstance(requirement, str):
                raise ParseError(f"requirement of {dep_name!r} must be a string")
            deps.append((dep_name, VersionRange.parse(requirement)))
    names = [n for n, _ in deps]
    if len(names) != len(set(names)):
        raise ParseError("dependency declared in multiple sections")
    return Manifest(name=name, release=release, dependencies=tuple(deps))


def manifest_to_json(manifest: Manifest) -> str:
    """Serialize back to a minimal package.json-like document; feeding the
    output to :func:`parse_manifest` yields an equal manifest."""
    doc = {
        "name": manifest.name,
        "version": manifest.release,
        "dependencies": {name: rng.raw or str(rng) for name, rng in manifest.dependencies},
    }
    return json.dumps(doc, indent=2)


def manifest_events(manifest: Manifest, time: int) -> list[EcosystemEvent]:
    """Events declaring the manifest's unit and its dependency edges.

    Targets carry the declared requirement verbatim as the release label
    (see module docstring for the linking semantics).
    """
    events = [unit_event(manifest.name, manifest.release, time)]
    for dep_name, rng in manifest.dependencies:
        events.append(
            use_event((manifest.name, manifest.release), (dep_name, rng.raw or str(rng)))
        )
    return events


# --- registry dumps -----------------------------------------------------------


@dataclass(frozen=True)
class ColumnMap:
    """Names of the CSV columns a registry dump uses (libraries.io-style
    defaults). Dependency columns are optional per row."""

    platform: str = "platform"
    name: str = "name"
    version: str = "version"
    released_at: str = "released_at"
    dep_name: str = "dep_name"
    dep_requirement: str = "dep_requirement"


def parse_registry_dump(reader, mapping: ColumnMap | None = None, source: str = "<dump>"):
    """Stream a registry dump CSV into events.

    Every row bearing a new (name, version) yields a unit event; every row
    with a dependency column yields a use event. Consecutive rows for the
    same (name, version) — the usual layout for multi-dependency packages —
    emit the unit once. Rows with an unparsable timestamp are yielded as
    :class:`Quarantined` items. Raises :class:`CsvError` on structurally
    broken CSV (e.g. no header).
    """
    mapping = mapping or ColumnMap()
    rows = csv.DictReader(reader)
    if rows.fieldnames is None:
        raise CsvError(f"{source}: empty file, expected a header row")
    required = (mapping.name, mapping.version, mapping.released_at)
    for column in required:
        if column not in rows.fieldnames:
            raise CsvError(f"{source}: missing column {column!r}")
    has_deps = mapping.dep_name in rows.fieldnames
    previous_key = None
    for row_no, row in enumerate(rows, start=2):
        if None in row:
            yield Quarantined(source, row_no, "CsvError", f"row has extra fields: {row[None]!r}")
            continue
        name = (row.get(mapping.name) or "").strip()
        version = (row.get(mapping.version) or "").strip()
        if not name or not version:
            yield Quarantined(source, row_no, "MissingField", dict(row))
            continue
        key = (name, version)
        if key != previous_key:
            try:
                time = parse_timestamp(row.get(mapping.released_at, ""))
            except InvalidTimestamp as exc:
                yield Quarantined(source, row_no, "InvalidTimestamp", dict(row))
                previous_key = None
                continue
            yield unit_event(name, version, time)
            previous_key = key
        if has_deps:
            dep_name = (row.get(mapping.dep_name) or "").strip()
            if dep_name:
                requirement = (row.get(mapping.dep_requirement) or "").strip() or "*"
                yield use_event((name, version), (dep_name, requirement))


# --- contribution records --------------------------------------------------------

_CTYPE_ALIASES = {
    "pr": "pr",
    "pull_request": "pr",
    "pullrequest": "pr",
    "issue": "issue",
    "discussion": "discussion",
}


def parse_contribution_events(reader, source: str = "<contributions>"):
    """Stream NDJSON contribution records into events.

    Each record needs ``author``, ``target``, ``type`` and ``time``;
    ``merged`` defaults to false, ``id`` to a line-derived identifier, and
    an optional ``title`` is carried through on the event payload for bot
    heuristics (it is not part of the persisted wire schema). Bad records
    are yielded as :class:`Quarantined` items.
    """
    for line_no, line in enumerate(reader, start=1):
        text = line.strip()
        if not text:
            continue
        try:
            record = json.loads(text)
        except json.JSONDecodeError as exc:
            yield Quarantined(source, line_no, "ParseError", text)
            continue
        if not isinstance(record, dict):
            yield Quarantined(source, line_no, "ParseError", record)
            continue
        author = record.get("author") or record.get("dev")
        target = record.get("target")
        ctype = _CTYPE_ALIASES.get(str(record.get("type", record.get("ctype", ""))).lower())
        if isinstance(target, (list, tuple)) and len(target) == 1:
            target = target[0]
        if not isinstance(author, str) or not author:
            yield Quarantined(source, line_no, "SchemaError", record)
            continue
        if not isinstance(target, str) or not target or ctype is None:
            yield Quarantined(source, line_no, "SchemaError", record)
            continue
        try:
            time = parse_timestamp(record.get("time", record.get("timestamp")))
        except InvalidTimestamp:
            yield Quarantined(source, line_no, "InvalidTimestamp", record)
            continue
        cid = record.get("id")
        if not isinstance(cid, str) or not cid:
            cid = f"{target}#{line_no}"
        merged = bool(record.get("merged", False))
        event = contribution_event(cid, author, target, ctype, time, merged)
        title = record.get("title")
        if isinstance(title, str) and title:
            # in-memory enrichment only; append() writes schema fields alone
            event = EcosystemEvent(event.kind, {**event.payload, "title": title})
        yield event


# --- registry metadata -------------------------------------------------------------


@dataclass(frozen=True)
class RegistryInfo:
    """One package registry: where it lives and how it shapes dependency trees."""

    ecosystem: str
    language: str
    tiobe_rank: str
    environment: str
    tree_style: str  # "flat" | "nested"
    archive_url: str


_BUNDLED_TABLE = Path(__file__).parent / "data" / "registries.csv"


def load_registry_table(path=None) -> list[RegistryInfo]:
    """Load the bundled table of well-known package registries (or a
    user-supplied CSV with the same columns)."""
    table_path = Path(path) if path is not None else _BUNDLED_TABLE
    rows: list[RegistryInfo] = []
    with table_path.open(newline="", encoding="utf-8") as fh:
        for row_no, row in enumerate(csv.DictReader(fh), start=2):
            try:
                style = row["tree_style"].strip().lower()
                rows.append(
                    RegistryInfo(
                        ecosystem=row["ecosystem"].strip(),
                        language=row["language"].strip(),
                        tiobe_rank=row["tiobe_rank"].strip(),
                        environment=row["environment"].strip(),
                        tree_style="nested" if style.startswith("nested") else "flat",
                        archive_url=row["archive_url"].strip(),
                    )
                )
            except (KeyError, AttributeError):
                raise CsvError(f"{table_path}:{row_no}: missing registry columns") from None
    return rows


def registry_info(ecosystem: str, table: list[RegistryInfo] | None = None) -> RegistryInfo | None:
    """Case-insensitive lookup; returns None when the registry is unknown."""
    for info in table if table is not None else load_registry_table():
        if info.ecosystem.lower() == ecosystem.lower():
            return info
    return None
