"""Command-line front end composing the analysis pipeline.

Every subcommand operates on the event log, never on ad-hoc state, so any
analysis can be replayed from the log bytes. Data documents go to stdout
(or ``--out``); human-readable summaries go to stderr. Exit codes: 0 on
success, 1 on fatal errors, 2 when the run completed but some events or
records were quarantined.

Subcommands::

    ingest       parse manifests / registry dumps / contribution files into the log
    snapshot     export the graph state at a time (json, dot, graphml), or a series
    resolve      build a dependency tree for a root package (nested or flat)
    congruence   per-window congruent contribution pairs as CSV
    sample       top-k package selection plus optional breakage measurement
    activity     release activity and dormancy flag for one package
    registries   the bundled package-registry reference table
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

from . import export
from .contrib import (
    BOT_THRESHOLD,
    Contribution,
    build_dc_graph,
    canonicalize_contributions,
    classify_bot,
    congruent_contributions,
    filter_contributions,
    merge_identities,
    window_partition,
)
from .errors import InvalidTimestamp, PkgverseError, UnknownRoot
from .eventlog import EventLog, replay
from .ingest import (
    ColumnMap,
    Quarantined,
    load_registry_table,
    manifest_events,
    parse_contribution_events,
    parse_manifest,
    parse_registry_dump,
    parse_timestamp,
)
from .resolve import build_tree_at, detect_conflicts, flatten_tree, iter_lock_entries, tree_to_dict
from .sampling import SampleSpec, activity_report, chain_breakage, sample_top_k, snapshot_series

EXIT_OK = 0
EXIT_FATAL = 1
EXIT_QUARANTINED = 2


def _parse_duration(text: str) -> int:
    """Durations like ``90d``, ``12h``, ``30m``, ``3600s`` or bare seconds."""
    text = text.strip().lower()
    factor = 1
    if text and text[-1] in "dhms":
        factor = {"d": 86400, "h": 3600, "m": 60, "s": 1}[text[-1]]
        text = text[:-1]
    try:
        return int(text) * factor
    except ValueError:
        raise InvalidTimestamp(f"not a duration: {text!r}") from None


def _emit(args, text: str) -> None:
    if getattr(args, "out", None):
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _replay_log(args):
    result = replay(args.log, strict=args.strict)
    if result.quarantine:
        print(
            f"warning: {len(result.quarantine)} events quarantined during replay",
            file=sys.stderr,
        )
    return result


def _load_contribution_file(path) -> tuple[list[Contribution], list[Quarantined]]:
    contributions: list[Contribution] = []
    quarantined: list[Quarantined] = []
    with open(path, encoding="utf-8") as fh:
        for item in parse_contribution_events(fh, source=str(path)):
            if isinstance(item, Quarantined):
                quarantined.append(item)
            else:
                contributions.append(Contribution.from_payload(item.payload))
    return contributions, quarantined


# --- subcommands ----------------------------------------------------------------


def cmd_ingest(args) -> int:
    log = EventLog(args.log)
    counts: dict[str, int] = {}
    quarantined: list[Quarantined] = []
    with log:
        for path in args.inputs:
            path = Path(path)
            if args.kind == "manifest":
                manifest = parse_manifest(
                    path.read_text(encoding="utf-8"),
                    sections=("dependencies", "devDependencies") if args.include_dev else ("dependencies",),
                )
                time = args.time if args.time is not None else 0
                for event in manifest_events(manifest, time):
                    log.append(event)
                    counts[event.kind] = counts.get(event.kind, 0) + 1
                continue
            with path.open(encoding="utf-8", newline="") as fh:
                if args.kind == "dump":
                    mapping = ColumnMap(*args.columns.split(",")) if args.columns else None
                    stream = parse_registry_dump(fh, mapping, source=str(path))
                else:
                    stream = parse_contribution_events(fh, source=str(path))
                for item in stream:
                    if isinstance(item, Quarantined):
                        quarantined.append(item)
                    else:
                        log.append(item)
                        counts[item.kind] = counts.get(item.kind, 0) + 1
    summary = ", ".join(f"{n} {kind}" for kind, n in sorted(counts.items())) or "0 events"
    print(f"appended {summary}; {len(quarantined)} quarantined", file=sys.stderr)
    if quarantined:
        report = Path(str(args.log) + ".quarantine.ndjson")
        with report.open("a", encoding="utf-8") as fh:
            for q in quarantined:
                fh.write(
                    json.dumps(
                        {"source": q.source, "line": q.line_no, "reason": q.reason, "record": q.record},
                        separators=(",", ":"),
                        default=str,
                    )
                    + "\n"
                )
        print(f"quarantine report: {report}", file=sys.stderr)
        return EXIT_QUARANTINED
    return EXIT_OK


def cmd_snapshot(args) -> int:
    result = _replay_log(args)
    at = parse_timestamp(args.at)
    if args.series_until is not None:
        until = parse_timestamp(args.series_until)
        step = _parse_duration(args.series_step)
        series = snapshot_series(result.graph, at, until, step)
        paths = export.export_snapshot_series(series, args.out_dir or "snapshots")
        print(f"wrote {len(paths)} snapshot files", file=sys.stderr)
        return EXIT_QUARANTINED if result.quarantine else EXIT_OK
    snap = result.graph.timed_snapshot(at)
    renderers = {
        "json": export.snapshot_to_json,
        "dot": export.snapshot_to_dot,
        "graphml": export.snapshot_to_graphml,
    }
    if args.format not in renderers:
        raise PkgverseError(f"snapshot cannot be rendered as {args.format!r}")
    _emit(args, renderers[args.format](snap))
    print(
        f"snapshot at t={at}: {len(snap.units)} units, "
        f"{len(snap.use_edges)} use-edges, {len(snap.update_edges)} update-edges",
        file=sys.stderr,
    )
    return EXIT_QUARANTINED if result.quarantine else EXIT_OK


def cmd_resolve(args) -> int:
    result = _replay_log(args)
    name, _, release = args.root.partition("@")
    if not release:
        raise UnknownRoot(f"--root must look like name@version, got {args.root!r}")
    at = parse_timestamp(args.at) if args.at is not None else max(
        (u.time for u in result.graph.units), default=0
    )
    snap = result.graph.timed_snapshot(at)
    tree = build_tree_at(snap, name, release)
    conflicts = detect_conflicts(tree)
    if args.style == "flat":
        tree = flatten_tree(tree)
    if args.format == "lock":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(("package", "path"))
        for entry, path in iter_lock_entries(tree):
            writer.writerow((entry, path))
        _emit(args, buf.getvalue())
    else:
        doc = {
            "style": args.style,
            "root": tree_to_dict(tree),
            "conflicts": [
                {"name": c.name, "versions": sorted(c.versions)} for c in conflicts
            ],
        }
        _emit(args, json.dumps(doc, indent=2, sort_keys=True) + "\n")
    print(f"{len(conflicts)} version conflicts", file=sys.stderr)
    return EXIT_QUARANTINED if result.quarantine else EXIT_OK


def cmd_congruence(args) -> int:
    if not 0.0 <= args.bot_threshold <= 1.0:
        raise PkgverseError(f"--bot-threshold must be within [0, 1], got {args.bot_threshold}")
    result = _replay_log(args)
    contributions, quarantined = _load_contribution_file(args.contributions)
    for q in quarantined:
        print(f"quarantined {q.source}:{q.line_no}: {q.reason}", file=sys.stderr)

    developers = merge_identities(
        [(c.developer, "") for c in contributions], result.aliases
    )
    contributions = canonicalize_contributions(contributions, developers)

    excluded: set[str] = set()
    if not args.keep_bots:
        by_dev: dict[str, list[Contribution]] = {}
        for c in contributions:
            by_dev.setdefault(c.developer, []).append(c)
        for dev, items in by_dev.items():
            flagged, score = classify_bot(dev, items)
            if score >= args.bot_threshold:
                excluded.add(dev)
    contributions = filter_contributions(
        contributions,
        include_unmerged=args.include_unmerged,
        exclude_developers=excluded,
    )

    if contributions:
        t_lo = min(c.time for c in contributions)
        t_hi = max(c.time for c in contributions)
    else:
        t_lo, t_hi = 0, 1
    start = parse_timestamp(args.window_start) if args.window_start is not None else t_lo - 1
    end = parse_timestamp(args.window_end) if args.window_end is not None else t_hi
    if end <= start:
        end = start + 1
    # cross-window mode drops the co-window requirement by spanning the
    # whole range with a single window
    width = end - start if args.cross_window else _parse_duration(args.window)

    windows = window_partition(start, end, width)
    rows = []
    for window in windows:
        dc = build_dc_graph(result.graph, contributions, window)
        for pair in congruent_contributions(dc):
            rows.append((window, pair))
    buf = io.StringIO()
    export.write_congruence_csv(buf, rows)
    _emit(args, buf.getvalue())
    print(
        f"{len(rows)} congruent pairs across {len(windows)} windows; "
        f"{len(excluded)} developers excluded as bots",
        file=sys.stderr,
    )
    if quarantined or result.quarantine:
        return EXIT_QUARANTINED
    return EXIT_OK


def cmd_sample(args) -> int:
    result = _replay_log(args)
    at = parse_timestamp(args.at) if args.at is not None else max(
        (u.time for u in result.graph.units), default=0
    )
    snap = result.graph.timed_snapshot(at)

    contributions = None
    if args.contributions:
        contributions, _ = _load_contribution_file(args.contributions)
    popularity = None
    if args.popularity_csv:
        popularity = {}
        with open(args.popularity_csv, newline="", encoding="utf-8") as fh:
            for row in csv.DictReader(fh):
                popularity[row["package"]] = float(row["score"])

    spec = SampleSpec(metric=args.metric, k=args.k)
    selected = sample_top_k(snap, spec, contributions=contributions, popularity=popularity)
    breakage = chain_breakage(snap, set(selected)) if args.measure_breakage else None
    if args.format == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        columns = ["rank", "package"]
        if breakage is not None:
            columns += sorted(export.breakage_to_dict(breakage))
        writer.writerow(columns)
        for rank, package in enumerate(selected, start=1):
            row = [rank, package]
            if breakage is not None:
                counts = export.breakage_to_dict(breakage)
                row += [counts[k] for k in sorted(counts)]
            writer.writerow(row)
        _emit(args, buf.getvalue())
    else:
        doc: dict = {"metric": args.metric, "k": args.k, "selected": selected}
        if breakage is not None:
            doc["breakage"] = export.breakage_to_dict(breakage)
        _emit(args, json.dumps(doc, indent=2, sort_keys=True) + "\n")
    print(f"selected {len(selected)} packages", file=sys.stderr)
    return EXIT_QUARANTINED if result.quarantine else EXIT_OK


def cmd_activity(args) -> int:
    result = _replay_log(args)
    at = parse_timestamp(args.at) if args.at is not None else None
    report = activity_report(
        result.graph,
        args.package,
        _parse_duration(args.window),
        at=at,
        dormant_threshold=args.threshold,
    )
    doc = export.activity_to_dict(report)
    if args.format == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(sorted(doc))
        writer.writerow([doc[k] for k in sorted(doc)])
        _emit(args, buf.getvalue())
    else:
        _emit(args, json.dumps(doc, indent=2, sort_keys=True) + "\n")
    return EXIT_QUARANTINED if result.quarantine else EXIT_OK


def cmd_registries(args) -> int:
    table = load_registry_table(args.table)
    if args.ecosystem:
        table = [r for r in table if r.ecosystem.lower() == args.ecosystem.lower()]
        if not table:
            raise PkgverseError(f"unknown registry {args.ecosystem!r}")
    if args.format == "json":
        doc = [r.__dict__ for r in table]
        _emit(args, json.dumps(doc, indent=2, sort_keys=True) + "\n")
    else:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(
            ("ecosystem", "language", "tiobe_rank", "environment", "tree_style", "archive_url")
        )
        for r in table:
            writer.writerow(
                (r.ecosystem, r.language, r.tiobe_rank, r.environment, r.tree_style, r.archive_url)
            )
        _emit(args, buf.getvalue())
    return EXIT_OK


# --- parser ------------------------------------------------------------------------


def _common_flags(sub: argparse.ArgumentParser, needs_log: bool = True) -> None:
    if needs_log:
        sub.add_argument("--log", required=True, help="event log path (NDJSON)")
        sub.add_argument("--strict", action="store_true", help="reject time-anomalous use-edges")
    sub.add_argument("--out", help="write the data document here instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pkgverse",
        description="Temporal dependency-graph toolkit for software package ecosystems.",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    p = commands.add_parser("ingest", help="parse raw inputs and append events to the log")
    p.add_argument("inputs", nargs="+", help="input files")
    p.add_argument("--kind", required=True, choices=("manifest", "dump", "contributions"))
    p.add_argument("--columns", help="comma-separated dump column names "
                                     "(platform,name,version,released_at,dep_name,dep_requirement)")
    p.add_argument("--include-dev", action="store_true", help="also ingest devDependencies")
    p.add_argument("--time", type=int, help="release time for manifest ingests (epoch seconds)")
    _common_flags(p)
    p.set_defaults(func=cmd_ingest)

    p = commands.add_parser("snapshot", help="export the graph state at a time")
    p.add_argument("--at", required=True, help="timestamp (epoch seconds or ISO-8601)")
    p.add_argument("--format", default="json", choices=("json", "dot", "graphml"))
    p.add_argument("--series-until", help="also export a snapshot series up to this time")
    p.add_argument("--series-step", default="90d", help="series spacing (e.g. 90d)")
    p.add_argument("--out-dir", help="directory for series DOT files")
    _common_flags(p)
    p.set_defaults(func=cmd_snapshot)

    p = commands.add_parser("resolve", help="build a dependency tree for a root package")
    p.add_argument("--root", required=True, help="root as name@version")
    p.add_argument("--at", help="resolve against the snapshot at this time (default: latest)")
    p.add_argument("--style", default="nested", choices=("nested", "flat"))
    p.add_argument("--format", default="json", choices=("json", "lock"))
    _common_flags(p)
    p.set_defaults(func=cmd_resolve)

    p = commands.add_parser("congruence", help="detect congruent contribution pairs per window")
    p.add_argument("--contributions", required=True, help="NDJSON contribution records")
    p.add_argument("--window", default="90d", help="analysis window width (default 90d)")
    p.add_argument("--window-start", help="analysis range start (default: before first record)")
    p.add_argument("--window-end", help="analysis range end (default: last record)")
    p.add_argument("--keep-bots", action="store_true", help="do not exclude bot accounts")
    p.add_argument("--bot-threshold", type=float, default=BOT_THRESHOLD)
    p.add_argument("--include-unmerged", action="store_true",
                   help="count unmerged pull requests as contributions")
    p.add_argument("--cross-window", action="store_true",
                   help="allow the two contributions of a pair to fall in different windows")
    _common_flags(p)
    p.set_defaults(func=cmd_congruence)

    p = commands.add_parser("sample", help="pick top-k packages and measure breakage")
    p.add_argument("--metric", required=True,
                   choices=("dependents", "contributors", "activity", "popularity"))
    p.add_argument("--k", required=True, type=int)
    p.add_argument("--at", help="sample the snapshot at this time (default: latest)")
    p.add_argument("--contributions", help="NDJSON records (required for metric=contributors)")
    p.add_argument("--popularity-csv", help="CSV with package,score columns")
    p.add_argument("--measure-breakage", action="store_true")
    p.add_argument("--format", default="json", choices=("json", "csv"))
    _common_flags(p)
    p.set_defaults(func=cmd_sample)

    p = commands.add_parser("activity", help="release activity report for one package")
    p.add_argument("--package", required=True)
    p.add_argument("--window", default="90d")
    p.add_argument("--at", help="observation time (default: newest release)")
    p.add_argument("--threshold", type=int, default=1,
                   help="dependents needed for the dormant-but-depended-upon flag")
    p.add_argument("--format", default="json", choices=("json", "csv"))
    _common_flags(p)
    p.set_defaults(func=cmd_activity)

    p = commands.add_parser("registries", help="bundled package-registry reference table")
    p.add_argument("--ecosystem", help="look up a single registry")
    p.add_argument("--table", help="alternative registries CSV")
    p.add_argument("--format", default="csv", choices=("csv", "json"))
    _common_flags(p, needs_log=False)
    p.set_defaults(func=cmd_registries)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except PkgverseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FATAL
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FATAL


if __name__ == "__main__":
    sys.exit(main())
