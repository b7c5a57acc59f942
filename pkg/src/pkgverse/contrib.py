"""Developer contributions joined with dependency structure.

The centre piece is the dependency-contribution graph: inside one analysis
window it holds the package-level dependency edges active at the window's
end together with the (developer -> package) contribution edges that fall
inside the window. A *congruent* contribution pair is one developer
landing work on both sides of a dependency edge — on a client and on a
library that client uses — within the same window.

Two data-hygiene steps come first. Raw author records are merged into
developers: records sharing an email are the same person, and explicit
alias declarations can merge further identities that emails alone cannot
link. Bot accounts are scored by cheap, auditable heuristics (name
marker, title repetitiveness, clockwork timing) and excluded from
congruence analysis by default.

Windows are half-open ``(start, end]`` intervals of a fixed width (90 days
by default) aligned to the analysis start, tiling the requested range.
"""

from __future__ import annotations

import re
import statistics
from dataclasses import dataclass, replace

from .errors import ConflictingAlias, InvalidRange
from .graph import UniverseGraph, TimedSnapshot

__all__ = [
    "Developer",
    "Contribution",
    "Window",
    "DcGraph",
    "CongruentPair",
    "DEFAULT_WINDOW_SECONDS",
    "BOT_THRESHOLD",
    "merge_identities",
    "alias_index",
    "canonicalize_contributions",
    "filter_contributions",
    "classify_bot",
    "window_partition",
    "build_dc_graph",
    "congruent_contributions",
]

DEFAULT_WINDOW_SECONDS = 90 * 86400  # three months
BOT_THRESHOLD = 0.8


@dataclass(frozen=True)
class Developer:
    """A person (or bot) behind one or more raw identity strings."""

    canonical_id: str
    aliases: frozenset[str]
    bot_flag: bool = False
    bot_score: float = 0.0


@dataclass(frozen=True)
class Contribution:
    """One pull request, issue or discussion aimed at a package."""

    id: str
    developer: str
    target: str
    ctype: str  # pr | issue | discussion
    time: int
    merged: bool = False
    title: str = ""

    @classmethod
    def from_payload(cls, payload: dict) -> "Contribution":
        return cls(
            id=payload["id"],
            developer=payload["dev"],
            target=payload["target"][0],
            ctype=payload["ctype"],
            time=payload["time"],
            merged=payload.get("merged", False),
            title=payload.get("title", ""),
        )


# --- identity merging -----------------------------------------------------------


class _Dsu:
    def __init__(self):
        self.parent: dict = {}

    def find(self, x):
        self.parent.setdefault(x, x)
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[rb] = ra


def merge_identities(
    raw_authors, extra_aliases=()
) -> list[Developer]:
    """Partition raw (name, email) author records into developers.

    The default merge key is the case-folded email; two same-named authors
    with different emails stay distinct people. Explicit ``(canonical,
    alias)`` pairs override the default and may merge groups that emails
    alone cannot — alias strings are matched case-insensitively against
    both names and emails. An alias string explicitly bound to two
    different canonicals raises :class:`ConflictingAlias`.

    Every raw author lands in exactly one developer. Identity strings that
    would end up shared between two developers (e.g. the bare name of the
    two John Smiths) are usable by neither and are dropped from both alias
    sets, keeping alias sets disjoint. The canonical id is the
    lexicographically smallest remaining alias.
    """
    authors = list(dict.fromkeys((name, email) for name, email in raw_authors))
    dsu = _Dsu()
    originals: dict[str, str] = {}  # folded -> first original spelling

    def string_node(text: str) -> str:
        folded = text.casefold()
        originals.setdefault(folded, text)
        return "s:" + folded

    bound_to: dict[str, str] = {}
    for canonical, alias in extra_aliases:
        owner = bound_to.setdefault(alias.casefold(), canonical.casefold())
        if owner != canonical.casefold():
            raise ConflictingAlias(
                f"alias {alias!r} is bound to both {owner!r} and {canonical!r}"
            )
        dsu.union(string_node(canonical), string_node(alias))
    explicit_strings = {s.casefold() for pair in extra_aliases for s in pair}

    for idx, (name, email) in enumerate(authors):
        node = ("a", idx)
        dsu.find(node)
        if email:  # empty emails must not merge unrelated authors
            dsu.union(node, string_node(email))
        # a bare name is a merge key only when an explicit alias names it
        if name and name.casefold() in explicit_strings:
            dsu.union(node, string_node(name))

    groups: dict = {}
    for idx in range(len(authors)):
        groups.setdefault(dsu.find(("a", idx)), []).append(idx)

    # gather candidate alias strings per group, then drop any string that
    # two groups would both claim
    claims: dict[str, set] = {}
    candidate_aliases: dict[object, dict[str, str]] = {}
    for root, members in groups.items():
        candidates: dict[str, str] = {}
        for idx in members:
            name, email = authors[idx]
            for text in (name, email):
                if text:
                    candidates.setdefault(text.casefold(), text)
        for folded in explicit_strings:
            if dsu.find("s:" + folded) == root:
                candidates.setdefault(folded, originals[folded])
        candidate_aliases[root] = candidates
        for folded in candidates:
            claims.setdefault(folded, set()).add(root)
    ambiguous = {folded for folded, owners in claims.items() if len(owners) > 1}

    developers = []
    ordered = sorted(groups.items(), key=lambda item: min(item[1]))
    for group_no, (root, members) in enumerate(ordered):
        aliases = {
            text
            for folded, text in candidate_aliases[root].items()
            if folded not in ambiguous
        }
        if not aliases:
            name, email = authors[min(members)]
            aliases = {f"{name or email or 'author'}#{group_no}"}
        canonical = min(aliases)
        developers.append(Developer(canonical_id=canonical, aliases=frozenset(aliases)))
    return sorted(developers, key=lambda d: d.canonical_id)


def alias_index(developers: list[Developer]) -> dict[str, Developer]:
    """Case-folded alias -> developer lookup table."""
    index: dict[str, Developer] = {}
    for dev in developers:
        for alias in dev.aliases:
            index[alias.casefold()] = dev
    return index


def canonicalize_contributions(
    contributions, developers: list[Developer]
) -> list[Contribution]:
    """Rewrite each contribution's developer to its canonical id; unknown
    identities pass through unchanged (implicit singleton developers)."""
    index = alias_index(developers)
    out = []
    for c in contributions:
        dev = index.get(c.developer.casefold())
        out.append(replace(c, developer=dev.canonical_id) if dev else c)
    return out


def filter_contributions(
    contributions,
    *,
    include_unmerged: bool = False,
    exclude_developers: set[str] = frozenset(),
) -> list[Contribution]:
    """Default analysis filter: merged pull requests plus all issues and
    discussions, minus excluded (e.g. bot) developers."""
    kept = []
    for c in contributions:
        if c.developer in exclude_developers:
            continue
        if c.ctype == "pr" and not c.merged and not include_unmerged:
            continue
        kept.append(c)
    return kept


# --- bot detection ----------------------------------------------------------------

_BOT_NAME = re.compile(r"(\[bot\]$|[-_.]?bot$)", re.IGNORECASE)
_W_NAME, _W_TEMPLATE, _W_REGULARITY = 0.95, 0.75, 0.6


def _normalize_title(title: str) -> str:
    text = re.sub(r"\d+", "#", title.casefold())
    return re.sub(r"\s+", " ", text).strip()


def classify_bot(dev, contributions) -> tuple[bool, float]:
    """Heuristic bot score in [0, 1] and the flag at the default threshold.

    Signals: a bot-style account name (``...bot`` suffix or ``[bot]``
    marker), near-duplicate normalized titles, and low variance of the
    gaps between contribution times. Signals are combined as a noisy-OR,
    so a clear name alone flags, and strongly template-like behaviour
    flags accounts with innocuous names.
    """
    name = dev.canonical_id if isinstance(dev, Developer) else str(dev)
    s_name = 1.0 if _BOT_NAME.search(name) else 0.0

    titles = [_normalize_title(c.title) for c in contributions if c.title]
    if len(titles) >= 2:
        s_template = 1.0 - len(set(titles)) / len(titles)
    else:
        s_template = 0.0

    times = sorted(c.time for c in contributions)
    s_regular = 0.0
    if len(times) >= 4:
        gaps = [b - a for a, b in zip(times, times[1:])]
        mean = statistics.mean(gaps)
        if mean <= 0:
            s_regular = 1.0
        else:
            s_regular = max(0.0, 1.0 - statistics.pstdev(gaps) / mean)

    score = 1.0
    for weight, signal in (
        (_W_NAME, s_name),
        (_W_TEMPLATE, s_template),
        (_W_REGULARITY, s_regular),
    ):
        score *= 1.0 - weight * signal
    score = 1.0 - score
    return score >= BOT_THRESHOLD, score


# --- windows ------------------------------------------------------------------------


@dataclass(frozen=True)
class Window:
    """Half-open analysis interval: a time t belongs iff start < t <= end."""

    start: int
    end: int

    def contains(self, t: int) -> bool:
        return self.start < t <= self.end


def window_partition(
    start: int, end: int, width: int = DEFAULT_WINDOW_SECONDS
) -> list[Window]:
    """Tile ``start..end`` with consecutive windows of ``width`` seconds,
    aligned to ``start``; the last window may be short."""
    if end <= start:
        raise InvalidRange(f"empty range: start={start}, end={end}")
    if width <= 0:
        raise InvalidRange(f"window width must be positive, got {width}")
    windows = []
    lo = start
    while lo < end:
        hi = min(lo + width, end)
        windows.append(Window(lo, hi))
        lo = hi
    return windows


# --- dependency-contribution graph -----------------------------------------------------


@dataclass(frozen=True)
class DcGraph:
    """Package dependencies and developer contributions inside one window."""

    window: Window
    dependency_edges: frozenset[tuple[str, str]]  # (client, library)
    contributions: tuple[Contribution, ...]
    contribution_edges: frozenset[tuple[str, str]]  # (developer, package)


@dataclass(frozen=True)
class CongruentPair:
    """One developer contributing to both sides of a dependency edge."""

    developer: str
    client: str
    library: str
    client_contribution: str
    library_contribution: str


def build_dc_graph(
    graph: UniverseGraph | TimedSnapshot, contributions, window: Window
) -> DcGraph:
    """Join the dependency state at the window's end with the window's
    contributions. Callers pass contributions already identity-merged and
    (normally) bot-filtered."""
    snapshot = graph.timed_snapshot(window.end) if isinstance(graph, UniverseGraph) else graph
    dep_edges = snapshot.package_dependency_edges()
    in_window = tuple(
        sorted(
            (c for c in contributions if window.contains(c.time)),
            key=lambda c: (c.time, c.id),
        )
    )
    edges = frozenset((c.developer, c.target) for c in in_window)
    return DcGraph(
        window=window,
        dependency_edges=dep_edges,
        contributions=in_window,
        contribution_edges=edges,
    )


def congruent_contributions(g: DcGraph) -> list[CongruentPair]:
    """All (developer, client, library) triples where the developer
    contributed to both endpoints of a dependency edge in the window.

    One pair is reported per triple regardless of how many individual
    contributions landed on each side; the earliest contribution (by time,
    then id) represents each side. Output order is deterministic.
    """
    by_dev_target: dict[tuple[str, str], Contribution] = {}
    for c in g.contributions:
        key = (c.developer, c.target)
        best = by_dev_target.get(key)
        if best is None or (c.time, c.id) < (best.time, best.id):
            by_dev_target[key] = c

    devs = sorted({dev for dev, _ in by_dev_target})
    pairs = []
    for dev in devs:
        for client, library in sorted(g.dependency_edges):
            c_client = by_dev_target.get((dev, client))
            c_library = by_dev_target.get((dev, library))
            if c_client is not None and c_library is not None:
                pairs.append(
                    CongruentPair(
                        developer=dev,
                        client=client,
                        library=library,
                        client_contribution=c_client.id,
                        library_contribution=c_library.id,
                    )
                )
    return pairs
