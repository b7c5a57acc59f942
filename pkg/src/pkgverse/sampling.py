"""Sampling strategies and the distortion they inflict on the network.

Researchers rarely analyse a whole ecosystem; they keep the top-k packages
by some importance metric, or a time slice. Both moves bias the picture:
keeping a subset severs dependency chains, and the network itself drifts
over time. This module provides deterministic top-k selection, a
three-count report quantifying how badly a subset breaks the dependency
structure, an evenly spaced snapshot series for temporal studies, and a
per-package activity report that flags dormant-but-depended-upon libraries
without branding them failures (feature-complete libraries go quiet while
remaining heavily used).

Chain breakage has no single canonical formula; the three counts here are
one concretization, computed against the package-level projection:

* ``dangling_use_edges`` — release-level use-edges with exactly one
  endpoint's package inside the subset (a boundary measure, symmetric
  between a subset and its complement);
* ``broken_transitive_paths`` — ordered package pairs reachable in the
  full projection but not inside the subset-induced projection;
* ``severed_update_chains`` — update chains (maximal runs of linked
  releases, two or more long) that the subset discards entirely;
  name-level subsets drop whole packages, so discarding is the only way
  a chain can break.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .contrib import Contribution
from .errors import InsufficientData, InvalidRange, UnknownPackage
from .graph import TimedSnapshot, UniverseGraph

__all__ = [
    "SampleSpec",
    "BreakageReport",
    "ActivityReport",
    "sample_top_k",
    "chain_breakage",
    "snapshot_series",
    "activity_report",
]

METRICS = ("dependents", "contributors", "activity", "popularity")


@dataclass(frozen=True)
class SampleSpec:
    """How to pick packages: a ranking metric and how many to keep.

    Ties always break by ascending package name, making selection
    deterministic. ``popularity`` ranks by an externally supplied score
    column (downloads, stars), since the graph itself has no native
    popularity source.
    """

    metric: str
    k: int
    tie_break: str = "name"  # ascending package name is the only rule

    def __post_init__(self):
        if self.metric not in METRICS:
            raise ValueError(f"metric must be one of {METRICS}, got {self.metric!r}")
        if self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")
        if self.tie_break != "name":
            raise ValueError(f"unsupported tie_break {self.tie_break!r}")


@dataclass(frozen=True)
class BreakageReport:
    dangling_use_edges: int
    broken_transitive_paths: int
    severed_update_chains: int

    def all_zero(self) -> bool:
        return not (
            self.dangling_use_edges
            or self.broken_transitive_paths
            or self.severed_update_chains
        )


def _scores(snapshot: TimedSnapshot, metric: str, contributions, popularity):
    packages = sorted(snapshot.names())
    if metric == "dependents":
        clients: dict[str, set[str]] = {p: set() for p in packages}
        for client, library in snapshot.package_dependency_edges():
            clients[library].add(client)
        return {p: len(clients[p]) for p in packages}
    if metric == "activity":
        return {p: len(snapshot.units_of_name(p)) for p in packages}
    if metric == "contributors":
        if contributions is None:
            raise InsufficientData("metric 'contributors' needs a contribution list")
        counts = {p: set() for p in packages}
        for c in contributions:
            if c.target in counts:
                counts[c.target].add(c.developer)
        return {p: len(devs) for p, devs in counts.items()}
    if popularity is None:
        raise InsufficientData("metric 'popularity' needs an external score table")
    return {p: popularity.get(p, 0) for p in packages}


def sample_top_k(
    snapshot: TimedSnapshot,
    spec: SampleSpec,
    contributions: list[Contribution] | None = None,
    popularity: dict[str, float] | None = None,
) -> list[str]:
    """The k top-ranked package names, in rank order (score desc, name asc)."""
    scores = _scores(snapshot, spec.metric, contributions, popularity)
    ranked = sorted(scores, key=lambda p: (-scores[p], p))
    return ranked[: spec.k]


def _package_reachability(packages, edges) -> set[tuple[str, str]]:
    out: dict[str, set[str]] = {p: set() for p in packages}
    for a, b in edges:
        out[a].add(b)
    pairs: set[tuple[str, str]] = set()
    for start in packages:
        seen: set[str] = set()
        queue = deque(out[start])
        while queue:
            p = queue.popleft()
            if p in seen:
                continue
            seen.add(p)
            queue.extend(out[p] - seen)
        seen.discard(start)
        pairs.update((start, p) for p in seen)
    return pairs


def chain_breakage(snapshot: TimedSnapshot, subset: set[str]) -> BreakageReport:
    """Measure what analysing only ``subset`` would destroy.

    ``subset`` must name packages present in the snapshot. All counts are
    zero when the subset is the whole snapshot.
    """
    packages = snapshot.names()
    unknown = set(subset) - packages
    if unknown:
        raise UnknownPackage(f"not in snapshot: {sorted(unknown)}")
    subset = set(subset)

    name_of = {u.uid: u.name for u in snapshot.units}
    dangling = sum(
        1
        for e in snapshot.use_edges
        if (name_of[e.src] in subset) != (name_of[e.dst] in subset)
    )

    edges = snapshot.package_dependency_edges()
    full_pairs = _package_reachability(sorted(packages), edges)
    kept_edges = {(a, b) for a, b in edges if a in subset and b in subset}
    subset_pairs = _package_reachability(sorted(subset), kept_edges)
    broken = len(full_pairs - subset_pairs)

    # chains are linear, so a name's chain count is its linked units minus
    # its update edges (one maximal run per surplus unit)
    linked: dict[str, set[int]] = {}
    edge_count: dict[str, int] = {}
    for e in snapshot.update_edges:
        name = name_of[e.src]
        linked.setdefault(name, set()).update((e.src, e.dst))
        edge_count[name] = edge_count.get(name, 0) + 1
    severed = sum(
        len(linked[name]) - edge_count[name]
        for name in linked
        if name not in subset
    )
    return BreakageReport(
        dangling_use_edges=dangling,
        broken_transitive_paths=broken,
        severed_update_chains=severed,
    )


def snapshot_series(
    g: UniverseGraph, t0: int, t1: int, step: int
) -> list[TimedSnapshot]:
    """Snapshots at t0, t0+step, ... up to and including t1 when it falls
    on a step multiple. Consecutive pairs feed :func:`pkgverse.graph.diff`."""
    if t1 < t0:
        raise InvalidRange(f"t1={t1} before t0={t0}")
    if step <= 0:
        raise InvalidRange(f"step must be positive, got {step}")
    series = [g.timed_snapshot(t0)]
    t = t0
    while t + step <= t1:
        t += step
        series.append(g.timed_snapshot(t))
    return series


@dataclass(frozen=True)
class ActivityReport:
    """Release activity of one package around an observation instant.

    ``dormant_but_depended_upon`` marks quiet-but-used packages; quiet
    explicitly does not mean failed, so the flag is a prompt for a closer
    look, not a verdict.
    """

    package: str
    at: int
    window: int
    releases_in_window: int
    last_release_time: int
    time_since_last_release: int
    dependent_count: int
    dormant_but_depended_upon: bool


def activity_report(
    g: UniverseGraph | TimedSnapshot,
    package: str,
    window: int,
    at: int | None = None,
    dormant_threshold: int = 1,
) -> ActivityReport:
    """Summarize one package's recent releases and current dependents.

    ``at`` defaults to the newest release time in the graph; the window is
    the half-open interval ``(at - window, at]``.
    """
    if isinstance(g, UniverseGraph):
        if at is None:
            if not g.unit_count():
                raise UnknownPackage(f"{package!r}: graph is empty")
            at = max(u.time for u in g.units)
        snapshot = g.timed_snapshot(at)
    else:
        snapshot = g
        at = snapshot.at if at is None else at
    releases = snapshot.units_of_name(package)
    if not releases:
        raise UnknownPackage(f"{package!r} has no releases at t={at}")
    times = [snapshot.unit(uid).time for uid in releases]
    last = max(times)
    in_window = sum(1 for t in times if at - window < t <= at)
    dependents = {
        snapshot.unit(user).name
        for uid in releases
        for user in snapshot.used_by(uid)
        if snapshot.unit(user).name != package
    }
    return ActivityReport(
        package=package,
        at=at,
        window=window,
        releases_in_window=in_window,
        last_release_time=last,
        time_since_last_release=at - last,
        dependent_count=len(dependents),
        dormant_but_depended_upon=(in_window == 0 and len(dependents) >= dormant_threshold),
    )
