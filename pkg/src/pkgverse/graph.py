"""In-memory universe graph of released software units.

Nodes are *software units* — one released version of a program, identified
by ``(name, release)`` and carrying a UTC release timestamp. Two edge kinds
connect them: a *use-edge* records that one unit depends on another, and an
*update-edge* links a release to its immediate successor under the same
name. The graph is append-only: units and edges are never modified or
removed, so the stored sets only grow over time. Historical states are
answered by :meth:`UniverseGraph.timed_snapshot`, which induces the
immutable subgraph of everything released at or before an instant.

Structural rules enforced on every write:

* ``(name, release)`` is unique; name and release are non-empty.
* use-edges: no self-loops, no parallel duplicates of an ordered pair.
* update-edges: same name on both ends, strictly increasing time, and at
  most one successor / one predecessor per unit (forks are separate units,
  never update branches).

Use-edges whose target was released *after* the source are timestamp noise
in real registry dumps; by default they are accepted and recorded in
:attr:`UniverseGraph.anomalies`, while ``strict=True`` rejects them.

Unit references are stable integer handles assigned in insertion order.
Construction is single-writer; any number of readers may query between
writes, and snapshots are immutable values safe to share across threads.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from .errors import (
    BranchingUpdate,
    DuplicateUnit,
    NameAxiomViolation,
    ParallelEdge,
    SelfLoop,
    SnapshotOrderError,
    TimeAnomaly,
    TimeOrderViolation,
    UnknownUnit,
)

__all__ = [
    "SoftwareUnit",
    "UseEdge",
    "UpdateEdge",
    "UniverseGraph",
    "TimedSnapshot",
    "GrowthDelta",
    "diff",
]


@dataclass(frozen=True, slots=True)
class SoftwareUnit:
    """One released version: the atom of the ecosystem."""

    uid: int
    name: str
    release: str
    time: int


@dataclass(frozen=True, slots=True)
class UseEdge:
    """Directed dependency: the unit ``src`` uses the unit ``dst``."""

    src: int
    dst: int


@dataclass(frozen=True, slots=True)
class UpdateEdge:
    """``dst`` is the immediate successor release of ``src``."""

    src: int
    dst: int


@dataclass(frozen=True, slots=True)
class GrowthDelta:
    """Additions separating two snapshots of the same graph.

    ``strict_growth`` reports whether every added edge touches at least one
    added unit — i.e. whether the growth consists purely of new material.
    Real dumps violate this when metadata corrections introduce edges
    between pre-existing releases, so it is surfaced as a flag rather than
    enforced.
    """

    added_units: frozenset[SoftwareUnit]
    added_use_edges: frozenset[UseEdge]
    added_update_edges: frozenset[UpdateEdge]
    strict_growth: bool

    def is_empty(self) -> bool:
        return not (self.added_units or self.added_use_edges or self.added_update_edges)


def _reachable(use_of, start: int) -> set[int]:
    """All units reachable from ``start`` over use-edges, excluding start
    itself unless it lies on a cycle (caller strips it)."""
    seen: set[int] = set()
    queue = deque(use_of(start))
    while queue:
        uid = queue.popleft()
        if uid in seen:
            continue
        seen.add(uid)
        queue.extend(v for v in use_of(uid) if v not in seen)
    return seen


class UniverseGraph:
    """Append-only graph of software units, use-edges and update-edges."""

    def __init__(self, strict: bool = False):
        self.strict = strict
        self._units: list[SoftwareUnit] = []
        self._by_key: dict[tuple[str, str], int] = {}
        self._by_name: dict[str, list[int]] = {}
        self._use_edges: set[UseEdge] = set()
        self._use_out: dict[int, set[int]] = {}
        self._use_in: dict[int, set[int]] = {}
        self._update_edges: set[UpdateEdge] = set()
        self._successor: dict[int, int] = {}
        self._predecessor: dict[int, int] = {}
        #: use-edges accepted despite the target postdating the source
        self.anomalies: list[UseEdge] = []

    # --- write API -----------------------------------------------------

    def add_unit(self, name: str, release: str, time: int) -> int:
        """Insert a unit and return its integer handle.

        Duplicates are rejected, not deduplicated: a second (name, release)
        almost always signals a broken ingest.
        """
        if not name or not release:
            raise ValueError("unit name and release must be non-empty")
        key = (name, release)
        if key in self._by_key:
            raise DuplicateUnit(f"{name}@{release} already present")
        uid = len(self._units)
        self._units.append(SoftwareUnit(uid, name, release, int(time)))
        self._by_key[key] = uid
        self._by_name.setdefault(name, []).append(uid)
        return uid

    def add_use_edge(self, src: int, dst: int) -> UseEdge:
        """Record that ``src`` uses ``dst``."""
        self._check_uid(src)
        self._check_uid(dst)
        if src == dst:
            raise SelfLoop(f"unit {self._label(src)} cannot use itself")
        edge = UseEdge(src, dst)
        if edge in self._use_edges:
            raise ParallelEdge(f"{self._label(src)} -> {self._label(dst)} already present")
        anomalous = self._units[dst].time > self._units[src].time
        if anomalous and self.strict:
            raise TimeAnomaly(
                f"{self._label(src)} uses {self._label(dst)} released later"
            )
        self._use_edges.add(edge)
        self._use_out.setdefault(src, set()).add(dst)
        self._use_in.setdefault(dst, set()).add(src)
        if anomalous:
            self.anomalies.append(edge)
        return edge

    def add_update_edge(self, src: int, dst: int) -> UpdateEdge:
        """Record that ``dst`` is the immediate successor release of ``src``."""
        self._check_uid(src)
        self._check_uid(dst)
        u, v = self._units[src], self._units[dst]
        if u.name != v.name:
            raise NameAxiomViolation(f"{self._label(src)} => {self._label(dst)}")
        if not u.time < v.time:
            raise TimeOrderViolation(
                f"{self._label(src)} (t={u.time}) => {self._label(dst)} (t={v.time})"
            )
        if src in self._successor:
            raise BranchingUpdate(f"{self._label(src)} already has a successor")
        if dst in self._predecessor:
            raise BranchingUpdate(f"{self._label(dst)} already has a predecessor")
        edge = UpdateEdge(src, dst)
        self._update_edges.add(edge)
        self._successor[src] = dst
        self._predecessor[dst] = src
        return edge

    # --- lookup --------------------------------------------------------

    def unit(self, uid: int) -> SoftwareUnit:
        self._check_uid(uid)
        return self._units[uid]

    def find(self, name: str, release: str) -> int | None:
        """Handle of (name, release), or None."""
        return self._by_key.get((name, release))

    @property
    def units(self) -> tuple[SoftwareUnit, ...]:
        return tuple(self._units)

    @property
    def use_edges(self) -> frozenset[UseEdge]:
        return frozenset(self._use_edges)

    @property
    def update_edges(self) -> frozenset[UpdateEdge]:
        return frozenset(self._update_edges)

    def unit_count(self) -> int:
        return len(self._units)

    def names(self) -> set[str]:
        return set(self._by_name)

    def units_of_name(self, name: str) -> list[int]:
        return list(self._by_name.get(name, ()))

    # --- queries ---------------------------------------------------------

    def use_of(self, uid: int) -> set[int]:
        """Out-neighbourhood over use-edges: everything ``uid`` uses."""
        self._check_uid(uid)
        return set(self._use_out.get(uid, ()))

    def used_by(self, uid: int) -> set[int]:
        """In-neighbourhood over use-edges: everything using ``uid``."""
        self._check_uid(uid)
        return set(self._use_in.get(uid, ()))

    def update_chain(self, name: str) -> list[int]:
        """All releases of ``name``, oldest first.

        Update edges carry strictly increasing timestamps, so ordering by
        (time, handle) respects every chain while interleaving units that
        have no update edges. Unknown names yield an empty list.
        """
        uids = self._by_name.get(name, ())
        return sorted(uids, key=lambda u: (self._units[u].time, u))

    def transitive_dependencies(self, uid: int) -> set[int]:
        """Everything reachable from ``uid`` over use-edges, minus ``uid``.

        Terminates on cyclic graphs; a unit on a cycle through itself is
        still excluded from its own result.
        """
        self._check_uid(uid)
        reach = _reachable(lambda u: self._use_out.get(u, ()), uid)
        reach.discard(uid)
        return reach

    def timed_snapshot(self, at: int) -> TimedSnapshot:
        """Immutable state of the graph at time ``at``: units released at or
        before ``at`` plus the edges induced on them."""
        uids = {u.uid for u in self._units if u.time <= at}
        units = frozenset(u for u in self._units if u.uid in uids)
        use = frozenset(e for e in self._use_edges if e.src in uids and e.dst in uids)
        upd = frozenset(e for e in self._update_edges if e.src in uids and e.dst in uids)
        return TimedSnapshot(at=at, units=units, use_edges=use, update_edges=upd)

    # --- internal --------------------------------------------------------

    def _check_uid(self, uid: int) -> None:
        if not isinstance(uid, int) or not 0 <= uid < len(self._units):
            raise UnknownUnit(f"no unit with handle {uid!r}")

    def _label(self, uid: int) -> str:
        u = self._units[uid]
        return f"{u.name}@{u.release}"

    def __eq__(self, other) -> bool:
        if not isinstance(other, UniverseGraph):
            return NotImplemented
        return (
            self._units == other._units
            and self._use_edges == other._use_edges
            and self._update_edges == other._update_edges
        )

    def __repr__(self) -> str:
        return (
            f"UniverseGraph(units={len(self._units)}, "
            f"use_edges={len(self._use_edges)}, update_edges={len(self._update_edges)})"
        )


@dataclass(frozen=True)
class TimedSnapshot:
    """Frozen subgraph of everything released at or before ``at``.

    Equality and hashing consider only the declared fields, so two
    snapshots are equal exactly when they contain the same units and
    induced edges at the same instant.
    """

    at: int
    units: frozenset[SoftwareUnit]
    use_edges: frozenset[UseEdge]
    update_edges: frozenset[UpdateEdge]
    _idx: dict = field(init=False, repr=False, compare=False, default=None)

    def __post_init__(self):
        by_uid = {u.uid: u for u in self.units}
        by_name: dict[str, list[int]] = {}
        for u in sorted(self.units, key=lambda x: x.uid):
            by_name.setdefault(u.name, []).append(u.uid)
        out: dict[int, set[int]] = {}
        into: dict[int, set[int]] = {}
        for e in self.use_edges:
            out.setdefault(e.src, set()).add(e.dst)
            into.setdefault(e.dst, set()).add(e.src)
        object.__setattr__(
            self,
            "_idx",
            {"by_uid": by_uid, "by_name": by_name, "out": out, "in": into},
        )

    # Snapshots answer the same read queries as the live graph.

    def unit(self, uid: int) -> SoftwareUnit:
        try:
            return self._idx["by_uid"][uid]
        except KeyError:
            raise UnknownUnit(f"no unit with handle {uid!r} in snapshot") from None

    def has_unit(self, uid: int) -> bool:
        return uid in self._idx["by_uid"]

    def find(self, name: str, release: str) -> int | None:
        for uid in self._idx["by_name"].get(name, ()):
            if self._idx["by_uid"][uid].release == release:
                return uid
        return None

    def names(self) -> set[str]:
        return set(self._idx["by_name"])

    def units_of_name(self, name: str) -> list[int]:
        return list(self._idx["by_name"].get(name, ()))

    def use_of(self, uid: int) -> set[int]:
        self.unit(uid)
        return set(self._idx["out"].get(uid, ()))

    def used_by(self, uid: int) -> set[int]:
        self.unit(uid)
        return set(self._idx["in"].get(uid, ()))

    def update_chain(self, name: str) -> list[int]:
        by_uid = self._idx["by_uid"]
        return sorted(self._idx["by_name"].get(name, ()), key=lambda u: (by_uid[u].time, u))

    def transitive_dependencies(self, uid: int) -> set[int]:
        self.unit(uid)
        reach = _reachable(lambda u: self._idx["out"].get(u, ()), uid)
        reach.discard(uid)
        return reach

    def package_dependency_edges(self) -> frozenset[tuple[str, str]]:
        """Package-level projection of the use-edges.

        Any use-edge between releases of two distinct names induces one
        (client, library) pair; edges between releases of the same name are
        not dependencies at package granularity and are dropped.
        """
        by_uid = self._idx["by_uid"]
        pairs = set()
        for e in self.use_edges:
            a, b = by_uid[e.src].name, by_uid[e.dst].name
            if a != b:
                pairs.add((a, b))
        return frozenset(pairs)

    def is_subgraph_of(self, other: "TimedSnapshot") -> bool:
        return (
            self.units <= other.units
            and self.use_edges <= other.use_edges
            and self.update_edges <= other.update_edges
        )


def diff(older: TimedSnapshot, newer: TimedSnapshot) -> GrowthDelta:
    """Additions that turn ``older`` into ``newer``.

    Both snapshots must come from the same graph, with ``older.at`` not
    after ``newer.at``; monotonic growth then guarantees the delta contains
    additions only.
    """
    if older.at > newer.at:
        raise SnapshotOrderError(f"older.at={older.at} > newer.at={newer.at}")
    added_units = newer.units - older.units
    added_use = newer.use_edges - older.use_edges
    added_upd = newer.update_edges - older.update_edges
    new_uids = {u.uid for u in added_units}
    strict = all(
        e.src in new_uids or e.dst in new_uids for e in added_use
    ) and all(e.src in new_uids or e.dst in new_uids for e in added_upd)
    return GrowthDelta(
        added_units=frozenset(added_units),
        added_use_edges=frozenset(added_use),
        added_update_edges=frozenset(added_upd),
        strict_growth=strict,
    )
