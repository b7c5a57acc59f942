"""Dependency trees: nested construction, flat hoisting, conflict analysis.

A *nested* tree resolves every dependency independently per parent, the way
installers that allow duplicate versions do, so the same library may appear
with different versions in different subtrees. A *flat* tree models the
hoisting installers perform: walking the nested tree in installation order
(breadth-first, children in declaration order), the first version seen of
each name is promoted to the top level and later conflicting versions stay
nested under the package that needs them. Lookup from any node — own nested
children first, then the top level — still finds exactly the version that
node resolved in the nested tree.

Cycles are broken by marking a repeated (name, version) on the active path
as a back-reference leaf; that is bookkeeping, not an error. Identical
(name, version) subtrees are shared internally, so trees over dense
registries stay cheap to build; consumers that walk trees should treat
nodes as values, not identities.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from .errors import NoMatchingVersion, UnknownRoot
from .graph import TimedSnapshot
from .ingest import Manifest
from .semver import VersionRange, resolve_version_range

__all__ = [
    "DepTree",
    "Conflict",
    "ManifestRegistry",
    "build_nested_tree",
    "flatten_tree",
    "detect_conflicts",
    "unused_declared",
    "tree_to_dict",
    "iter_lock_entries",
    "count_nodes",
]


@dataclass
class DepTree:
    """One resolved package and the dependencies that live underneath it."""

    name: str
    version: str
    children: list["DepTree"] = field(default_factory=list)
    style: str = "nested"  # meaningful on the root: "nested" | "flat"
    back_reference: bool = False

    @property
    def key(self) -> tuple[str, str]:
        return (self.name, self.version)

    def __repr__(self) -> str:
        tag = " ^" if self.back_reference else ""
        return f"DepTree({self.name}@{self.version}{tag}, children={len(self.children)})"


@dataclass(frozen=True)
class Conflict:
    """A name demanded at two or more distinct versions in one tree."""

    name: str
    versions: frozenset[str]


class ManifestRegistry:
    """The resolvable universe: manifests indexed by name and release."""

    def __init__(self):
        self._manifests: dict[str, dict[str, Manifest]] = {}

    def add(self, manifest: Manifest) -> None:
        self._manifests.setdefault(manifest.name, {})[manifest.release] = manifest

    def releases(self, name: str) -> list[str]:
        return list(self._manifests.get(name, ()))

    def manifest(self, name: str, release: str) -> Manifest | None:
        return self._manifests.get(name, {}).get(release)

    def __contains__(self, key: tuple[str, str]) -> bool:
        name, release = key
        return release in self._manifests.get(name, {})

    @classmethod
    def from_snapshot(cls, snapshot: TimedSnapshot) -> "ManifestRegistry":
        """Manifest view of a timed snapshot: each unit's declared
        dependencies are its use-edges, pinned to the exact target release.
        This makes resolution reproducible at any historical instant."""
        registry = cls()
        for unit in sorted(snapshot.units, key=lambda u: u.uid):
            deps = []
            for dep_uid in sorted(snapshot.use_of(unit.uid)):
                dep = snapshot.unit(dep_uid)
                deps.append((dep.name, VersionRange.pin(dep.release)))
            registry.add(Manifest(unit.name, unit.release, tuple(deps)))
        return registry


def build_nested_tree(root: Manifest, registry: ManifestRegistry) -> DepTree:
    """Fully resolve ``root`` against ``registry`` into a nested tree.

    Every dependency range picks the greatest satisfying release available
    in the registry. A (name, version) repeating on the active path becomes
    a back-reference leaf. Raises :class:`NoMatchingVersion` with the
    path at which resolution failed.
    """
    # memo holds finished subtrees that contain no back-reference escaping
    # them, keyed by (name, version); those are path-independent.
    memo: dict[tuple[str, str], DepTree] = {}

    def resolve_dep(dep_name: str, rng: VersionRange, path: tuple) -> str:
        available = registry.releases(dep_name)
        if rng.raw and rng.raw in available:
            # a requirement naming an existing release label verbatim is an
            # exact pin, whether or not the label parses as semver
            return rng.raw
        try:
            if not available:
                raise NoMatchingVersion(f"{dep_name!r} has no releases")
            return str(resolve_version_range(rng, available))
        except NoMatchingVersion as exc:
            at = " -> ".join(f"{n}@{v}" for n, v in path)
            raise NoMatchingVersion(f"{exc} (required at {at})") from None

    def expand(name: str, version: str, manifest: Manifest, path: tuple):
        """Returns (node, open_refs): names/versions of back-references
        inside the subtree that point above this node."""
        node = DepTree(name, version)
        key = (name, version)
        open_refs: set[tuple[str, str]] = set()
        for dep_name, rng in manifest.dependencies:
            dep_version = resolve_dep(dep_name, rng, path + (key,))
            dep_key = (dep_name, dep_version)
            if dep_key in path + (key,):
                node.children.append(
                    DepTree(dep_name, dep_version, back_reference=True)
                )
                open_refs.add(dep_key)
                continue
            if dep_key in memo:
                node.children.append(memo[dep_key])
                continue
            dep_manifest = registry.manifest(dep_name, dep_version)
            if dep_manifest is None:
                # release known to the registry index but with no manifest
                node.children.append(DepTree(dep_name, dep_version))
                continue
            child, child_open = expand(dep_name, dep_version, dep_manifest, path + (key,))
            node.children.append(child)
            open_refs |= child_open
        open_refs.discard(key)
        if not open_refs:
            memo[key] = node
        return node, open_refs

    tree, _ = expand(root.name, root.release, root, ())
    tree.style = "nested"
    return tree


def build_tree_at(
    snapshot: TimedSnapshot, name: str, release: str
) -> DepTree:
    """Nested tree for a unit present in ``snapshot``; raises UnknownRoot."""
    registry = ManifestRegistry.from_snapshot(snapshot)
    root = registry.manifest(name, release)
    if root is None:
        raise UnknownRoot(f"{name}@{release} is not present at t={snapshot.at}")
    return build_nested_tree(root, registry)


def flatten_tree(nested: DepTree) -> DepTree:
    """Hoist a nested tree into flat form by installation order.

    Installation order is breadth-first with children in declaration
    order. The first version of each name becomes a top-level entry; a
    later different version stays nested under the package that resolved
    it; an identical version is deduplicated. Fresh nodes are always
    created, so shared subtrees in the input are never mutated.
    """
    root = DepTree(nested.name, nested.version, style="flat")
    hoisted: dict[str, str] = {nested.name: nested.version}
    queue: deque[tuple[DepTree, DepTree]] = deque(
        (child, root) for child in nested.children
    )
    while queue:
        node, parent = queue.popleft()
        placed = hoisted.get(node.name)
        if node.back_reference:
            if placed != node.version:
                parent.children.append(
                    DepTree(node.name, node.version, back_reference=True)
                )
            continue
        if placed is None:
            copy = DepTree(node.name, node.version)
            hoisted[node.name] = node.version
            root.children.append(copy)
        elif placed == node.version:
            continue  # already installed; children were handled with the first copy
        else:
            copy = DepTree(node.name, node.version)
            parent.children.append(copy)
        queue.extend((child, copy) for child in node.children)
    return root


def detect_conflicts(tree: DepTree) -> list[Conflict]:
    """Every name appearing at more than one version anywhere in the tree."""
    versions: dict[str, set[str]] = {}
    seen: set[int] = set()
    stack = [tree]
    while stack:
        node = stack.pop()
        if id(node) in seen:
            continue
        seen.add(id(node))
        versions.setdefault(node.name, set()).add(node.version)
        stack.extend(node.children)
    return [
        Conflict(name, frozenset(vs))
        for name, vs in sorted(versions.items())
        if len(vs) >= 2
    ]


def unused_declared(
    manifest: Manifest, observed_imports: set[str]
) -> tuple[set[str], set[str]]:
    """Split declared vs observed dependency names.

    Returns ``(unused, phantom)``: names declared but never observed in
    use, and names observed in use but never declared.
    """
    declared = manifest.dependency_names()
    observed = set(observed_imports)
    return declared - observed, observed - declared


# --- serialization ------------------------------------------------------------


def tree_to_dict(tree: DepTree) -> dict:
    """JSON-ready nested document."""
    doc: dict = {"name": tree.name, "version": tree.version}
    if tree.back_reference:
        doc["back_reference"] = True
    if tree.children:
        doc["children"] = [tree_to_dict(c) for c in tree.children]
    return doc


def iter_lock_entries(tree: DepTree):
    """Lock-style rows for a flat tree: (``name@version``, nesting path)."""
    def walk(node: DepTree, path: tuple[str, ...]):
        yield f"{node.name}@{node.version}", "/".join(path)
        for child in node.children:
            yield from walk(child, path + (node.name,))

    yield from walk(tree, ())


def count_nodes(tree: DepTree) -> int:
    """Number of package occurrences in the tree, counting shared subtrees
    once per occurrence (computed analytically, not by unfolding)."""
    counts: dict[int, int] = {}

    def total(node: DepTree) -> int:
        cached = counts.get(id(node))
        if cached is not None:
            return cached
        value = 1 + sum(total(c) for c in node.children)
        counts[id(node)] = value
        return value

    return total(tree)
