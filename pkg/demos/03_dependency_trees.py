"""
Nested trees, flat trees, and what hoisting preserves
=====================================================

Installers differ in whether two versions of one library may coexist in a
dependency tree. We build the classic conflict case — the root wants B 1.0.0
while its dependency C wants B 2.0.0 — resolve it as a fully nested tree,
then hoist it the way flattening installers do and check that every package
still sees the version it resolved.
"""

import json

from pkgverse import (
    Manifest,
    ManifestRegistry,
    build_nested_tree,
    detect_conflicts,
    flatten_tree,
    parse_manifest,
    unused_declared,
)
from pkgverse.resolve import iter_lock_entries, tree_to_dict
from pkgverse.semver import VersionRange


def manifest(name, release, deps=()):
    return Manifest(name, release, tuple((d, VersionRange.parse(r)) for d, r in deps))


registry = ManifestRegistry()
registry.add(manifest("B", "1.0.0"))
registry.add(manifest("B", "2.0.0"))
registry.add(manifest("C", "1.0.0", [("B", "2.0.0")]))
root = manifest("A", "1.0.0", [("B", "1.0.0"), ("C", "1.0.0")])

nested = build_nested_tree(root, registry)
print("nested tree:")
print(json.dumps(tree_to_dict(nested), indent=2))

print("\nconflicts:", [(c.name, sorted(c.versions)) for c in detect_conflicts(nested)])

flat = flatten_tree(nested)
print("\nflat (hoisted) tree as a lock listing:")
for entry, path in iter_lock_entries(flat):
    print(f"  {entry:14s} {path or '(top level)'}")

# ranges resolve to the greatest satisfying release
registry.add(manifest("B", "1.9.0"))
caret = build_nested_tree(manifest("A", "2.0.0", [("B", "^1.0.0")]), registry)
print("\n'^1.0.0' resolved B to", caret.children[0].version)

# declared vs actually-imported dependencies (import scan supplied externally)
m = parse_manifest('{"name":"A","version":"1.0.0","dependencies":{"B":"^1.0.0","C":"*"}}')
unused, phantom = unused_declared(m, observed_imports={"B", "D"})
print("\ndeclared but never imported:", sorted(unused))
print("imported but never declared:", sorted(phantom))
